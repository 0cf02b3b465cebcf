#include "lanemerge/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>

namespace lanemerge::orch {

OrchestratorCore::OrchestratorCore(ml::ModelBundle bundle, PlannerConfig config,
                                   std::int64_t staleness_horizon_ms)
    : bundle_(std::move(bundle)), config_(config), kb_(staleness_horizon_ms) {}

wire::Recommendation OrchestratorCore::plan_for(const wire::RoadUser& user) {
  const auto started = std::chrono::steady_clock::now();
  const auto snapshot = kb_.snapshot(kb_.latest_timestamp_ms());
  PlanResult plan = plan_merge(user, snapshot, bundle_, config_);
  const auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - started);

  wire::Recommendation rec = std::move(plan.recommendation);
  rec.processing_ms = elapsed.count();
  {
    std::lock_guard lock(mutex_);
    rec.recommendation_id = next_recommendation_id_++;
    issued_.emplace(rec.recommendation_id, rec.vehicle_id);
    processing_ms_.push_back(rec.processing_ms);
  }
  return rec;
}

OrchestratorCore::FrameResult OrchestratorCore::handle_frame(Session& session,
                                                             const std::string& line) {
  FrameResult result;
  wire::Message message;
  try {
    message = wire::decode_message(line);
  } catch (const wire::ProtocolError& e) {
    result.replies.push_back(
        wire::encode_message(wire::ErrorMessage{e.code(), e.what()}));
    return result;
  }

  if (auto* update = std::get_if<wire::RudUpdate>(&message)) {
    kb_.upsert(update->user);
    if (update->user.merging) {
      const wire::Recommendation rec = plan_for(update->user);
      result.broadcasts.push_back(wire::encode_message(rec));
    }
    return result;
  }

  if (auto* subscribe = std::get_if<wire::Subscribe>(&message)) {
    session.subscribed = true;
    session.client = subscribe->client;
    return result;
  }

  if (auto* feedback = std::get_if<wire::Feedback>(&message)) {
    std::lock_guard lock(mutex_);
    auto it = issued_.find(feedback->recommendation_id);
    if (it == issued_.end() || it->second != feedback->vehicle_id) {
      result.replies.push_back(wire::encode_message(wire::ErrorMessage{
          "unknown_recommendation",
          "no recommendation " + std::to_string(feedback->recommendation_id) + " for vehicle " +
              feedback->vehicle_id}));
      return result;
    }
    if (feedback->accepted) {
      ++accepted_;
    } else {
      ++rejected_;
    }
    return result;
  }

  // Recommendations and errors originate here; a client sending one is lost.
  result.replies.push_back(wire::encode_message(wire::ErrorMessage{
      "unexpected_message",
      std::string(wire::message_type(message)) + " messages are not accepted"}));
  return result;
}

std::vector<double> OrchestratorCore::processing_times_ms() const {
  std::lock_guard lock(mutex_);
  return processing_ms_;
}

std::uint64_t OrchestratorCore::recommendations_issued() const {
  std::lock_guard lock(mutex_);
  return next_recommendation_id_ - 1;
}

std::uint64_t OrchestratorCore::feedback_accepted() const {
  std::lock_guard lock(mutex_);
  return accepted_;
}

std::uint64_t OrchestratorCore::feedback_rejected() const {
  std::lock_guard lock(mutex_);
  return rejected_;
}

OrchestratorServer::OrchestratorServer(OrchestratorCore& core, std::uint16_t port)
    : core_(core), port_(port) {}

OrchestratorServer::~OrchestratorServer() { stop(); }

void OrchestratorServer::start() {
  if (running_.load()) return;

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("socket() failed");

  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port_);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("bind() failed on port " + std::to_string(port_));
  }
  if (::listen(listen_fd_, 16) < 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("listen() failed");
  }

  if (port_ == 0) {
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    if (::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
      port_ = ntohs(bound.sin_port);
    }
  }

  running_.store(true);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void OrchestratorServer::stop() {
  if (!running_.exchange(false)) return;

  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;

  {
    std::lock_guard lock(connections_mutex_);
    for (auto& connection : connections_) {
      if (connection->fd >= 0) ::shutdown(connection->fd, SHUT_RDWR);
    }
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  for (auto& worker : workers_) {
    if (worker.joinable()) worker.join();
  }
  workers_.clear();
  {
    std::lock_guard lock(connections_mutex_);
    for (auto& connection : connections_) {
      if (connection->fd >= 0) ::close(connection->fd);
      connection->fd = -1;
    }
    connections_.clear();
  }
}

void OrchestratorServer::accept_loop() {
  while (running_.load()) {
    sockaddr_in peer{};
    socklen_t len = sizeof peer;
    const int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr*>(&peer), &len);
    if (fd < 0) {
      if (!running_.load()) break;
      continue;
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

    auto connection = std::make_shared<Connection>();
    connection->fd = fd;
    {
      std::lock_guard lock(connections_mutex_);
      connections_.push_back(connection);
      workers_.emplace_back([this, connection] { serve_connection(connection); });
    }
  }
}

void OrchestratorServer::serve_connection(std::shared_ptr<Connection> connection) {
  std::string buffer;
  char chunk[4096];
  while (running_.load()) {
    const ssize_t got = ::recv(connection->fd, chunk, sizeof chunk, 0);
    if (got <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(got));

    std::size_t start = 0;
    for (std::size_t pos = buffer.find('\n', start); pos != std::string::npos;
         pos = buffer.find('\n', start)) {
      std::string line = buffer.substr(start, pos - start);
      start = pos + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;

      const auto result = core_.handle_frame(connection->session, line);
      for (const auto& reply : result.replies) send_line(*connection, reply);
      if (!result.broadcasts.empty()) broadcast(result.broadcasts);
    }
    buffer.erase(0, start);
  }
}

void OrchestratorServer::send_line(Connection& connection, const std::string& line) {
  if (connection.fd < 0) return;
  std::lock_guard lock(connection.write_mutex);
  std::string framed = line;
  framed.push_back('\n');
  std::size_t sent = 0;
  while (sent < framed.size()) {
    const ssize_t n = ::send(connection.fd, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return;
    sent += static_cast<std::size_t>(n);
  }
}

void OrchestratorServer::broadcast(const std::vector<std::string>& lines) {
  std::vector<std::shared_ptr<Connection>> targets;
  {
    std::lock_guard lock(connections_mutex_);
    for (const auto& connection : connections_) {
      if (connection->session.subscribed) targets.push_back(connection);
    }
  }
  for (const auto& connection : targets) {
    for (const auto& line : lines) send_line(*connection, line);
  }
}

}  // namespace lanemerge::orch
