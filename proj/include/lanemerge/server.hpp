#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lanemerge/knowledge_base.hpp"
#include "lanemerge/planner.hpp"

namespace lanemerge::orch {

// Protocol logic without any I/O: feed one line in, get the lines to answer
// with. The TCP server and the tests drive this same surface.
class OrchestratorCore {
 public:
  struct Session {
    std::atomic<bool> subscribed{false};  // read by the broadcast fan-out
    std::string client;
  };

  struct FrameResult {
    std::vector<std::string> replies;     // for the sending connection
    std::vector<std::string> broadcasts;  // for every subscribed connection
  };

  OrchestratorCore(ml::ModelBundle bundle, PlannerConfig config,
                   std::int64_t staleness_horizon_ms = 1000);

  FrameResult handle_frame(Session& session, const std::string& line);

  KnowledgeBase& knowledge_base() { return kb_; }
  const PlannerConfig& planner_config() const { return config_; }

  std::vector<double> processing_times_ms() const;
  std::uint64_t recommendations_issued() const;
  std::uint64_t feedback_accepted() const;
  std::uint64_t feedback_rejected() const;

 private:
  wire::Recommendation plan_for(const wire::RoadUser& user);

  ml::ModelBundle bundle_;
  PlannerConfig config_;
  KnowledgeBase kb_;

  mutable std::mutex mutex_;
  std::uint64_t next_recommendation_id_ = 1;
  std::map<std::uint64_t, std::string> issued_;  // recommendation id -> vehicle
  std::vector<double> processing_ms_;
  std::uint64_t accepted_ = 0;
  std::uint64_t rejected_ = 0;
};

// Newline-delimited JSON over TCP. One thread per connection; recommendations
// fan out to every subscribed client.
class OrchestratorServer {
 public:
  OrchestratorServer(OrchestratorCore& core, std::uint16_t port);
  ~OrchestratorServer();

  OrchestratorServer(const OrchestratorServer&) = delete;
  OrchestratorServer& operator=(const OrchestratorServer&) = delete;

  void start();
  void stop();
  std::uint16_t port() const { return port_; }
  bool running() const { return running_.load(); }

 private:
  struct Connection {
    int fd = -1;
    OrchestratorCore::Session session;
    std::mutex write_mutex;
  };

  void accept_loop();
  void serve_connection(std::shared_ptr<Connection> connection);
  void send_line(Connection& connection, const std::string& line);
  void broadcast(const std::vector<std::string>& lines);

  OrchestratorCore& core_;
  std::uint16_t port_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;

  std::mutex connections_mutex_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::vector<std::thread> workers_;
};

}  // namespace lanemerge::orch
