#include "lanemerge/replay.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace lanemerge::replay {

namespace {

using Clock = std::chrono::steady_clock;

LatencyStats stats_from(const std::vector<double>& samples) {
  LatencyStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  s.p50 = percentile(samples, 50.0);
  s.p95 = percentile(samples, 95.0);
  s.p99 = percentile(samples, 99.0);
  s.max = *std::max_element(samples.begin(), samples.end());
  return s;
}

struct Collector {
  std::mutex mutex;
  std::condition_variable cv;
  std::vector<wire::Recommendation> recommendations;
  std::vector<Clock::time_point> arrivals;
  std::size_t errors = 0;
  bool closed = false;
};

void reader_loop(int fd, Collector& collector) {
  std::string buffer;
  char chunk[4096];
  for (;;) {
    const ssize_t got = ::recv(fd, chunk, sizeof chunk, 0);
    if (got <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(got));

    std::size_t start = 0;
    for (std::size_t pos = buffer.find('\n', start); pos != std::string::npos;
         pos = buffer.find('\n', start)) {
      std::string line = buffer.substr(start, pos - start);
      start = pos + 1;
      if (line.empty()) continue;
      try {
        auto message = wire::decode_message(line);
        std::lock_guard lock(collector.mutex);
        if (auto* rec = std::get_if<wire::Recommendation>(&message)) {
          collector.recommendations.push_back(std::move(*rec));
          collector.arrivals.push_back(Clock::now());
        } else if (std::get_if<wire::ErrorMessage>(&message)) {
          ++collector.errors;
        }
      } catch (const wire::ProtocolError&) {
        std::lock_guard lock(collector.mutex);
        ++collector.errors;
      }
      collector.cv.notify_all();
    }
    buffer.erase(0, start);
  }
  std::lock_guard lock(collector.mutex);
  collector.closed = true;
  collector.cv.notify_all();
}

void send_all(int fd, const std::string& line) {
  std::string framed = line;
  framed.push_back('\n');
  std::size_t sent = 0;
  while (sent < framed.size()) {
    const ssize_t n = ::send(fd, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) throw std::runtime_error("replay connection closed while sending");
    sent += static_cast<std::size_t>(n);
  }
}

}  // namespace

double percentile(std::vector<double> samples, double pct) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  if (pct <= 0.0 || pct > 100.0) throw std::invalid_argument("percentile must be in (0, 100]");
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(samples.size())));
  return samples[std::max<std::size_t>(rank, 1) - 1];
}

BitrateCheck bitrate_check(const ScenarioTrace& trace) {
  BitrateCheck check;
  if (trace.updates.empty()) return check;

  std::size_t total_bytes = 0;
  for (const auto& update : trace.updates) {
    total_bytes += wire::encode_message(update).size() + 1;  // newline framing
  }
  check.mean_message_bytes =
      static_cast<double>(total_bytes) / static_cast<double>(trace.updates.size());
  check.bits_per_second_per_vehicle = check.mean_message_bytes * 8.0 * trace.meta.rate_hz;
  check.fits_low_rate = check.bits_per_second_per_vehicle <= check.low_rate_bps;
  check.fits_high_rate = check.bits_per_second_per_vehicle <= check.high_rate_bps;
  return check;
}

ReplayResult replay(const ScenarioTrace& trace, const ReplayOptions& options) {
  if (trace.updates.empty()) throw std::invalid_argument("empty trace");
  if (options.speed_factor < 0.0) throw std::invalid_argument("speed factor must be >= 0");

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket() failed");

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options.port);
  if (::inet_pton(AF_INET, options.host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw std::runtime_error("bad replay host: " + options.host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    ::close(fd);
    throw std::runtime_error("cannot connect to " + options.host + ":" +
                             std::to_string(options.port));
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

  Collector collector;
  std::thread reader([fd, &collector] { reader_loop(fd, collector); });

  ReplayResult result;
  result.budget_ms = options.budget_ms;
  result.bitrate = bitrate_check(trace);

  std::map<std::pair<std::string, std::int64_t>, Clock::time_point> send_times;
  std::size_t expected = 0;

  try {
    send_all(fd, wire::encode_message(wire::Subscribe{options.client_name}));

    const auto replay_start = Clock::now();
    const std::int64_t first_ts = trace.updates.front().user.timestamp_ms;
    for (const auto& update : trace.updates) {
      if (options.speed_factor > 0.0) {
        const double offset_ms =
            static_cast<double>(update.user.timestamp_ms - first_ts) / options.speed_factor;
        std::this_thread::sleep_until(
            replay_start + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double, std::milli>(offset_ms)));
      }
      if (update.user.merging) {
        send_times[{update.user.id, update.user.timestamp_ms}] = Clock::now();
        ++expected;
      }
      send_all(fd, wire::encode_message(update));
      ++result.updates_sent;
    }

    std::unique_lock lock(collector.mutex);
    collector.cv.wait_for(
        lock, std::chrono::duration<double>(options.response_timeout_s),
        [&] { return collector.closed || collector.recommendations.size() >= expected; });
  } catch (...) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
    reader.join();
    throw;
  }

  ::shutdown(fd, SHUT_RDWR);
  reader.join();
  ::close(fd);

  result.recommendations = std::move(collector.recommendations);
  result.errors_received = collector.errors;
  result.recommendations_received = result.recommendations.size();

  result.round_trip_by_recommendation_ms.assign(result.recommendations.size(), -1.0);
  for (std::size_t i = 0; i < result.recommendations.size(); ++i) {
    const auto& rec = result.recommendations[i];
    result.processing_samples_ms.push_back(rec.processing_ms);
    const auto it = send_times.find({rec.vehicle_id, rec.rud_timestamp_ms});
    if (it == send_times.end()) {
      ++result.unmatched_recommendations;
      continue;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(collector.arrivals[i] - it->second).count();
    result.round_trip_by_recommendation_ms[i] = ms;
    result.round_trip_samples_ms.push_back(ms);
  }

  result.round_trip = stats_from(result.round_trip_samples_ms);
  result.processing = stats_from(result.processing_samples_ms);
  result.processing_within_budget =
      result.processing.count > 0 && result.processing.p99 <= options.budget_ms;
  return result;
}

std::vector<Violation> oracle_check(const ScenarioTrace& trace,
                                    const std::vector<wire::Recommendation>& recommendations,
                                    int target_lane, double clearance_factor) {
  // Last reported state per vehicle at or before a given time.
  std::map<std::string, std::vector<const wire::RoadUser*>> history;
  for (const auto& update : trace.updates) history[update.user.id].push_back(&update.user);

  auto state_at = [&](const std::string& id, std::int64_t ts) -> const wire::RoadUser* {
    auto it = history.find(id);
    if (it == history.end()) return nullptr;
    const wire::RoadUser* best = nullptr;
    for (const auto* user : it->second) {
      if (user->timestamp_ms <= ts) best = user;
    }
    return best;
  };

  std::vector<Violation> violations;
  for (std::size_t r = 0; r < recommendations.size(); ++r) {
    const auto& rec = recommendations[r];
    if (!rec.merge_flag) continue;

    const wire::RoadUser* merging = state_at(rec.vehicle_id, rec.rud_timestamp_ms);
    if (!merging) {
      violations.push_back({r, 0, "no trace state for " + rec.vehicle_id});
      continue;
    }

    const wire::RoadUser* preceding = nullptr;
    const wire::RoadUser* following = nullptr;
    for (const auto& [id, states] : history) {
      if (id == rec.vehicle_id) continue;
      const wire::RoadUser* user = state_at(id, rec.rud_timestamp_ms);
      if (!user || user->lane_id != target_lane) continue;
      if (user->y > merging->y) {
        if (!preceding || user->y < preceding->y) preceding = user;
      } else if (user->y < merging->y) {
        if (!following || user->y > following->y) following = user;
      }
    }

    for (std::size_t w = 0; w < rec.waypoints.size(); ++w) {
      const auto& waypoint = rec.waypoints[w];
      const std::int64_t t_abs = rec.rud_timestamp_ms + waypoint.t_offset_ms;
      const double radius_m = clearance_factor * waypoint.speed * 3.6;

      auto neighbor_y = [&](const wire::RoadUser& user) {
        return user.y + user.speed * static_cast<double>(t_abs - user.timestamp_ms) / 1000.0;
      };

      for (const wire::RoadUser* user : {preceding, following}) {
        if (!user) continue;
        const double dy = waypoint.y - neighbor_y(*user);
        const double dx = waypoint.x - user->x;
        if (std::hypot(dx, dy) <= radius_m + user->length) {
          violations.push_back({r, w, "protective circles touch " + user->id});
        }
      }
      if (following) {
        const double follower_front = neighbor_y(*following) + following->length / 2.0;
        const double rear = waypoint.y - merging->length / 2.0;
        if (follower_front + radius_m > rear) {
          violations.push_back({r, w, "drops behind " + following->id});
        }
      }
    }
  }
  return violations;
}

void write_latency_csv(std::ostream& out, const ReplayResult& result) {
  out << "recommendation,round_trip_ms,processing_ms\n";
  for (std::size_t i = 0; i < result.recommendations.size(); ++i) {
    out << i << ',';
    if (i < result.round_trip_by_recommendation_ms.size() &&
        result.round_trip_by_recommendation_ms[i] >= 0.0) {
      out << result.round_trip_by_recommendation_ms[i];
    }
    out << ',' << result.recommendations[i].processing_ms << '\n';
  }
}

std::string summarize(const ReplayResult& result) {
  std::ostringstream out;
  out << "updates sent:            " << result.updates_sent << '\n'
      << "recommendations:         " << result.recommendations_received << '\n'
      << "protocol errors:         " << result.errors_received << '\n';
  if (result.round_trip.count > 0) {
    out << "round trip ms (client-side, includes loopback transport outside the budget):\n"
        << "  p50 " << result.round_trip.p50 << "  p95 " << result.round_trip.p95 << "  p99 "
        << result.round_trip.p99 << "  max " << result.round_trip.max << '\n';
  }
  if (result.processing.count > 0) {
    out << "planning ms (service-side):\n"
        << "  p50 " << result.processing.p50 << "  p95 " << result.processing.p95 << "  p99 "
        << result.processing.p99 << "  max " << result.processing.max << '\n';
  }
  out << "budget " << result.budget_ms << " ms: "
      << (result.processing_within_budget ? "met" : "missed") << " (p99 planning)\n";
  out << "channel load: " << result.bitrate.mean_message_bytes << " B/msg -> "
      << result.bitrate.bits_per_second_per_vehicle << " bps/vehicle";
  out << (result.bitrate.fits_low_rate ? " (fits the narrow channel)"
                                       : result.bitrate.fits_high_rate
                                             ? " (needs the broadband channel)"
                                             : " (exceeds both reference channels)");
  out << '\n';
  return out.str();
}

}  // namespace lanemerge::replay
