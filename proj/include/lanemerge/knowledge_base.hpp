#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lanemerge/protocol.hpp"

namespace lanemerge::orch {

// Thread-safe store of the latest description per road user. Updates never
// move a vehicle backwards in time, and snapshots drop entries that have not
// been refreshed within the staleness horizon.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::int64_t staleness_horizon_ms = 1000)
      : horizon_ms_(staleness_horizon_ms) {}

  // Applies the update unless a newer description is already stored. Returns
  // whether the update was taken.
  bool upsert(const wire::RoadUser& user);

  std::optional<wire::RoadUser> get(const std::string& id) const;

  // Evicts users older than the horizon relative to `now_ms`, then returns
  // the survivors ordered by id.
  std::vector<wire::RoadUser> snapshot(std::int64_t now_ms);

  std::size_t size() const;
  std::int64_t staleness_horizon_ms() const { return horizon_ms_; }

  // Highest timestamp seen so far; serves as the logical clock when callers
  // have no wall time tied to the data.
  std::int64_t latest_timestamp_ms() const;

 private:
  mutable std::mutex mutex_;
  std::int64_t horizon_ms_;
  std::int64_t latest_ms_ = 0;
  std::map<std::string, wire::RoadUser> users_;
};

}  // namespace lanemerge::orch
