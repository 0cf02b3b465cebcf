#include "lanemerge/knowledge_base.hpp"

#include <algorithm>

namespace lanemerge::orch {

bool KnowledgeBase::upsert(const wire::RoadUser& user) {
  std::lock_guard lock(mutex_);
  latest_ms_ = std::max(latest_ms_, user.timestamp_ms);
  auto it = users_.find(user.id);
  if (it == users_.end()) {
    users_.emplace(user.id, user);
    return true;
  }
  if (user.timestamp_ms < it->second.timestamp_ms) return false;
  it->second = user;
  return true;
}

std::optional<wire::RoadUser> KnowledgeBase::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = users_.find(id);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

std::vector<wire::RoadUser> KnowledgeBase::snapshot(std::int64_t now_ms) {
  std::lock_guard lock(mutex_);
  std::vector<wire::RoadUser> out;
  for (auto it = users_.begin(); it != users_.end();) {
    if (now_ms - it->second.timestamp_ms > horizon_ms_) {
      it = users_.erase(it);
    } else {
      out.push_back(it->second);
      ++it;
    }
  }
  return out;
}

std::size_t KnowledgeBase::size() const {
  std::lock_guard lock(mutex_);
  return users_.size();
}

std::int64_t KnowledgeBase::latest_timestamp_ms() const {
  std::lock_guard lock(mutex_);
  return latest_ms_;
}

}  // namespace lanemerge::orch
