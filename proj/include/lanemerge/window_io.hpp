#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lanemerge/trajectory.hpp"

namespace lanemerge::traj {

// Windows are stored one JSON object per line so large extractions can be
// streamed without holding the whole file in memory.
void write_windows(std::ostream& out, const std::vector<ScenarioWindow>& windows);
void write_windows_file(const std::string& path, const std::vector<ScenarioWindow>& windows);

std::vector<ScenarioWindow> read_windows(std::istream& in);
std::vector<ScenarioWindow> read_windows_file(const std::string& path);

}  // namespace lanemerge::traj
