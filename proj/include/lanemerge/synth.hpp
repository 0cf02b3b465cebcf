#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lanemerge/trajectory.hpp"

namespace lanemerge::synth {

// Writes a raw trajectory file in the column layout the parser expects, with
// `events` lane changes, each performed by one vehicle flanked by a leader
// and a follower in the destination lane. Values are plausible highway
// kinematics; a share of the followers closes in fast so unsafe situations
// occur too.
void write_raw_fixture(const std::string& path, int events, std::uint64_t seed);

// One synthetic scenario window on the sample grid: the merging vehicle
// changes lane at the centre sample, neighbours appear with high probability
// and a slice of them approach fast from behind.
traj::ScenarioWindow random_window(std::mt19937_64& rng, int ordinal);

std::vector<traj::ScenarioWindow> random_windows(int count, std::uint64_t seed);

}  // namespace lanemerge::synth
