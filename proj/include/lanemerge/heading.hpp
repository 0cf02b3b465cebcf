#pragma once

#include <cmath>

namespace lanemerge {

// Headings are bearings in degrees, measured counter-clockwise from the
// positive x axis and kept in [0, 360).
inline double normalize_heading(double degrees) {
  double a = std::fmod(degrees, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a = 0.0;
  return a;
}

inline double bearing_degrees(double dx, double dy) {
  return normalize_heading(std::atan2(dy, dx) * 180.0 / M_PI);
}

// Smallest angular distance between two headings, in [0, 180].
inline double heading_distance(double a, double b) {
  const double d = std::fabs(normalize_heading(a) - normalize_heading(b));
  return d > 180.0 ? 360.0 - d : d;
}

}  // namespace lanemerge
