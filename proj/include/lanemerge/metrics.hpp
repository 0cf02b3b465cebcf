#pragma once

#include <vector>

namespace lanemerge::ml {

// Fraction of predictions equal to the label. Throws on empty or mismatched
// input.
double exact_match_accuracy(const std::vector<double>& predictions,
                            const std::vector<double>& labels);

// Fraction of predictions within +/- tolerance of the label (inclusive).
// With angular=true both values are treated as headings in degrees and the
// difference wraps around 360.
double tolerance_accuracy(const std::vector<double>& predictions,
                          const std::vector<double>& labels, double tolerance,
                          bool angular = false);

double mean_squared_error(const std::vector<double>& predictions,
                          const std::vector<double>& labels);

}  // namespace lanemerge::ml
