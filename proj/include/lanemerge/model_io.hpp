#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "lanemerge/model.hpp"

namespace lanemerge::ml {

inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& out, const Model& model);
void save_model_file(const std::string& path, const Model& model);

std::unique_ptr<Model> load_model(std::istream& in);
std::unique_ptr<Model> load_model_file(const std::string& path);

// The three models the planner consumes, stored in one file.
struct ModelBundle {
  std::unique_ptr<Model> merge;    // classifier
  std::unique_ptr<Model> accel;    // regressor, m/s^2
  std::unique_ptr<Model> heading;  // regressor, degrees
};

void save_bundle_file(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle_file(const std::string& path);

}  // namespace lanemerge::ml
