#include "lanemerge/service_config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lanemerge::orch {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "' needs an integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "' needs a number, got '" + value + "'");
  }
}

void apply(ServiceConfig& config, const std::string& key, const std::string& value) {
  if (key == "listen_port") {
    const long long port = parse_integer(key, value);
    if (port < 0 || port > 65535) throw std::runtime_error("listen_port out of range");
    config.listen_port = static_cast<std::uint16_t>(port);
  } else if (key == "model_path") {
    config.model_path = value;
  } else if (key == "target_lane") {
    const long long lane = parse_integer(key, value);
    if (lane < 0) throw std::runtime_error("target_lane must be non-negative");
    config.target_lane = static_cast<int>(lane);
  } else if (key == "lane_center_x") {
    config.lane_center_x = parse_real(key, value);
  } else if (key == "clearance_factor") {
    const double factor = parse_real(key, value);
    if (factor <= 0.0) throw std::runtime_error("clearance_factor must be positive");
    config.clearance_factor = factor;
  } else if (key == "staleness_ms") {
    const long long ms = parse_integer(key, value);
    if (ms <= 0) throw std::runtime_error("staleness_ms must be positive");
    config.staleness_ms = ms;
  } else if (key == "budget_ms") {
    const double ms = parse_real(key, value);
    if (ms <= 0.0) throw std::runtime_error("budget_ms must be positive");
    config.budget_ms = ms;
  } else {
    throw std::runtime_error("unknown config key '" + key + "'");
  }
}

}  // namespace

ServiceConfig parse_service_config(std::istream& in) {
  ServiceConfig config;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_number) +
                               ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_number) + ": empty key");
    }
    apply(config, key, value);
  }
  return config;
}

ServiceConfig load_service_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_service_config(in);
}

void apply_env_overrides(ServiceConfig& config) {
  static constexpr const char* kKeys[] = {"listen_port",  "model_path",       "target_lane",
                                          "lane_center_x", "clearance_factor", "staleness_ms",
                                          "budget_ms"};
  for (const char* key : kKeys) {
    std::string env_name = "LANEMERGE_";
    for (const char* c = key; *c; ++c) {
      env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    }
    if (const char* value = std::getenv(env_name.c_str())) {
      apply(config, key, value);
    }
  }
}

}  // namespace lanemerge::orch
