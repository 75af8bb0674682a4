#pragma once
// Runs an experiment configuration and renders its tables.

#include <string>
#include <variant>
#include <vector>

#include "nhlab/config.hpp"

namespace nhlab {

inline constexpr const char* kToolName = "nhlab";
inline constexpr const char* kToolVersion = "0.1.0";

using Cell = std::variant<long long, double, bool, std::string>;

struct Section {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunResult {
  std::vector<Section> sections;
  json summary = json::object();
};

/// Grid points are spread over `threads` workers; results keep grid order.
RunResult run(const ExperimentConfig& config, int threads = 1);

/// Header block (tool, seed, config echo) followed by the sections.
std::string render(const ExperimentConfig& config, const RunResult& result, OutputFormat format);

/// %.16e, or nan / inf / -inf.
std::string format_double(double v);

}  // namespace nhlab
