#pragma once
// Experiment configuration documents (JSON) for the command-line driver.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nhlab/error.hpp"
#include "nhlab/exponents.hpp"
#include "nhlab/gram.hpp"
#include "nhlab/serialize.hpp"

namespace nhlab {

enum class Command { density, gram, bounds_sweep, trace, defect_decay, dd_condition, sharpness };
std::string to_string(Command c);

enum class OutputFormat { csv, json };
std::string to_string(OutputFormat f);

struct DirectionsSpec {
  std::string rule = "constant";  // constant | random | partition
  int d = 1;
  int axis = 0;
  bool operator==(const DirectionsSpec&) const = default;
};

/// Chain detection for divided-difference systems.
struct ChainSpec {
  double gamma_prime = 0.0;
  int M = 1;
  bool operator==(const ChainSpec&) const = default;
};

struct Grids {
  std::vector<int> N;
  std::vector<double> R;
  std::vector<double> lengths;
  std::vector<double> delta;
  std::vector<double> r;
  bool operator==(const Grids&) const = default;
};

struct ExperimentConfig {
  Command command = Command::density;
  GeneratorSpec family;
  std::string label;
  DirectionsSpec directions;
  std::optional<IntervalSpec> interval;
  SystemKind system = SystemKind::exponential;
  std::optional<ChainSpec> chains;  // required for divided-difference systems
  Grids grids;
  std::optional<double> y;
  std::optional<double> r;
  std::optional<double> R;
  std::optional<double> alpha;
  int quad_order = 16;
  std::optional<std::uint64_t> seed;  // overrides family.seed
  std::string output_path;
  OutputFormat format = OutputFormat::csv;

  std::uint64_t effective_seed() const { return seed ? *seed : family.seed; }
  bool operator==(const ExperimentConfig&) const = default;
};

/// Every problem found in a document, not just the first.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_json(const json& doc);

/// Canonical form; parse_config(config_to_json(c)) == c.
json config_to_json(const ExperimentConfig& config);

}  // namespace nhlab
