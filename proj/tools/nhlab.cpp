// nhlab: run an experiment config and write its table.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "nhlab/config.hpp"
#include "nhlab/runner.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nhlab::ValidationError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame bounds and Gram experiments for nonharmonic exponential systems"};
  std::string config_path, out_path, format;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_path, "output file; overrides output.path, default stdout");
  app.add_option("--format", format, "csv or json; overrides output.format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker threads for grid points")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "overrides the config seed");
  app.set_version_flag("--version", std::string(nhlab::kToolName) + " " + nhlab::kToolVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  nhlab::ExperimentConfig config;
  try {
    config = nhlab::parse_config(slurp(config_path));
  } catch (const nhlab::ConfigError& e) {
    for (const auto& err : e.errors()) std::cerr << "config error: " << err << "\n";
    return kExitValidation;
  } catch (const nhlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  if (seed) config.seed = *seed;
  if (!format.empty()) config.format = format == "json" ? nhlab::OutputFormat::json : nhlab::OutputFormat::csv;
  // --out only picks the destination; the echoed config keeps its own output.path
  const std::string destination = out_path.empty() ? config.output_path : out_path;

  std::string text;
  try {
    text = nhlab::render(config, nhlab::run(config, threads), config.format);
  } catch (const nhlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }

  if (destination.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(destination, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << destination << "'\n";
    return kExitNumerical;
  }
  return 0;
}
