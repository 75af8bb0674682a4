#include <doctest.h>

#include <numbers>
#include <sstream>

#include "nhlab/config.hpp"
#include "nhlab/runner.hpp"
#include "nhlab/serialize.hpp"

using namespace nhlab;
constexpr double pi = std::numbers::pi;

namespace {

const char* kDensity = R"({"command": "density",
  "family": {"kind": "lattice", "params": {"spacing": 1, "window": [-64, 64]}},
  "grids": {"r": [1, 2, 4, 8, 16, 32, 48, 64]}})";

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("minimal density config parses") {
  const auto c = parse_config(kDensity);
  CHECK(c.command == Command::density);
  CHECK(c.grids.r.size() == 8);
  CHECK(c.format == OutputFormat::csv);
}

TEST_CASE("missing interval is named") {
  const auto errs = errors_of(R"({"command": "bounds-sweep",
    "family": {"kind": "lattice", "params": {"window": [-8, 8]}}, "grids": {"N": [2, 4]}})");
  REQUIRE(errs.size() == 1);
  CHECK(mentions(errs, "interval"));
}

TEST_CASE("decreasing grid is rejected") {
  const auto errs = errors_of(R"({"command": "bounds-sweep", "interval": [0, "2pi"],
    "family": {"kind": "lattice", "params": {"window": [-8, 8]}},
    "grids": {"N": [2, 4], "lengths": ["2.2pi", "1.8pi"]}})");
  CHECK(mentions(errs, "grid not increasing"));
}

TEST_CASE("every error is reported") {
  const auto errs = errors_of(R"({"command": "trace", "family": {"kind": "lattice", "params": {"spacing": -1}},
    "grids": {"R": [3, 2]}, "quad_order": 1, "colour": "red"})");
  CHECK(mentions(errs, "family.params.spacing"));
  CHECK(mentions(errs, "family.params.window"));
  CHECK(mentions(errs, "grid not increasing"));
  CHECK(mentions(errs, "quad_order"));
  CHECK(mentions(errs, "colour: unknown field"));
  CHECK(mentions(errs, "interval"));
  CHECK(errs.size() >= 7);
}

TEST_CASE("unknown command and bad syntax") {
  CHECK(mentions(errors_of(R"({"command": "plot", "family": {"kind": "lattice", "params": {"window": [0, 1]}}})"),
                 "unknown command"));
  CHECK(mentions(errors_of("{not json"), "syntax"));
}

TEST_CASE("numbers may be written with pi") {
  const auto c = parse_config(R"({"command": "gram", "family": {"kind": "explicit", "params": {"values": [0, "pi", "2*pi"]}},
    "interval": {"start": "-pi", "length": "1.5pi"}})");
  CHECK(c.family.values[1] == pi);
  CHECK(c.family.values[2] == 2 * pi);
  CHECK(c.interval->a == -pi);
  CHECK(c.interval->b == -pi + 1.5 * pi);
  CHECK(mentions(errors_of(R"({"command": "gram", "family": {"kind": "explicit", "params": {"values": [0]}},
    "interval": [0, "2pie"]})"), "interval[1]"));
}

TEST_CASE("echoed config reparses to an equal config") {
  const char* docs[] = {
      kDensity,
      R"({"command": "sharpness", "family": {"kind": "lattice", "params": {"window": [-16, 16]}, "seed": 3},
          "directions": {"d": 2}, "alpha": 0.5, "interval": [0, "pi"], "grids": {"N": [2, 4], "lengths": ["0.8pi", "1.2pi"]},
          "seed": 12345678901234, "output": {"format": "json", "path": "x.json"}})",
      R"({"command": "gram", "family": {"kind": "clustered-pairs", "params": {"spacing": 4, "window": [-8, 8], "delta": 1e-3}},
          "system": "divided-difference", "chains": {"gamma_prime": 2, "M": 2}, "interval": [0.1, 7.3], "quad_order": 24})",
      R"({"command": "trace", "family": {"kind": "perturbed-lattice", "params": {"window": [-20, 20], "max_perturbation": 0.2}, "seed": 4},
          "directions": {"rule": "random", "d": 3}, "interval": [0, 7], "y": 0.25, "r": 4, "R": 9, "label": "p"})"};
  for (const char* doc : docs) {
    const auto c = parse_config(doc);
    const auto echo = config_to_json(c);
    CHECK(parse_config(echo.dump()) == c);
    CHECK(config_to_json(parse_config(echo.dump())).dump() == echo.dump());
  }
}

TEST_CASE("family and Gram records round-trip") {
  GeneratorSpec s;
  s.kind = GeneratorSpec::Kind::perturbed_lattice;
  s.window_lo = -5;
  s.window_hi = 5;
  s.max_perturbation = 0.1;
  s.seed = 77;
  const auto f = generate_family(s);
  const auto back = family_from_json(json::parse(family_to_json(f).dump()));
  CHECK(back == f);
  REQUIRE(back.generator());
  CHECK(*back.generator() == s);

  const auto G = assemble_gram(FunctionSystem::exponential(f, DirectionAssignment::random(f, 2, 1)), {0, 3});
  const auto G2 = gram_from_json(json::parse(gram_to_json(G).dump()));
  CHECK(G2.entries == G.entries);
  CHECK(G2.interval == G.interval);
  CHECK(G2.d == 2);
}

TEST_CASE("double formatting") {
  CHECK(format_double(1.0) == "1.0000000000000000e+00");
  CHECK(format_double(-0.1) == "-1.0000000000000001e-01");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("bounds-sweep output has two report blocks") {
  const auto c = parse_config(R"({"command": "bounds-sweep",
    "family": {"kind": "lattice", "params": {"window": [-128, 128]}},
    "interval": [0, "2pi"], "grids": {"N": [16, 32, 64, 128], "lengths": ["1.8pi", "2.2pi"]}})");
  const std::string text = render(c, run(c, 2), OutputFormat::csv);
  const auto ls = lines(text);
  CHECK(ls[0] == "# tool: nhlab 0.1.0");
  CHECK(ls[1] == "# seed: 0");
  REQUIRE(ls[2].rfind("# config: ", 0) == 0);
  CHECK(parse_config(ls[2].substr(10)) == c);
  CHECK(text.find("degenerating") != std::string::npos);
  const auto verdicts = text.substr(text.find("# section: verdicts"));
  const auto vl = lines(verdicts);
  REQUIRE(vl.size() == 4);
  CHECK(vl[2].find(",degenerating,") != std::string::npos);
  CHECK(vl[3].find(",stable,") != std::string::npos);
  CHECK(render(c, run(c, 1), OutputFormat::csv) == text);
}

TEST_CASE("trace output row") {
  const auto c = parse_config(R"({"command": "trace",
    "family": {"kind": "lattice", "params": {"window": [-64, 64]}},
    "interval": [0, "2pi"], "y": 0, "r": 5.5, "R": 10})");
  const auto res = run(c);
  REQUIRE(res.sections.size() == 1);
  const auto& sec = res.sections[0];
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(sec.columns.begin(), sec.columns.end(), name) - sec.columns.begin());
  };
  REQUIRE(col("pass") < sec.columns.size());
  const auto& row = sec.rows.at(0);
  CHECK(std::get<long long>(row[col("card_omega_r")]) == 11);
  CHECK(std::get<long long>(row[col("card_gamma")]) == 31);
  CHECK(std::get<double>(row[col("abs_trace")]) == doctest::Approx(11.0));
  CHECK(std::get<double>(row[col("bound")]) == 31.0);
  CHECK(std::get<bool>(row[col("pass")]));
}

TEST_CASE("sharpness output") {
  const auto c = parse_config(R"({"command": "sharpness",
    "family": {"kind": "lattice", "params": {"window": [-32, 32]}},
    "directions": {"d": 2}, "alpha": 0.5, "interval": [0, "2pi"]})");
  const auto res = run(c);
  const double residual = res.summary.at("block_identity_residual");
  CHECK(residual <= 1e-12);
  const auto& classes = res.sections.at(0);
  REQUIRE(classes.rows.size() == 2);
  for (const auto& row : classes.rows) CHECK(std::get<double>(row[3]) == doctest::Approx(pi));
}

TEST_CASE("json output carries the seed and config") {
  auto c = parse_config(R"({"command": "gram", "family": {"kind": "perturbed-lattice",
    "params": {"window": [-3, 3], "max_perturbation": 0.2}, "seed": 5},
    "directions": {"rule": "random", "d": 2}, "interval": [0, 3]})");
  c.seed = 42;
  const auto doc = json::parse(render(c, run(c), OutputFormat::json));
  CHECK(doc["tool"] == "nhlab 0.1.0");
  CHECK(doc["seed"] == 42);
  CHECK(parse_config(doc["config"].dump()) == c);
  CHECK(doc["sections"][0]["rows"].size() == 49);
  // the seed drives generation
  auto d = c;
  d.seed = 43;
  CHECK(render(d, run(d), OutputFormat::json) != render(c, run(c), OutputFormat::json));
}

TEST_CASE("numerical failures name the grid point") {
  const auto c = parse_config(R"({"command": "bounds-sweep",
    "family": {"kind": "lattice", "params": {"window": [-8, 8]}},
    "interval": [0, 1], "grids": {"N": [4, 16]}})");
  CHECK_THROWS_WITH_AS(run(c), doctest::Contains("N"), ValidationError);
}
