#include "nhlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace nhlab {

std::string to_string(Command c) {
  switch (c) {
    case Command::density: return "density";
    case Command::gram: return "gram";
    case Command::bounds_sweep: return "bounds-sweep";
    case Command::trace: return "trace";
    case Command::defect_decay: return "defect-decay";
    case Command::dd_condition: return "dd-condition";
    case Command::sharpness: return "sharpness";
  }
  return "unknown";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string out = "invalid config";
  for (std::size_t i = 0; i < errors.size(); ++i) out += (i == 0 ? ": " : "; ") + errors[i];
  return out;
}

// Plain numbers, or strings such as "2pi", "-pi", "1.8*pi", "0.5".
std::optional<double> number_from_string(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s.resize(s.size() - 2);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty() || s == "+") s = "1";
    if (s == "-") s = "-1";
  }
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v * factor;
}

class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
      if (!ok.count(key)) error(path.empty() ? key : path + "." + key, "unknown field");
  }

  std::optional<double> number(const json& j, const std::string& path) {
    std::optional<double> v;
    if (j.is_number()) v = j.get<double>();
    else if (j.is_string()) v = number_from_string(j.get<std::string>());
    if (!v || !std::isfinite(*v)) {
      error(path, "expected a finite number");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> opt_number(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj.at(key), path);
  }

  std::optional<long long> integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<long long>();
    if (j.is_number_float()) {
      const double v = j.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long long>(v);
    }
    error(path, "expected an integer");
    return std::nullopt;
  }

  std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) {
      error(path, "expected a string");
      return {};
    }
    return j.get<std::string>();
  }

  template <class T>
  std::vector<T> grid(const json& j, const std::string& path) {
    std::vector<T> out;
    if (!j.is_array() || j.empty()) {
      error(path, "expected a nonempty array");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string at = path + "[" + std::to_string(i) + "]";
      if constexpr (std::is_same_v<T, int>) {
        if (auto v = integer(j[i], at)) out.push_back(static_cast<int>(*v));
      } else {
        if (auto v = number(j[i], at)) out.push_back(*v);
      }
    }
    if (out.size() == j.size())
      for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) {
          error(path, "grid not increasing");
          break;
        }
    return out;
  }
};

GeneratorSpec read_family(Reader& rd, const json& j) {
  GeneratorSpec spec;
  if (!j.is_object()) {
    rd.error("family", "expected an object");
    return spec;
  }
  rd.check_keys(j, "family", {"kind", "params", "seed"});
  if (!j.contains("kind")) {
    rd.error("family.kind", "missing required field");
    return spec;
  }
  try {
    spec.kind = generator_kind_from_string(rd.string(j.at("kind"), "family.kind"));
  } catch (const ValidationError& e) {
    rd.error("family.kind", e.what());
    return spec;
  }
  if (j.contains("seed")) {
    if (j.at("seed").is_number_unsigned()) spec.seed = j.at("seed").get<std::uint64_t>();
    else rd.error("family.seed", "expected a nonnegative integer");
  }
  const json params = j.value("params", json::object());
  if (!params.is_object()) {
    rd.error("family.params", "expected an object");
    return spec;
  }
  using K = GeneratorSpec::Kind;
  if (spec.kind == K::explicit_values) {
    rd.check_keys(params, "family.params", {"values"});
    if (!params.contains("values")) {
      rd.error("family.params.values", "missing required field");
    } else {
      const json& v = params.at("values");
      if (!v.is_array() || v.empty()) rd.error("family.params.values", "expected a nonempty array");
      else
        for (std::size_t i = 0; i < v.size(); ++i)
          if (auto x = rd.number(v[i], "family.params.values[" + std::to_string(i) + "]")) spec.values.push_back(*x);
      if (!std::is_sorted(spec.values.begin(), spec.values.end())) rd.error("family.params.values", "not sorted");
    }
    return spec;
  }
  if (spec.kind == K::lattice) rd.check_keys(params, "family.params", {"spacing", "offset", "window"});
  if (spec.kind == K::perturbed_lattice)
    rd.check_keys(params, "family.params", {"spacing", "offset", "window", "max_perturbation"});
  if (spec.kind == K::clustered_pairs) rd.check_keys(params, "family.params", {"spacing", "offset", "window", "delta"});

  if (auto v = rd.opt_number(params, "spacing", "family.params.spacing")) spec.spacing = *v;
  if (!(spec.spacing > 0)) rd.error("family.params.spacing", "must be positive");
  if (auto v = rd.opt_number(params, "offset", "family.params.offset")) spec.offset = *v;
  if (!params.contains("window")) {
    rd.error("family.params.window", "missing required field");
  } else {
    const json& w = params.at("window");
    if (!w.is_array() || w.size() != 2) {
      rd.error("family.params.window", "expected [lo, hi]");
    } else {
      auto lo = rd.number(w[0], "family.params.window[0]");
      auto hi = rd.number(w[1], "family.params.window[1]");
      if (lo && hi) {
        spec.window_lo = *lo;
        spec.window_hi = *hi;
        if (*lo > *hi) rd.error("family.params.window", "lo exceeds hi");
      }
    }
  }
  if (spec.kind == K::perturbed_lattice) {
    if (auto v = rd.opt_number(params, "max_perturbation", "family.params.max_perturbation")) spec.max_perturbation = *v;
    if (!(spec.max_perturbation >= 0 && spec.max_perturbation < 0.5 * spec.spacing))
      rd.error("family.params.max_perturbation", "must lie in [0, spacing/2)");
  }
  if (spec.kind == K::clustered_pairs) {
    if (!params.contains("delta")) rd.error("family.params.delta", "missing required field");
    else if (auto v = rd.number(params.at("delta"), "family.params.delta")) spec.delta = *v;
    if (params.contains("delta") && !(spec.delta > 0 && spec.delta < spec.spacing))
      rd.error("family.params.delta", "must lie in (0, spacing)");
  }
  return spec;
}

std::optional<IntervalSpec> read_interval(Reader& rd, const json& j) {
  std::optional<double> a, b;
  if (j.is_array() && j.size() == 2) {
    a = rd.number(j[0], "interval[0]");
    b = rd.number(j[1], "interval[1]");
  } else if (j.is_object() && j.contains("length")) {
    rd.check_keys(j, "interval", {"length", "start"});
    a = j.contains("start") ? rd.number(j.at("start"), "interval.start") : 0.0;
    auto L = rd.number(j.at("length"), "interval.length");
    if (a && L) b = *a + *L;
  } else {
    rd.error("interval", "expected [a, b] or {\"length\": L}");
    return std::nullopt;
  }
  if (!a || !b) return std::nullopt;
  if (!(*b > *a)) {
    rd.error("interval", "empty interval");
    return std::nullopt;
  }
  return IntervalSpec(*a, *b);
}

Command read_command(Reader& rd, const std::string& name) {
  for (Command c : {Command::density, Command::gram, Command::bounds_sweep, Command::trace, Command::defect_decay,
                    Command::dd_condition, Command::sharpness})
    if (to_string(c) == name) return c;
  rd.error("command", "unknown command '" + name + "'");
  return Command::density;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors) : ValidationError(join(errors)), errors_(std::move(errors)) {}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  return parse_config_json(doc);
}

ExperimentConfig parse_config_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError({"document: expected an object"});
  Reader rd;
  ExperimentConfig c;
  rd.check_keys(doc, "", {"command", "family", "label", "directions", "interval", "system", "chains", "grids", "y",
                          "r", "R", "alpha", "quad_order", "seed", "output"});

  bool command_ok = false;
  if (!doc.contains("command")) {
    rd.error("command", "missing required field");
  } else {
    const std::size_t before = rd.errors.size();
    c.command = read_command(rd, rd.string(doc.at("command"), "command"));
    command_ok = rd.errors.size() == before;
  }

  if (!doc.contains("family")) rd.error("family", "missing required field");
  else c.family = read_family(rd, doc.at("family"));
  if (doc.contains("label")) c.label = rd.string(doc.at("label"), "label");

  if (doc.contains("directions")) {
    const json& d = doc.at("directions");
    if (!d.is_object()) {
      rd.error("directions", "expected an object");
    } else {
      rd.check_keys(d, "directions", {"rule", "d", "axis"});
      if (d.contains("rule")) c.directions.rule = rd.string(d.at("rule"), "directions.rule");
      if (c.directions.rule != "constant" && c.directions.rule != "random" && c.directions.rule != "partition")
        rd.error("directions.rule", "expected constant, random or partition");
      if (d.contains("d"))
        if (auto v = rd.integer(d.at("d"), "directions.d")) c.directions.d = static_cast<int>(*v);
      if (d.contains("axis"))
        if (auto v = rd.integer(d.at("axis"), "directions.axis")) c.directions.axis = static_cast<int>(*v);
      if (c.directions.d < 1 || c.directions.d > 64) rd.error("directions.d", "must lie in [1, 64]");
      if (c.directions.axis < 0 || c.directions.axis >= c.directions.d)
        rd.error("directions.axis", "must lie in [0, d)");
    }
  }

  if (doc.contains("interval")) c.interval = read_interval(rd, doc.at("interval"));

  if (doc.contains("system")) {
    const std::string s = rd.string(doc.at("system"), "system");
    if (s == "exponential") c.system = SystemKind::exponential;
    else if (s == "divided-difference") c.system = SystemKind::divided_difference;
    else rd.error("system", "expected exponential or divided-difference");
  }
  if (doc.contains("chains")) {
    const json& ch = doc.at("chains");
    ChainSpec spec;
    if (!ch.is_object()) {
      rd.error("chains", "expected an object");
    } else {
      rd.check_keys(ch, "chains", {"gamma_prime", "M"});
      if (!ch.contains("gamma_prime")) rd.error("chains.gamma_prime", "missing required field");
      else if (auto v = rd.number(ch.at("gamma_prime"), "chains.gamma_prime")) spec.gamma_prime = *v;
      if (ch.contains("M"))
        if (auto v = rd.integer(ch.at("M"), "chains.M")) spec.M = static_cast<int>(*v);
      if (!(spec.gamma_prime > 0)) rd.error("chains.gamma_prime", "must be positive");
      if (spec.M < 1) rd.error("chains.M", "must be at least 1");
    }
    c.chains = spec;
  }
  if (c.system == SystemKind::divided_difference && !c.chains) rd.error("chains", "missing required field");

  if (doc.contains("grids")) {
    const json& g = doc.at("grids");
    if (!g.is_object()) {
      rd.error("grids", "expected an object");
    } else {
      rd.check_keys(g, "grids", {"N", "R", "lengths", "delta", "r"});
      if (g.contains("N")) c.grids.N = rd.grid<int>(g.at("N"), "grids.N");
      if (g.contains("R")) c.grids.R = rd.grid<double>(g.at("R"), "grids.R");
      if (g.contains("lengths")) c.grids.lengths = rd.grid<double>(g.at("lengths"), "grids.lengths");
      if (g.contains("delta")) c.grids.delta = rd.grid<double>(g.at("delta"), "grids.delta");
      if (g.contains("r")) c.grids.r = rd.grid<double>(g.at("r"), "grids.r");
      if (!c.grids.N.empty() && c.grids.N.front() < 0) rd.error("grids.N", "must be nonnegative");
      for (const auto* v : {&c.grids.R, &c.grids.lengths, &c.grids.delta, &c.grids.r})
        if (!v->empty() && !(v->front() > 0)) {
          rd.error("grids", "grid values must be positive");
          break;
        }
    }
  }

  c.y = rd.opt_number(doc, "y", "y");
  c.r = rd.opt_number(doc, "r", "r");
  c.R = rd.opt_number(doc, "R", "R");
  c.alpha = rd.opt_number(doc, "alpha", "alpha");
  if (c.r && !(*c.r > 0)) rd.error("r", "must be positive");
  if (c.R && !(*c.R > 0)) rd.error("R", "must be positive");
  if (doc.contains("quad_order"))
    if (auto v = rd.integer(doc.at("quad_order"), "quad_order")) c.quad_order = static_cast<int>(*v);
  if (c.quad_order < 2 || c.quad_order > 128) rd.error("quad_order", "must lie in [2, 128]");
  if (doc.contains("seed")) {
    if (doc.at("seed").is_number_unsigned()) c.seed = doc.at("seed").get<std::uint64_t>();
    else rd.error("seed", "expected a nonnegative integer");
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (!o.is_object()) {
      rd.error("output", "expected an object");
    } else {
      rd.check_keys(o, "output", {"path", "format"});
      if (o.contains("path")) c.output_path = rd.string(o.at("path"), "output.path");
      if (o.contains("format")) {
        const std::string f = rd.string(o.at("format"), "output.format");
        if (f == "csv") c.format = OutputFormat::csv;
        else if (f == "json") c.format = OutputFormat::json;
        else rd.error("output.format", "expected csv or json");
      }
    }
  }

  if (command_ok) {
    auto need = [&](bool present, const char* field) {
      if (!present) rd.error(field, "missing required field for " + to_string(c.command));
    };
    switch (c.command) {
      case Command::density:
        need(!c.grids.r.empty(), "grids.r");
        break;
      case Command::gram:
        need(c.interval.has_value(), "interval");
        break;
      case Command::bounds_sweep:
        need(c.interval.has_value(), "interval");
        need(!c.grids.N.empty(), "grids.N");
        break;
      case Command::trace:
        need(c.interval.has_value(), "interval");
        need(c.r.has_value(), "r");
        need(c.R.has_value(), "R");
        break;
      case Command::defect_decay:
        need(c.interval.has_value(), "interval");
        need(c.r.has_value(), "r");
        need(!c.grids.R.empty(), "grids.R");
        break;
      case Command::dd_condition:
        need(c.interval.has_value(), "interval");
        need(!c.grids.delta.empty(), "grids.delta");
        if (c.family.kind != GeneratorSpec::Kind::clustered_pairs)
          rd.error("family.kind", "dd-condition needs a clustered-pairs family");
        break;
      case Command::sharpness:
        need(c.interval.has_value(), "interval");
        need(c.alpha.has_value(), "alpha");
        if (c.directions.d < 2) rd.error("directions.d", "sharpness needs d >= 2");
        break;
    }
    if (c.directions.rule == "partition" && c.command != Command::sharpness)
      rd.error("directions.rule", "partition directions are only built by the sharpness command");
    if ((c.command == Command::trace || c.command == Command::defect_decay) && c.system != SystemKind::exponential)
      rd.error("system", to_string(c.command) + " needs an exponential system");
  }

  if (!rd.errors.empty()) throw ConfigError(std::move(rd.errors));
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["family"] = generator_to_json(c.family);
  if (!c.label.empty()) j["label"] = c.label;
  j["directions"] = {{"rule", c.directions.rule}, {"d", c.directions.d}, {"axis", c.directions.axis}};
  if (c.interval) j["interval"] = {c.interval->a, c.interval->b};
  j["system"] = to_string(c.system);
  if (c.chains) j["chains"] = {{"gamma_prime", c.chains->gamma_prime}, {"M", c.chains->M}};
  json grids = json::object();
  if (!c.grids.N.empty()) grids["N"] = c.grids.N;
  if (!c.grids.R.empty()) grids["R"] = c.grids.R;
  if (!c.grids.lengths.empty()) grids["lengths"] = c.grids.lengths;
  if (!c.grids.delta.empty()) grids["delta"] = c.grids.delta;
  if (!c.grids.r.empty()) grids["r"] = c.grids.r;
  if (!grids.empty()) j["grids"] = grids;
  if (c.y) j["y"] = *c.y;
  if (c.r) j["r"] = *c.r;
  if (c.R) j["R"] = *c.R;
  if (c.alpha) j["alpha"] = *c.alpha;
  j["quad_order"] = c.quad_order;
  if (c.seed) j["seed"] = *c.seed;
  json out{{"format", to_string(c.format)}};
  if (!c.output_path.empty()) out["path"] = c.output_path;
  j["output"] = out;
  return j;
}

}  // namespace nhlab
