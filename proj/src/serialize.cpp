#include "nhlab/serialize.hpp"

#include "nhlab/error.hpp"

namespace nhlab {

json generator_to_json(const GeneratorSpec& spec) {
  json params = json::object();
  switch (spec.kind) {
    case GeneratorSpec::Kind::explicit_values:
      params["values"] = spec.values;
      break;
    case GeneratorSpec::Kind::perturbed_lattice:
      params["max_perturbation"] = spec.max_perturbation;
      [[fallthrough]];
    case GeneratorSpec::Kind::lattice:
    case GeneratorSpec::Kind::clustered_pairs:
      params["spacing"] = spec.spacing;
      params["offset"] = spec.offset;
      params["window"] = {spec.window_lo, spec.window_hi};
      if (spec.kind == GeneratorSpec::Kind::clustered_pairs) params["delta"] = spec.delta;
      break;
  }
  return json{{"kind", to_string(spec.kind)}, {"params", params}, {"seed", spec.seed}};
}

GeneratorSpec generator_from_json(const json& j) {
  GeneratorSpec spec;
  spec.kind = generator_kind_from_string(j.at("kind").get<std::string>());
  const json params = j.value("params", json::object());
  spec.seed = j.value("seed", std::uint64_t{0});
  if (spec.kind == GeneratorSpec::Kind::explicit_values) {
    spec.values = params.at("values").get<std::vector<double>>();
    return spec;
  }
  spec.spacing = params.value("spacing", 1.0);
  spec.offset = params.value("offset", 0.0);
  const auto window = params.at("window").get<std::vector<double>>();
  if (window.size() != 2) throw ValidationError("window must be [lo, hi]");
  spec.window_lo = window[0];
  spec.window_hi = window[1];
  spec.max_perturbation = params.value("max_perturbation", 0.0);
  spec.delta = params.value("delta", 0.0);
  return spec;
}

json family_to_json(const ExponentFamily& family) {
  json j{{"label", family.label()},
         {"first_index", family.first_index()},
         {"exponents", std::vector<double>(family.values().begin(), family.values().end())}};
  if (family.generator()) j["generator"] = generator_to_json(*family.generator());
  return j;
}

ExponentFamily family_from_json(const json& j) {
  ExponentFamily f(j.at("exponents").get<std::vector<double>>(), j.value("first_index", 0L),
                   j.value("label", std::string{}));
  if (j.contains("generator")) f.set_generator(generator_from_json(j.at("generator")));
  return f;
}

json gram_to_json(const GramMatrix& G) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < G.entries.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < G.entries.cols(); ++k)
      row.push_back({G.entries(i, k).real(), G.entries(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return json{{"system", to_string(G.kind)},
              {"d", G.d},
              {"interval", {G.interval.a, G.interval.b}},
              {"size", G.entries.rows()},
              {"entries", std::move(rows)}};
}

GramMatrix gram_from_json(const json& j) {
  GramMatrix G;
  const std::string kind = j.at("system").get<std::string>();
  if (kind == "exponential") G.kind = SystemKind::exponential;
  else if (kind == "divided-difference") G.kind = SystemKind::divided_difference;
  else if (kind == "fourier") G.kind = SystemKind::fourier;
  else throw ValidationError("unknown system kind '" + kind + "'");
  G.d = j.at("d").get<int>();
  const auto iv = j.at("interval").get<std::vector<double>>();
  G.interval = IntervalSpec(iv.at(0), iv.at(1));
  const auto& rows = j.at("entries");
  const auto n = static_cast<Eigen::Index>(rows.size());
  G.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) throw ValidationError("Gram matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k)
      G.entries(i, k) = cplx(rows[i][k].at(0).get<double>(), rows[i][k].at(1).get<double>());
  }
  return G;
}

}  // namespace nhlab
