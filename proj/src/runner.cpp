#include "nhlab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "nhlab/analysis.hpp"
#include "nhlab/basisfuncs.hpp"

namespace nhlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ExponentFamily build_family(const ExperimentConfig& c) {
  GeneratorSpec spec = c.family;
  spec.seed = c.effective_seed();
  ExponentFamily f = generate_family(spec);
  if (!c.label.empty()) {
    ExponentFamily labelled(std::vector<double>(f.values().begin(), f.values().end()), f.first_index(), c.label);
    labelled.set_generator(spec);
    return labelled;
  }
  return f;
}

DirectionAssignment build_directions(const ExperimentConfig& c, const ExponentFamily& family) {
  if (c.directions.rule == "random") return DirectionAssignment::random(family, c.directions.d, c.effective_seed());
  return DirectionAssignment::constant(family, c.directions.d, c.directions.axis);
}

FunctionSystem build_system(const ExperimentConfig& c, const ExponentFamily& family, const DirectionAssignment& dirs) {
  if (c.system == SystemKind::divided_difference) {
    const DividedDifferenceBasis basis(family, detect_chains(family, c.chains->gamma_prime, c.chains->M));
    return FunctionSystem::divided_difference(basis, dirs);
  }
  return FunctionSystem::exponential(family, dirs);
}

double window_centre(const ExponentFamily& family) {
  return 0.5 * (family.values().front() + family.values().back());
}

void append_frame_bounds(Section& bounds, Section& verdicts, double length, const FrameBoundReport& rep) {
  for (std::size_t i = 0; i < rep.N.size(); ++i)
    bounds.rows.push_back({length, static_cast<long long>(rep.N[i]), rep.lambda_min[i], rep.lambda_max[i],
                           rep.resolved(i)});
  verdicts.rows.push_back({length, to_string(rep.verdict), rep.interlacing, rep.resolution});
}

RunResult run_density(const ExperimentConfig& c, const AnalysisOptions& opts) {
  const ExponentFamily family = build_family(c);
  RunResult res;
  const DensityEstimate est = estimate_density(family, c.grids.r);
  Section counting{"counting", {"r", "n_plus", "in_fit"}, {}};
  for (std::size_t i = 0; i < est.radii.size(); ++i)
    counting.rows.push_back({est.radii[i], static_cast<long long>(est.counts[i]), i >= est.fit_begin});
  res.sections.push_back(std::move(counting));
  res.summary["size"] = family.size();
  res.summary["dplus_estimate"] = est.dplus_estimate;
  res.summary["intercept"] = est.intercept;
  res.summary["fit_residual"] = est.residual;
  if (const auto per = detect_periodicity(family)) {
    res.summary["period"] = per->period;
    res.summary["dplus_exact"] = per->density();
  }
  const GapReport gaps = validate_gaps(family, 1);
  res.summary["gamma"] = finite_or_null(gaps.gamma);
  res.summary["strict_gap"] = gaps.satisfies_strict_gap;

  if (c.interval && c.R) {
    const auto dirs = build_directions(c, family);
    const DensityChainReport rep = density_chain_check(family, dirs, *c.interval, c.grids.r, *c.R, c.y, opts);
    Section chain{"density_chain", {"r", "card_omega_r", "card_gamma", "ratio", "epsilon", "holds", "implied_length"}, {}};
    for (const auto& row : rep.rows)
      chain.rows.push_back({row.r, static_cast<long long>(row.card_omega_r), static_cast<long long>(row.card_gamma),
                            row.ratio, row.epsilon, row.holds, row.implied_length});
    res.sections.push_back(std::move(chain));
    res.summary["dplus_threshold"] = rep.dplus_threshold;
  }
  return res;
}

RunResult run_gram(const ExperimentConfig& c, const AnalysisOptions& opts) {
  const ExponentFamily family = build_family(c);
  const auto dirs = build_directions(c, family);
  QuadratureOptions q;
  q.order = c.quad_order;
  q.threads = opts.threads;
  const GramMatrix G = assemble_gram(build_system(c, family, dirs), *c.interval, q);
  RunResult res;
  Section entries{"entries", {"row", "col", "re", "im"}, {}};
  for (Eigen::Index i = 0; i < G.size(); ++i)
    for (Eigen::Index k = 0; k < G.size(); ++k)
      entries.rows.push_back({static_cast<long long>(i), static_cast<long long>(k), G.entries(i, k).real(),
                              G.entries(i, k).imag()});
  res.sections.push_back(std::move(entries));
  const EigenBounds eb = extreme_eigenvalues(G);
  res.summary["size"] = G.size();
  res.summary["d"] = G.d;
  res.summary["system"] = to_string(G.kind);
  res.summary["lambda_min"] = eb.lambda_min;
  res.summary["lambda_max"] = eb.lambda_max;
  res.summary["eigen_residual"] = eb.residual;
  return res;
}

RunResult run_bounds_sweep(const ExperimentConfig& c, const AnalysisOptions& opts) {
  const ExponentFamily family = build_family(c);
  const auto dirs = build_directions(c, family);
  const FunctionSystem system = build_system(c, family, dirs);
  RunResult res;
  Section bounds{"frame_bounds", {"length", "N", "lambda_min", "lambda_max", "resolved"}, {}};
  Section verdicts{"verdicts", {"length", "verdict", "interlacing", "resolution"}, {}};
  if (c.grids.lengths.empty()) {
    const FrameBoundReport rep = frame_bound_sequence(system, *c.interval, c.grids.N, opts);
    append_frame_bounds(bounds, verdicts, c.interval->length(), rep);
  } else {
    const SweepResult sweep = threshold_sweep(system, c.grids.lengths, c.grids.N, opts, c.interval->a);
    for (std::size_t i = 0; i < sweep.grid.size(); ++i) append_frame_bounds(bounds, verdicts, sweep.grid[i], sweep.reports[i]);
    res.summary["last_degenerating"] = sweep.last_degenerating ? json(*sweep.last_degenerating) : json(nullptr);
    res.summary["first_stable"] = sweep.first_stable ? json(*sweep.first_stable) : json(nullptr);
  }
  res.sections.push_back(std::move(bounds));
  res.sections.push_back(std::move(verdicts));
  return res;
}

RunResult run_trace(const ExperimentConfig& c, const AnalysisOptions&) {
  const ExponentFamily family = build_family(c);
  const auto dirs = build_directions(c, family);
  const double y = c.y ? *c.y : window_centre(family);
  const TraceExperiment ex = run_trace_experiment(build_system(c, family, dirs), *c.interval, y, *c.r, *c.R);
  RunResult res;
  const double diff = std::abs(ex.trace_direct - ex.trace_decomposed);
  res.sections.push_back(Section{"trace",
                                 {"y", "r", "R", "d", "card_omega_r", "card_gamma", "abs_trace", "bound", "pass",
                                  "decomposition_gap", "decomposition_pass", "max_defect", "max_dual_norm"},
                                 {{ex.y, ex.r, ex.R, static_cast<long long>(ex.d), static_cast<long long>(ex.card_omega_r),
                                   static_cast<long long>(ex.card_gamma), std::abs(ex.trace_direct), ex.trace_bound(),
                                   ex.trace_bound_holds(), diff, ex.decomposition_consistent(), ex.max_defect(), ex.max_dual_norm}}});
  res.summary["trace_re"] = ex.trace_direct.real();
  res.summary["trace_im"] = ex.trace_direct.imag();
  res.summary["biorthogonality_residual"] = ex.biorthogonality_residual;
  return res;
}

RunResult run_defect_decay(const ExperimentConfig& c, const AnalysisOptions& opts) {
  const ExponentFamily family = build_family(c);
  const auto dirs = build_directions(c, family);
  const double y = c.y ? *c.y : window_centre(family);
  const DefectDecay fit = defect_decay_fit(build_system(c, family, dirs), *c.interval, y, *c.r, c.grids.R, opts);
  RunResult res;
  Section rows{"defect", {"R", "max_defect", "defect_squared", "majorant", "below"}, {}};
  for (std::size_t i = 0; i < fit.R.size(); ++i) {
    const double sq = fit.max_defect[i] * fit.max_defect[i];
    rows.rows.push_back({fit.R[i], fit.max_defect[i], sq, fit.majorant[i], sq <= fit.majorant[i]});
  }
  res.sections.push_back(std::move(rows));
  res.summary["y"] = y;
  res.summary["slope"] = fit.slope;
  res.summary["intercept"] = fit.intercept;
  res.summary["zero_defect"] = fit.zero_defect;
  res.summary["below_majorant"] = fit.below_majorant();
  res.summary["slope_in_range"] = fit.slope >= -1.0 && fit.slope <= -0.45;
  return res;
}

RunResult run_dd_condition(const ExperimentConfig& c, const AnalysisOptions& opts) {
  const IntervalSpec& I = *c.interval;
  const auto points =
      conditioning_comparison(c.family.spacing, c.family.window_lo, c.family.window_hi, I, c.grids.delta, opts);
  RunResult res;
  Section rows{"conditioning",
               {"delta", "raw_condition", "dd_condition", "dd_normalized_condition", "raw_over_dd",
                "raw_over_dd_normalized", "empirical_C", "bound_C"},
               {}};
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (const auto& pt : points) {
    GeneratorSpec spec = c.family;
    spec.delta = pt.delta;
    const ExponentFamily family = generate_family(spec);
    const auto dirs = DirectionAssignment::constant(family, 1);
    const DividedDifferenceBasis basis(family, detect_chains(family, 0.5 * spec.spacing, 2));
    // every grid frequency within a few spacings of the window
    const double scale = I.length() / (2.0 * std::numbers::pi);
    const long lo = static_cast<long>(std::floor((family.values().front() - 4 * spec.spacing) * scale));
    const long hi = static_cast<long>(std::ceil((family.values().back() + 4 * spec.spacing) * scale));
    std::vector<long> n_sample;
    for (long n = lo; n <= hi; ++n) n_sample.push_back(n);
    const DdThresholdReport th =
        dd_threshold_check(FunctionSystem::divided_difference(basis, dirs), I, n_sample, opts);
    cmin = std::min(cmin, th.empirical_C);
    cmax = std::max(cmax, th.empirical_C);
    const double raw = pt.raw_condition ? *pt.raw_condition : kNaN;
    rows.rows.push_back({pt.delta, raw, pt.dd_condition, pt.dd_normalized_condition, raw / pt.dd_condition,
                         raw / pt.dd_normalized_condition, th.empirical_C, th.bound_C});
  }
  res.sections.push_back(std::move(rows));
  res.summary["C_spread"] = cmin > 0 ? cmax / cmin : std::numeric_limits<double>::infinity();
  return res;
}

RunResult run_sharpness(const ExperimentConfig& c, const AnalysisOptions& opts) {
  const ExponentFamily family = build_family(c);
  const int d = c.directions.d;
  const Partition part = build_sharpness_partition(family, d, *c.alpha);
  const auto dirs = DirectionAssignment::from_partition(family, part);
  const FunctionSystem vec = FunctionSystem::exponential(family, dirs);
  const IntervalSpec& I = *c.interval;
  const GramMatrix Gv = assemble_gram(vec, I);
  const GramMatrix Gs = assemble_gram(FunctionSystem::exponential(family, DirectionAssignment::constant(family, 1)), I);
  double residual = 0.0;
  for (Eigen::Index i = 0; i < Gv.size(); ++i)
    for (Eigen::Index k = 0; k < Gv.size(); ++k) {
      const bool same = part.class_of[static_cast<std::size_t>(i)] == part.class_of[static_cast<std::size_t>(k)];
      residual = std::max(residual, std::abs(Gv.entries(i, k) - (same ? Gs.entries(i, k) : cplx{})));
    }

  RunResult res;
  Section classes{"classes", {"class", "count", "density", "threshold_length"}, {}};
  for (int j = 1; j <= d; ++j) {
    const long long count = std::count(part.class_of.begin(), part.class_of.end(), j);
    const double dens = part.class_densities[static_cast<std::size_t>(j - 1)];
    classes.rows.push_back({static_cast<long long>(j), count, dens, 2.0 * std::numbers::pi * dens});
  }
  res.sections.push_back(std::move(classes));
  res.summary["target_alpha"] = part.target_alpha;
  res.summary["achieved_alpha"] = part.achieved_alpha;
  res.summary["block"] = part.block;
  res.summary["class1_run"] = part.class1_run;
  res.summary["block_identity_residual"] = residual;
  res.summary["threshold_length"] = 2.0 * std::numbers::pi * part.achieved_alpha;

  if (!c.grids.lengths.empty() && !c.grids.N.empty()) {
    const SweepResult sweep = threshold_sweep(vec, c.grids.lengths, c.grids.N, opts, I.a);
    Section bounds{"frame_bounds", {"length", "N", "lambda_min", "lambda_max", "resolved"}, {}};
    Section verdicts{"verdicts", {"length", "verdict", "interlacing", "resolution"}, {}};
    for (std::size_t i = 0; i < sweep.grid.size(); ++i) append_frame_bounds(bounds, verdicts, sweep.grid[i], sweep.reports[i]);
    res.sections.push_back(std::move(bounds));
    res.sections.push_back(std::move(verdicts));
    res.summary["last_degenerating"] = sweep.last_degenerating ? json(*sweep.last_degenerating) : json(nullptr);
    res.summary["first_stable"] = sweep.first_stable ? json(*sweep.first_stable) : json(nullptr);
  }
  return res;
}

std::string cell_text(const Cell& cell) {
  struct V {
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, cell);
}

json cell_json(const Cell& cell) {
  struct V {
    json operator()(long long v) const { return v; }
    json operator()(double v) const { return finite_or_null(v); }
    json operator()(bool v) const { return v; }
    json operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, cell);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

RunResult run(const ExperimentConfig& config, int threads) {
  AnalysisOptions opts;
  opts.threads = std::max(1, threads);
  opts.quad_order = config.quad_order;
  switch (config.command) {
    case Command::density: return run_density(config, opts);
    case Command::gram: return run_gram(config, opts);
    case Command::bounds_sweep: return run_bounds_sweep(config, opts);
    case Command::trace: return run_trace(config, opts);
    case Command::defect_decay: return run_defect_decay(config, opts);
    case Command::dd_condition: return run_dd_condition(config, opts);
    case Command::sharpness: return run_sharpness(config, opts);
  }
  throw ValidationError("unknown command");
}

std::string render(const ExperimentConfig& config, const RunResult& result, OutputFormat format) {
  const json echo = config_to_json(config);
  if (format == OutputFormat::json) {
    json doc{{"tool", std::string(kToolName) + " " + kToolVersion},
             {"seed", config.effective_seed()},
             {"config", echo},
             {"summary", result.summary}};
    json sections = json::array();
    for (const auto& s : result.sections) {
      json rows = json::array();
      for (const auto& row : s.rows) {
        json r = json::array();
        for (const auto& cell : row) r.push_back(cell_json(cell));
        rows.push_back(std::move(r));
      }
      sections.push_back({{"name", s.name}, {"columns", s.columns}, {"rows", std::move(rows)}});
    }
    doc["sections"] = std::move(sections);
    return doc.dump(2) + "\n";
  }
  std::string out;
  out += "# tool: " + std::string(kToolName) + " " + kToolVersion + "\n";
  out += "# seed: " + std::to_string(config.effective_seed()) + "\n";
  out += "# config: " + echo.dump() + "\n";
  out += "# summary: " + result.summary.dump() + "\n";
  for (const auto& s : result.sections) {
    out += "# section: " + s.name + "\n";
    for (std::size_t i = 0; i < s.columns.size(); ++i) out += (i ? "," : "") + s.columns[i];
    out += "\n";
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
      out += "\n";
    }
  }
  return out;
}

}  // namespace nhlab
