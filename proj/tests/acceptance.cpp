// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Optional argument: path to the nhlab executable for the byte-identity check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "nhlab/analysis.hpp"
#include "nhlab/config.hpp"
#include "nhlab/runner.hpp"
#include "oracles.hpp"

using namespace nhlab;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExponentFamily lattice(double lo, double hi, double spacing = 1.0, double offset = 0.0) {
  GeneratorSpec s;
  s.spacing = spacing;
  s.offset = offset;
  s.window_lo = lo;
  s.window_hi = hi;
  return generate_family(s);
}

ExponentFamily clustered(double spacing, double lo, double hi, double delta) {
  GeneratorSpec s;
  s.kind = GeneratorSpec::Kind::clustered_pairs;
  s.spacing = spacing;
  s.window_lo = lo;
  s.window_hi = hi;
  s.delta = delta;
  return generate_family(s);
}

FunctionSystem scalar_system(const ExponentFamily& f) {
  return FunctionSystem::exponential(f, DirectionAssignment::constant(f, 1));
}

const std::vector<int> kN{16, 32, 64, 128};

Outcome parseval() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = lattice(-64, 64);
  const IntervalSpec I(0, 2 * pi);
  const auto G = assemble_gram(scalar_system(f), I);
  const double err = (G.entries - 2 * pi * CMatrix::Identity(G.size(), G.size())).cwiseAbs().maxCoeff();
  const int N[] = {4, 16, 32, 64};
  const auto rep = frame_bound_sequence(scalar_system(f), I, N);
  double bound_err = 0;
  for (std::size_t i = 0; i < rep.N.size(); ++i)
    bound_err = std::max({bound_err, std::abs(rep.lambda_min[i] - 2 * pi), std::abs(rep.lambda_max[i] - 2 * pi)});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {err <= 1e-10 && bound_err <= 1e-10 && secs < 1.0,
          "max|G - 2pi I| = " + fmt("%.2e", err) + ", bound error " + fmt("%.2e", bound_err) + ", " +
              fmt("%.3f", secs) + " s"};
}

Outcome above_threshold() {
  const auto rep = frame_bound_sequence(scalar_system(lattice(-128, 128)), {0, 2.2 * pi}, kN);
  bool positive = true;
  for (double l : rep.lambda_min) positive = positive && l > rep.resolution;
  const std::size_t n = rep.lambda_min.size();
  const double change = std::abs(rep.lambda_min[n - 1] - rep.lambda_min[n - 2]) / rep.lambda_min[n - 2];
  return {positive && change <= 0.05 && rep.verdict == Verdict::stable,
          "lambda_min(128) = " + fmt("%.6e", rep.lambda_min.back()) + ", last change " + fmt("%.1e", change) +
              ", verdict " + to_string(rep.verdict)};
}

Outcome below_threshold() {
  const auto rep = frame_bound_sequence(scalar_system(lattice(-128, 128)), {0, 1.8 * pi}, kN);
  // Below the eigensolver's resolution a double-precision lambda_min is roundoff;
  // resolved values are compared against the 70-digit reference, unresolved ones
  // must sit under the floor in that reference too.
  bool decreasing = true, matches = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.N.size(); ++i) {
    const double ref = oracle::kIntegers18pi[i].lambda_min;
    decreasing = decreasing && ref < prev;
    prev = ref;
    if (rep.resolved(i)) matches = matches && std::abs(rep.lambda_min[i] - ref) <= 1e-6 * ref;
    else matches = matches && ref <= rep.resolution;
  }
  for (std::size_t i = 1; i < rep.N.size(); ++i)
    if (rep.resolved(i)) decreasing = decreasing && rep.lambda_min[i] < rep.lambda_min[i - 1];
  const double ratio = oracle::kIntegers18pi[3].lambda_min / oracle::kIntegers18pi[0].lambda_min;
  const bool last_small = !rep.resolved(3) || rep.lambda_min[3] <= 0.1 * rep.lambda_min[0];
  return {decreasing && matches && last_small && ratio <= 0.1 && rep.verdict == Verdict::degenerating,
          "lambda_min(16) = " + fmt("%.6e", rep.lambda_min[0]) + ", reference lambda_min(128)/lambda_min(16) = " +
              fmt("%.2e", ratio) + ", verdict " + to_string(rep.verdict)};
}

Outcome sharpness() {
  const auto f = lattice(-128, 128);
  const auto p = build_sharpness_partition(f, 2, 0.5);
  const auto vec = FunctionSystem::exponential(f, DirectionAssignment::from_partition(f, p));
  const IntervalSpec I(0, 2 * pi);
  const auto Gv = assemble_gram(vec, I);
  const auto Gs = assemble_gram(scalar_system(f), I);
  double residual = 0;
  for (Eigen::Index i = 0; i < Gv.size(); ++i)
    for (Eigen::Index k = 0; k < Gv.size(); ++k) {
      const bool same = p.class_of[static_cast<std::size_t>(i)] == p.class_of[static_cast<std::size_t>(k)];
      residual = std::max(residual, std::abs(Gv.entries(i, k) - (same ? Gs.entries(i, k) : cplx{})));
    }
  const std::vector<double> L{0.8 * pi, 1.2 * pi};
  const auto sw = threshold_sweep(vec, L, kN);
  return {residual <= 1e-12 && sw.reports[0].verdict == Verdict::degenerating &&
              sw.reports[1].verdict == Verdict::stable,
          "block residual " + fmt("%.1e", residual) + ", 0.8pi " + to_string(sw.reports[0].verdict) + ", 1.2pi " +
              to_string(sw.reports[1].verdict)};
}

Outcome fourier_bound() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long violations = 0;
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = -10 + 20 * u(rng);
    const double L = 0.1 + 20 * u(rng);
    const IntervalSpec I(a, a + L);
    const int d = 1 + static_cast<int>(u(rng) * 4);
    const long n = static_cast<long>(std::floor(-50 + 101 * u(rng)));
    const FourierGrid grid(I, {n}, d);
    double w = grid.gamma(n) + (u(rng) < 0.5 ? -1 : 1) * std::pow(10.0, -3 + 4 * u(rng));
    const ExponentFamily f({w});
    const auto dirs = DirectionAssignment::random(f, d, rng());
    const CMatrix M = cross_inner(grid.as_system(), FunctionSystem::exponential(f, dirs), I);
    const double bound = 2 / std::sqrt(L) / std::abs(w - grid.gamma(n));
    for (Eigen::Index j = 0; j < M.rows(); ++j) {
      worst = std::max(worst, std::abs(M(j, 0)) / bound);
      if (std::abs(M(j, 0)) > bound) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations, worst |(e,f)|/bound = " + fmt("%.4f", worst)};
}

Outcome trace_checks() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long bad2 = 0, bad3 = 0;
  double worst_gap = 0;
  for (int trial = 0; trial < 100; ++trial) {
    GeneratorSpec s;
    s.kind = trial % 2 ? GeneratorSpec::Kind::perturbed_lattice : GeneratorSpec::Kind::lattice;
    s.spacing = 0.5 + u(rng);
    s.window_lo = -40;
    s.window_hi = 40;
    s.max_perturbation = 0.3 * s.spacing;
    s.seed = rng();
    const auto f = generate_family(s);
    const int d = 1 + trial % 3;
    const auto dirs = DirectionAssignment::random(f, d, rng());
    const double y = -5 + 10 * u(rng);
    const double r = 2 + 6 * u(rng);
    const double R = 2 + 20 * u(rng);
    // keep |I| above 2 pi D+ so the window is a Riesz sequence and its dual exists
    const IntervalSpec I(0, (1.1 + 0.6 * u(rng)) * 2 * pi / s.spacing);
    const auto ex = run_trace_experiment(FunctionSystem::exponential(f, dirs), I, y, r, R);
    if (!ex.trace_bound_holds(1e-6)) ++bad2;
    if (!ex.decomposition_consistent(1e-6)) ++bad3;
    worst_gap = std::max(worst_gap, std::abs(ex.trace_direct - ex.trace_decomposed) /
                                        std::max(1.0, static_cast<double>(ex.card_omega_r)));
  }
  return {bad2 == 0 && bad3 == 0, std::to_string(bad2) + " bound violations, " + std::to_string(bad3) +
                                      " disagreements, worst relative gap " + fmt("%.1e", worst_gap)};
}

Outcome defect_decay() {
  const std::vector<double> Rg{8, 16, 32, 64, 128};
  const auto fit = defect_decay_fit(scalar_system(lattice(-48, 48, 1.0, 0.5)), {0, 2 * pi}, 0.0, 2.0, Rg);
  bool below = true;
  double closest = 0;
  for (std::size_t i = 0; i < Rg.size(); ++i) {
    const double sq = fit.max_defect[i] * fit.max_defect[i];
    const double maj = oracle::defect_majorant(1, 2 * pi, Rg[i]);
    below = below && sq <= maj && sq <= fit.majorant[i];
    closest = std::max(closest, sq / maj);
  }
  return {below && fit.slope >= -1.0 && fit.slope <= -0.45,
          "slope " + fmt("%.4f", fit.slope) + ", max defect^2/majorant " + fmt("%.4f", closest)};
}

Outcome divided_differences() {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double rec = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + trial % 5;
    std::vector<double> nodes(r);
    nodes[0] = -10 + 20 * u(rng);
    for (int i = 1; i < r; ++i) nodes[i] = nodes[i - 1] + 0.1 + 2 * u(rng);
    const double t = -10 + 20 * u(rng);
    const int order = std::max(16, 8 + static_cast<int>(std::ceil(std::abs(t) * (nodes.back() - nodes[0]))));
    rec = std::max(rec, std::abs(eval_divided_difference(nodes, t) - eval_dd_hermite_genocchi(nodes, t, order)));
  }
  double cont = 0;
  for (double t = -10; t <= 10; t += 0.1) {
    const double a[] = {0.0, 1e-8}, b[] = {0.0, 0.0};
    cont = std::max(cont, std::abs(eval_divided_difference(a, t) - eval_divided_difference(b, t)));
  }
  long bad = 0, checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int M = 2 + trial % 4;
    std::vector<double> v;
    double w = 0;
    while (v.size() < 40) {
      const int len = 1 + static_cast<int>(u(rng) * M);
      for (int i = 0; i < len; ++i) {
        v.push_back(w);
        w += 1e-4 + 0.2 * u(rng);
      }
      w += M + u(rng);
    }
    const ExponentFamily f(v);
    const DividedDifferenceBasis basis(f, detect_chains(f, 1.0, M));
    for (long k = f.first_index(); k <= f.last_index(); ++k) {
      const auto mu = shift_to_last(basis.function(k).nodes);
      for (double t = 0.1; t <= 10.0; t += 0.1) {
        const double h = default_fd_step(t);
        ++checked;
        if (std::abs(dd_derivative(mu, t, h)) > dd_derivative_bound(mu, t) + 10 * h) ++bad;
      }
    }
  }
  return {rec <= 1e-8 && cont <= 1e-6 && bad == 0,
          "recurrence vs simplex " + fmt("%.1e", rec) + ", continuity " + fmt("%.1e", cont) + ", derivative " +
              std::to_string(bad) + "/" + std::to_string(checked) + " violations"};
}

Outcome conditioning() {
  const double deltas[] = {1e-3};
  const auto pt = conditioning_comparison(4.0, -64, 64, {0, 2 * pi}, deltas)[0];
  if (!pt.raw_condition) return {false, "raw Gram numerically singular"};
  const double ratio = *pt.raw_condition / pt.dd_condition;
  return {ratio >= 1e5, "raw cond " + fmt("%.4e", *pt.raw_condition) + ", DD cond " + fmt("%.4e", pt.dd_condition) +
                            ", ratio " + fmt("%.4e", ratio) + " (normalized DD ratio " +
                            fmt("%.4e", *pt.raw_condition / pt.dd_normalized_condition) + ")"};
}

Outcome dd_finiteness() {
  const IntervalSpec I(0, 2 * pi);
  double lo = 1e300, hi = 0;
  bool finite = true;
  std::string values;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const auto f = clustered(4.0, -64, 64, delta);
    const auto sys = FunctionSystem::divided_difference(DividedDifferenceBasis(f, detect_chains(f, 2.0, 2)),
                                                        DirectionAssignment::constant(f, 1));
    std::vector<long> n;
    for (long k = -72; k <= 72; ++k) n.push_back(k);
    const auto r = dd_threshold_check(sys, I, n);
    finite = finite && r.finite && std::isfinite(r.empirical_C);
    lo = std::min(lo, r.empirical_C);
    hi = std::max(hi, r.empirical_C);
    values += (values.empty() ? "" : ", ") + fmt("%.4f", r.empirical_C);
  }
  return {finite && hi / lo < 3.0, "C = " + values + ", spread " + fmt("%.4f", hi / lo)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome closed_form_and_determinism(const std::string& cli) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const double a = -100 + 200 * u(rng);
    const double L = 0.01 + 50 * u(rng);
    const double theta = (2 * u(rng) - 1) * 1e3 / L;
    const IntervalSpec I(a, a + L);
    const auto ref = oracle::exp_integral(theta, I.a, I.b);
    worst = std::max(worst, std::abs(exp_inner_closed_form(theta, I) - ref) / std::abs(ref));
  }

  const auto cfg = parse_config(R"({"command": "dd-condition",
    "family": {"kind": "clustered-pairs", "params": {"spacing": 4, "window": [-16, 16], "delta": 0.001}},
    "interval": [0, "2pi"], "grids": {"delta": [0.0001, 0.001, 0.01]}})");
  bool same = render(cfg, run(cfg, 1), OutputFormat::csv) == render(cfg, run(cfg, 3), OutputFormat::csv);
  std::string how = same ? "in-process runs identical" : "in-process runs DIFFER";
  if (!cli.empty()) {
    const auto dir = std::filesystem::temp_directory_path() / ("nhlab_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    {
      std::ofstream(dir / "cfg.json") << config_to_json(cfg).dump();
    }
    const std::string base = "\"" + cli + "\" --config \"" + (dir / "cfg.json").string() + "\"";
    const int r1 = std::system((base + " --threads 1 --out \"" + (dir / "a.csv").string() + "\"").c_str());
    const int r2 = std::system((base + " --threads 4 --out \"" + (dir / "b.csv").string() + "\"").c_str());
    const std::string a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv");
    std::filesystem::remove_all(dir);
    if (r1 != 0 || r2 != 0) {
      same = false;
      how += ", CLI exit status " + std::to_string(r1) + "/" + std::to_string(r2);
    } else {
      const bool cli_same = !a.empty() && a == b;
      same = same && cli_same;
      how += cli_same ? ", CLI runs identical" : ", CLI runs DIFFER";
    }
  }
  return {worst <= 1e-12 && same, "worst relative error " + fmt("%.1e", worst) + ", " + how};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const Criterion criteria[] = {
      {1, "Parseval baseline", parseval},
      {2, "frame bounds stable above the threshold (2.2pi)", above_threshold},
      {3, "frame bounds degenerate below the threshold (1.8pi)", below_threshold},
      {4, "vector sharpness: block identity and halved threshold", sharpness},
      {5, "Fourier coefficient decay bound", fourier_bound},
      {6, "trace bound and trace decomposition", trace_checks},
      {7, "projection defect decay and majorant", defect_decay},
      {8, "divided differences: recurrence, continuity, derivative bound", divided_differences},
      {9, "clustered pairs: raw condition >= 1e5 x divided-difference condition", conditioning},
      {10, "divided-difference Fourier constant stays bounded", dd_finiteness},
      {11, "closed form vs quadrature; byte-identical runs", [&] { return closed_form_and_determinism(cli); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %2d: %s | %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
