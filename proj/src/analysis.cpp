#include "nhlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nhlab/error.hpp"
#include "nhlab/parallel.hpp"
#include "nhlab/quadrature.hpp"

namespace nhlab {

namespace {

void require_increasing(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw ValidationError(std::string(name) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ValidationError(std::string(name) + " grid not increasing");
}

// ||(Q - Id) e_k|| for every function of V, with Q the projector onto the
// Fourier grid window |gamma_n - y| < radius.
std::vector<double> defects(const FunctionSystem& V, const CMatrix& coeffs, const IntervalSpec& interval) {
  std::vector<double> out(V.size());
  for (std::size_t k = 0; k < V.size(); ++k) {
    const auto& f = V[k];
    const double norm2 = f.scale * f.scale * interval.length();
    const double kept = coeffs.col(static_cast<Eigen::Index>(k)).squaredNorm();
    out[k] = std::sqrt(std::max(0.0, norm2 - kept));
  }
  return out;
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Runs fn, prefixing any numerical failure with the grid point it came from.
template <class Fn>
auto at_grid_point(const char* name, double value, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + " = " + std::to_string(value) + ": " + e.what());
  }
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::degenerating: return "degenerating";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

EigenBounds extreme_eigenvalues(const CMatrix& G) {
  if (G.rows() != G.cols() || G.rows() == 0) throw ValidationError("eigenvalues need a nonempty square matrix");
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if ((G - G.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw ValidationError("matrix is not Hermitian");
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(G);
  if (eig.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed to converge");
  const Eigen::Index n = G.rows();
  EigenBounds b;
  b.lambda_min = eig.eigenvalues()(0);
  b.lambda_max = eig.eigenvalues()(n - 1);
  const double norm = std::max(std::abs(b.lambda_min), std::abs(b.lambda_max));
  for (Eigen::Index idx : {Eigen::Index(0), n - 1}) {
    const CVector v = eig.eigenvectors().col(idx);
    b.residual = std::max(b.residual, (G * v - eig.eigenvalues()(idx) * v).norm());
  }
  if (b.residual > 1e-8 * std::max(norm, std::numeric_limits<double>::min()))
    throw NumericalError("eigenpair residual " + std::to_string(b.residual) + " exceeds 1e-8 ||G||");
  return b;
}

Verdict classify(std::span<const double> lambda_min, double resolution) {
  const std::size_t n = lambda_min.size();
  if (n < 2) return Verdict::indeterminate;
  const double last = lambda_min[n - 1];
  if (last <= resolution || last <= 0.1 * lambda_min[0]) return Verdict::degenerating;
  const std::size_t steps = std::min<std::size_t>(2, n - 1);
  for (std::size_t i = n - steps; i < n; ++i) {
    const double prev = lambda_min[i - 1];
    if (!(prev > 0) || std::abs(lambda_min[i] - prev) > 0.05 * prev) return Verdict::indeterminate;
  }
  return Verdict::stable;
}

FrameBoundReport frame_bound_sequence(const FunctionSystem& system, const IntervalSpec& interval,
                                      std::span<const int> N_grid, const AnalysisOptions& opts) {
  if (N_grid.empty()) throw ValidationError("N grid is empty");
  for (std::size_t i = 0; i < N_grid.size(); ++i) {
    if (N_grid[i] < 0) throw ValidationError("truncation sizes must be nonnegative");
    if (i > 0 && N_grid[i] <= N_grid[i - 1]) throw ValidationError("N grid not increasing");
  }
  const std::size_t center = system.size() / 2;
  const auto n_max = static_cast<std::size_t>(N_grid.back());
  if (center < n_max || center + n_max >= system.size())
    throw ValidationError("system has fewer than 2N+1 functions around its centre for N = " + std::to_string(n_max));

  // Nested truncations are principal submatrices of the largest one.
  QuadratureOptions qopts;
  qopts.order = opts.quad_order;
  qopts.threads = opts.threads;
  const GramMatrix G = assemble_gram(system.slice(center - n_max, 2 * n_max + 1), interval, qopts);

  FrameBoundReport rep;
  rep.N.assign(N_grid.begin(), N_grid.end());
  rep.interval_length = interval.length();
  rep.lambda_min.resize(N_grid.size());
  rep.lambda_max.resize(N_grid.size());
  parallel_for(N_grid.size(), opts.threads, [&](std::size_t i) {
    const auto N = static_cast<Eigen::Index>(N_grid[i]);
    const auto offset = static_cast<Eigen::Index>(n_max) - N;
    const EigenBounds b = extreme_eigenvalues(CMatrix(G.entries.block(offset, offset, 2 * N + 1, 2 * N + 1)));
    rep.lambda_min[i] = b.lambda_min;
    rep.lambda_max[i] = b.lambda_max;
  });
  rep.resolution = kResolutionFloor * rep.lambda_max.back();
  const double slack = 1e-10 * std::max(1.0, rep.lambda_max.back());
  for (std::size_t i = 1; i < rep.N.size(); ++i) {
    if (rep.lambda_min[i] > rep.lambda_min[i - 1] + slack || rep.lambda_max[i] < rep.lambda_max[i - 1] - slack)
      rep.interlacing = false;
  }
  rep.verdict = classify(rep.lambda_min, rep.resolution);
  return rep;
}

SweepResult threshold_sweep(const FunctionSystem& system, std::span<const double> lengths, std::span<const int> N_grid,
                            const AnalysisOptions& opts, double start) {
  require_increasing(lengths, "lengths");
  for (double L : lengths)
    if (!(L > 0)) throw ValidationError("interval lengths must be positive");
  SweepResult out;
  out.parameter = "length";
  out.grid.assign(lengths.begin(), lengths.end());
  out.reports.resize(lengths.size());
  AnalysisOptions inner = opts;
  inner.threads = 1;
  parallel_for(lengths.size(), opts.threads, [&](std::size_t i) {
    out.reports[i] = at_grid_point("length", lengths[i], [&] {
      return frame_bound_sequence(system, IntervalSpec(start, start + lengths[i]), N_grid, inner);
    });
  });
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    if (out.reports[i].verdict == Verdict::stable) {
      out.first_stable = out.grid[i];
      for (std::size_t j = i; j-- > 0;)
        if (out.reports[j].verdict == Verdict::degenerating) {
          out.last_degenerating = out.grid[j];
          break;
        }
      break;
    }
  }
  return out;
}

double TraceExperiment::max_defect() const {
  return defect_norms.empty() ? 0.0 : *std::max_element(defect_norms.begin(), defect_norms.end());
}

TraceExperiment run_trace_experiment(const FunctionSystem& system, const IntervalSpec& interval, double y, double r,
                                     double R) {
  if (system.kind() != SystemKind::exponential) throw ValidationError("trace experiment needs an exponential system");
  if (!(r > 0) || !(R > 0)) throw ValidationError("r and R must be positive");
  const FunctionSystem V = system.within(y, r);
  if (V.size() == 0) throw ValidationError("no exponent satisfies |w_k - y| < r");

  TraceExperiment ex;
  ex.y = y, ex.r = r, ex.R = R, ex.d = system.d();
  ex.card_omega_r = static_cast<long>(V.size());
  for (const auto& f : V.functions()) ex.omega_indices.push_back(f.index);

  const GramMatrix G = assemble_gram(V, interval);
  const BiorthogonalFamily dual = dual_family(G);
  ex.biorthogonality_residual = dual.residual;
  ex.max_dual_norm = *std::max_element(dual.norms.begin(), dual.norms.end());

  const FourierGrid grid = FourierGrid::window(interval, y, r + R, system.d());
  ex.card_gamma = static_cast<long>(grid.card());
  const FunctionSystem W = grid.as_system();
  // C[(n,j)][k] = (e_k, f_{n,j})
  const CMatrix C = W.size() > 0 ? cross_inner(W, V, interval) : CMatrix::Zero(0, G.size());
  ex.defect_norms = defects(V, C, interval);

  const CMatrix& coef = dual.coefficients;
  // B[k][l] = (Q e_l, e_k); S in V_r coordinates is G^{-1} B.
  const CMatrix B = C.adjoint() * C;
  const CMatrix S = coef * B;
  const CMatrix GS = G.entries * S;
  ex.trace_direct = 0.0;
  for (Eigen::Index k = 0; k < G.size(); ++k) ex.trace_direct += coef.col(k).dot(GS.col(k));

  // Fourier coefficients of phi_k, then ((Q - Id) e_k, phi_k) = (Q e_k, phi_k) - (e_k, phi_k).
  const CMatrix D = C * coef;
  const CMatrix CG = coef.adjoint() * G.entries;
  ex.correction = 0.0;
  for (Eigen::Index k = 0; k < G.size(); ++k) {
    const cplx q_part = D.col(k).dot(C.col(k));
    ex.correction += q_part - CG(k, k);
  }
  ex.trace_decomposed = static_cast<double>(ex.card_omega_r) + ex.correction;
  return ex;
}

double defect_majorant(int d, double length, double R, long terms) {
  if (!(R > 0) || !(length > 0)) throw ValidationError("majorant needs R > 0 and |I| > 0");
  const double c = 2.0 * std::numbers::pi / length;
  // Decreasing convex summand: the integral from terms - 1/2 dominates the tail.
  double sum = 1.0 / (c * (c * (static_cast<double>(terms) - 0.5) + R));
  for (long n = terms - 1; n >= 0; --n) {
    const double v = c * static_cast<double>(n) + R;
    sum += 1.0 / (v * v);
  }
  return 8.0 * d / length * sum;
}

bool DefectDecay::below_majorant() const {
  for (std::size_t i = 0; i < R.size(); ++i)
    if (max_defect[i] * max_defect[i] > majorant[i]) return false;
  return true;
}

DefectDecay defect_decay_fit(const FunctionSystem& system, const IntervalSpec& interval, double y, double r,
                             std::span<const double> R_grid, const AnalysisOptions& opts) {
  if (system.kind() != SystemKind::exponential) throw ValidationError("defect decay needs an exponential system");
  require_increasing(R_grid, "R");
  if (R_grid.size() < 4) throw ValidationError("defect decay fit needs at least 4 grid points");
  if (!(R_grid.front() > 0) || R_grid.back() < 10.0 * R_grid.front())
    throw ValidationError("R grid must be positive and span at least one decade");
  const FunctionSystem V = system.within(y, r);
  if (V.size() == 0) throw ValidationError("no exponent satisfies |w_k - y| < r");

  DefectDecay out;
  out.R.assign(R_grid.begin(), R_grid.end());
  out.max_defect.resize(R_grid.size());
  out.majorant.resize(R_grid.size());
  parallel_for(R_grid.size(), opts.threads, [&](std::size_t i) {
    const FunctionSystem W = FourierGrid::window(interval, y, r + R_grid[i], system.d()).as_system();
    const CMatrix C = cross_inner(W, V, interval);
    const auto def = defects(V, C, interval);
    out.max_defect[i] = *std::max_element(def.begin(), def.end());
    out.majorant[i] = defect_majorant(system.d(), interval.length(), R_grid[i]);
  });

  double norm2 = 0.0;
  for (const auto& f : V.functions()) norm2 = std::max(norm2, f.scale * f.scale * interval.length());
  out.zero_defect = std::all_of(out.max_defect.begin(), out.max_defect.end(),
                                [&](double v) { return v * v <= 1e-12 * norm2; });
  if (out.zero_defect) return out;

  const std::size_t m = out.R.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += std::log(out.R[i]);
    sy += std::log(out.max_defect[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(out.R[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(out.max_defect[i]) - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  return out;
}

DdThresholdReport dd_threshold_check(const FunctionSystem& system, const IntervalSpec& interval,
                                     std::span<const long> n_sample, const AnalysisOptions& opts) {
  if (n_sample.empty()) throw ValidationError("empty Fourier index sample");
  // Scalar copies: the direction factor only shrinks the integral.
  std::vector<SystemFunction> scalar;
  scalar.reserve(system.size());
  for (const auto& f : system.functions()) scalar.push_back({f.index, f.nodes, CVector::Ones(1), f.scale});
  const FunctionSystem cols(system.kind(), 1, std::move(scalar));

  const double step = 2.0 * std::numbers::pi / interval.length();
  std::vector<SystemFunction> waves;
  waves.reserve(n_sample.size());
  for (long n : n_sample) waves.push_back({n, {step * static_cast<double>(n)}, CVector::Ones(1), 1.0});
  const FunctionSystem rows(SystemKind::fourier, 1, std::move(waves));

  QuadratureOptions qopts;
  qopts.order = opts.quad_order;
  qopts.threads = opts.threads;
  // M[n][k] = int_I f_k(t) e^{-i gamma_n t} dt
  const CMatrix M = cross_inner(rows, cols, interval, qopts);

  DdThresholdReport rep;
  for (Eigen::Index k = 0; k < M.cols(); ++k) {
    const double wk = cols[static_cast<std::size_t>(k)].nodes.back();
    for (Eigen::Index n = 0; n < M.rows(); ++n) {
      const double gap = std::abs(wk - rows[static_cast<std::size_t>(n)].nodes[0]);
      if (gap <= 1e-9) continue;
      ++rep.pairs;
      const double v = std::abs(M(n, k)) * gap;
      if (!std::isfinite(v)) rep.finite = false;
      if (v > rep.empirical_C) {
        rep.empirical_C = v;
        rep.argmax_k = cols[static_cast<std::size_t>(k)].index;
        rep.argmax_n = rows[static_cast<std::size_t>(n)].index;
      }
    }
  }

  // |A| |w - gamma| <= |g(a)| + |g(b)| + int_I |g'|, with |g(t)| <= |t|^{r-1}/(r-1)!
  // and |g'| from the derivative inequality in |t|.
  const auto& gl = gauss_legendre(32);
  auto integrate_abs_t = [&](auto&& fn) {
    auto piece = [&](double lo, double hi) {
      double s = 0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
        s += 0.5 * (hi - lo) * gl.weights[i] * fn(std::abs(t));
      }
      return s;
    };
    if (interval.a < 0 && interval.b > 0) return piece(interval.a, 0.0) + piece(0.0, interval.b);
    return piece(interval.a, interval.b);
  };
  for (const auto& f : cols.functions()) {
    const auto mu = shift_to_last(f.nodes);
    const int r = static_cast<int>(mu.size());
    const double fact = factorial(r - 1);
    const double ends = (std::pow(std::abs(interval.a), r - 1) + std::pow(std::abs(interval.b), r - 1)) / fact;
    const double deriv = integrate_abs_t([&](double t) { return dd_derivative_bound(mu, t); });
    rep.bound_C = std::max(rep.bound_C, std::abs(f.scale) * (ends + deriv));
  }
  return rep;
}

namespace {

ConditioningPoint conditioning_at(double spacing, double window_lo, double window_hi, const IntervalSpec& interval,
                                  double delta, const QuadratureOptions& qopts) {
  GeneratorSpec spec;
  spec.kind = GeneratorSpec::Kind::clustered_pairs;
  spec.spacing = spacing;
  spec.window_lo = window_lo;
  spec.window_hi = window_hi;
  spec.delta = delta;
  const ExponentFamily family = generate_family(spec);
  const auto dirs = DirectionAssignment::constant(family, 1);

  ConditioningPoint pt;
  pt.delta = delta;
  const EigenBounds raw = extreme_eigenvalues(assemble_gram(FunctionSystem::exponential(family, dirs), interval));
  const double floor = 8.0 * static_cast<double>(family.size()) * std::numeric_limits<double>::epsilon();
  if (raw.lambda_min > floor * raw.lambda_max) pt.raw_condition = raw.lambda_max / raw.lambda_min;

  const DividedDifferenceBasis basis(family, detect_chains(family, 0.5 * spacing, 2));
  const FunctionSystem dd = FunctionSystem::divided_difference(basis, dirs);
  const EigenBounds e1 = extreme_eigenvalues(assemble_gram(dd, interval, qopts));
  pt.dd_condition = e1.lambda_max / e1.lambda_min;
  const EigenBounds e2 = extreme_eigenvalues(assemble_gram(normalized(dd, interval, qopts), interval, qopts));
  pt.dd_normalized_condition = e2.lambda_max / e2.lambda_min;
  return pt;
}

}  // namespace

std::vector<ConditioningPoint> conditioning_comparison(double spacing, double window_lo, double window_hi,
                                                       const IntervalSpec& interval, std::span<const double> deltas,
                                                       const AnalysisOptions& opts) {
  require_increasing(deltas, "delta");
  std::vector<ConditioningPoint> out(deltas.size());
  QuadratureOptions qopts;
  qopts.order = opts.quad_order;
  parallel_for(deltas.size(), opts.threads, [&](std::size_t i) {
    out[i] = at_grid_point("delta", deltas[i],
                           [&] { return conditioning_at(spacing, window_lo, window_hi, interval, deltas[i], qopts); });
  });
  return out;
}

DensityChainReport density_chain_check(const ExponentFamily& family, const DirectionAssignment& directions,
                                       const IntervalSpec& interval, std::span<const double> r_grid, double R,
                                       std::optional<double> y, const AnalysisOptions& opts) {
  require_increasing(r_grid, "r");
  const FunctionSystem system = FunctionSystem::exponential(family, directions);
  const double centre = y.value_or(0.5 * (family.values().front() + family.values().back()));

  DensityChainReport rep;
  rep.R = R;
  rep.d = directions.d();
  rep.dplus_estimate = estimate_density(family, default_radius_grid(family)).dplus_estimate;
  rep.dplus_threshold = 2.0 * std::numbers::pi * rep.dplus_estimate / rep.d;
  rep.rows.resize(r_grid.size());
  parallel_for(r_grid.size(), opts.threads, [&](std::size_t i) {
    const TraceExperiment ex =
        at_grid_point("r", r_grid[i], [&] { return run_trace_experiment(system, interval, centre, r_grid[i], R); });
    DensityChainRow row;
    row.r = r_grid[i];
    row.card_omega_r = ex.card_omega_r;
    row.card_gamma = ex.card_gamma;
    row.ratio = ex.card_gamma > 0 ? static_cast<double>(ex.card_omega_r) / static_cast<double>(ex.card_gamma)
                                  : std::numeric_limits<double>::infinity();
    // |sum_k ((Q - Id) e_k, phi_k)| <= Card(Omega_r) * max defect * max ||phi_k||
    const double loss = ex.max_defect() * ex.max_dual_norm;
    const double d = rep.d;
    row.epsilon = loss < 1.0 ? d * loss / (1.0 - loss) : std::numeric_limits<double>::infinity();
    row.holds = static_cast<double>(row.card_omega_r) <= (d + row.epsilon) * static_cast<double>(row.card_gamma);
    // Card(Gamma_rho) <= rho |I| / pi + 1
    row.implied_length = std::isfinite(row.epsilon)
                             ? std::numbers::pi * (static_cast<double>(row.card_omega_r) / (d + row.epsilon) - 1.0) /
                                   (row.r + R)
                             : 0.0;
    rep.rows[i] = row;
  });
  return rep;
}

}  // namespace nhlab
