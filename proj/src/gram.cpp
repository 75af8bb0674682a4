#include "nhlab/gram.hpp"

#include <algorithm>
#include <cmath>

#include "nhlab/error.hpp"
#include "nhlab/parallel.hpp"
#include "nhlab/quadrature.hpp"
#include "nhlab/simd/kernels.hpp"

namespace nhlab {

namespace {

// Error-free product: a*b = hi + lo exactly.
struct DoubleDouble {
  double hi, lo;
};

DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// Split-complex samples of every function of a system on one panel rule.
struct Samples {
  std::size_t q = 0;
  std::vector<double> re, im;
  const double* r(std::size_t i) const { return re.data() + i * q; }
  const double* m(std::size_t i) const { return im.data() + i * q; }
};

Samples sample(const FunctionSystem& sys, const PanelRule& rule, int threads) {
  Samples s;
  s.q = rule.size();
  s.re.resize(sys.size() * s.q);
  s.im.resize(sys.size() * s.q);
  parallel_for(sys.size(), threads, [&](std::size_t i) {
    double* re = s.re.data() + i * s.q;
    double* im = s.im.data() + i * s.q;
    for (std::size_t p = 0; p < s.q; ++p) {
      const cplx v = sys.scalar_value(i, rule.t[p]);
      re[p] = v.real();
      im[p] = v.imag();
    }
  });
  return s;
}

bool has_divided_differences(const FunctionSystem& sys) {
  return std::any_of(sys.functions().begin(), sys.functions().end(),
                     [](const SystemFunction& f) { return !f.is_exponential(); });
}

PanelRule rule_for(const IntervalSpec& interval, double lo, double hi, const QuadratureOptions& opts) {
  const int panels = panels_for_phase(interval.length(), hi - lo, opts.max_phase);
  return composite_gauss_legendre(interval.a, interval.b, panels, opts.order);
}

// (g, f) with both exponentials.
cplx closed_pair(const SystemFunction& f, const SystemFunction& g, const IntervalSpec& interval) {
  const cplx dir = f.direction.dot(g.direction);
  if (dir == cplx(0.0)) return 0.0;
  return f.scale * g.scale * dir * exp_inner_closed_form(g.nodes[0] - f.nodes[0], interval);
}

}  // namespace

IntervalSpec::IntervalSpec(double a_, double b_) : a(a_), b(b_) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) throw ValidationError("interval must satisfy b > a");
}

cplx exp_inner_closed_form(double theta, const IntervalSpec& interval) {
  const double length = interval.length();
  if (theta == 0.0) return length;
  // Phases theta*b and theta*a carried in double-double so the half-width phase
  // theta*(b-a)/2 keeps full relative accuracy when it is large.
  const DoubleDouble pb = two_prod(theta, interval.b);
  const DoubleDouble pa = two_prod(theta, interval.a);
  const DoubleDouble diff = two_sum(pb.hi, -pa.hi);
  const DoubleDouble sum = two_sum(pb.hi, pa.hi);
  const double half_hi = 0.5 * diff.hi, half_lo = 0.5 * (diff.lo + (pb.lo - pa.lo));
  const double mid_hi = 0.5 * sum.hi, mid_lo = 0.5 * (sum.lo + (pb.lo + pa.lo));

  const double half = half_hi + half_lo;
  double amplitude;
  if (std::abs(half) < 1e-4) {
    // 2 sin(h)/theta = |I| sinc(h)
    const double h2 = half * half;
    amplitude = length * (1.0 - h2 / 6.0 * (1.0 - h2 / 20.0));
  } else {
    const double sine = std::sin(half_hi) + half_lo * std::cos(half_hi);
    amplitude = 2.0 * sine / theta;
  }
  const double c = std::cos(mid_hi), s = std::sin(mid_hi);
  return amplitude * cplx(c - mid_lo * s, s + mid_lo * c);
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::exponential: return "exponential";
    case SystemKind::divided_difference: return "divided-difference";
    case SystemKind::fourier: return "fourier";
  }
  return "unknown";
}

FunctionSystem::FunctionSystem(SystemKind kind, int d, std::vector<SystemFunction> functions)
    : kind_(kind), d_(d), functions_(std::move(functions)) {
  for (const auto& f : functions_) {
    if (f.nodes.empty()) throw ValidationError("system function without nodes");
    if (f.direction.size() != d_) throw ValidationError("system function direction has the wrong dimension");
  }
}

FunctionSystem FunctionSystem::exponential(const ExponentFamily& family, const DirectionAssignment& directions) {
  if (!directions.matches(family)) throw ValidationError("directions do not match the family window");
  std::vector<SystemFunction> fs;
  fs.reserve(family.size());
  for (long k = family.first_index(); k <= family.last_index(); ++k)
    fs.push_back({k, {family.at(k)}, directions.at(k), 1.0});
  return FunctionSystem(SystemKind::exponential, directions.d(), std::move(fs));
}

FunctionSystem FunctionSystem::divided_difference(const DividedDifferenceBasis& basis,
                                                  const DirectionAssignment& directions) {
  if (!directions.matches(basis.family())) throw ValidationError("directions do not match the family window");
  std::vector<SystemFunction> fs;
  fs.reserve(basis.size());
  for (long k = basis.family().first_index(); k <= basis.family().last_index(); ++k)
    fs.push_back({k, basis.function(k).nodes, directions.at(k), 1.0});
  return FunctionSystem(SystemKind::divided_difference, directions.d(), std::move(fs));
}

FunctionSystem FunctionSystem::slice(std::size_t pos, std::size_t count) const {
  if (pos + count > functions_.size()) throw ValidationError("slice outside the system");
  return FunctionSystem(kind_, d_, {functions_.begin() + pos, functions_.begin() + pos + count});
}

FunctionSystem FunctionSystem::within(double y, double r) const {
  std::vector<SystemFunction> fs;
  for (const auto& f : functions_)
    if (std::abs(f.nodes.back() - y) < r) fs.push_back(f);
  return FunctionSystem(kind_, d_, std::move(fs));
}

std::pair<double, double> FunctionSystem::node_range() const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& f : functions_) {
    lo = std::min(lo, f.nodes.front());
    hi = std::max(hi, f.nodes.back());
  }
  return {lo, hi};
}

cplx FunctionSystem::scalar_value(std::size_t i, double t) const {
  const auto& f = functions_[i];
  if (f.is_exponential()) return f.scale * cplx(std::cos(f.nodes[0] * t), std::sin(f.nodes[0] * t));
  return f.scale * eval_divided_difference(f.nodes, t);
}

FourierGrid::FourierGrid(IntervalSpec interval, std::vector<long> n, int d)
    : interval_(interval), n_(std::move(n)), d_(d) {
  if (d_ < 1) throw ValidationError("dimension d must be positive");
}

FourierGrid FourierGrid::window(const IntervalSpec& interval, double y, double radius, int d) {
  const double step = 2.0 * std::numbers::pi / interval.length();
  const long lo = static_cast<long>(std::floor((y - radius) / step)) - 1;
  const long hi = static_cast<long>(std::ceil((y + radius) / step)) + 1;
  FourierGrid g(interval, {}, d);
  for (long n = lo; n <= hi; ++n)
    if (std::abs(g.gamma(n) - y) < radius) g.n_.push_back(n);
  return g;
}

FourierGrid FourierGrid::range(const IntervalSpec& interval, long n_lo, long n_hi, int d) {
  std::vector<long> n;
  for (long k = n_lo; k <= n_hi; ++k) n.push_back(k);
  return FourierGrid(interval, std::move(n), d);
}

FunctionSystem FourierGrid::as_system() const {
  const double scale = 1.0 / std::sqrt(interval_.length());
  std::vector<SystemFunction> fs;
  fs.reserve(n_.size() * d_);
  for (long n : n_) {
    for (int j = 0; j < d_; ++j) {
      CVector e = CVector::Zero(d_);
      e(j) = 1.0;
      fs.push_back({n, {gamma(n)}, std::move(e), scale});
    }
  }
  return FunctionSystem(SystemKind::fourier, d_, std::move(fs));
}

cplx vector_inner(long k, long n, const ExponentFamily& family, const DirectionAssignment& directions,
                  const IntervalSpec& interval) {
  if (!family.contains_index(k) || !family.contains_index(n)) throw ValidationError("invalid function index");
  if (!directions.matches(family)) throw ValidationError("directions do not match the family window");
  // <U_k, U_n> = sum_i U_k,i conj(U_n,i)
  const cplx dir = directions.at(n).dot(directions.at(k));
  return dir * exp_inner_closed_form(family.at(k) - family.at(n), interval);
}

cplx dd_inner_quadrature(long k, long n, const DividedDifferenceBasis& basis, const DirectionAssignment& directions,
                         const IntervalSpec& interval, int quad_order) {
  if (quad_order < 2) throw ValidationError("quadrature order must be at least 2");
  if (!directions.matches(basis.family())) throw ValidationError("directions do not match the family window");
  const auto& fk = basis.function(k);
  const auto& fn = basis.function(n);
  const cplx dir = directions.at(n).dot(directions.at(k));
  if (dir == cplx(0.0)) return 0.0;
  const double lo = std::min(fk.nodes.front(), fn.nodes.front());
  const double hi = std::max(fk.nodes.back(), fn.nodes.back());
  QuadratureOptions opts;
  opts.order = quad_order;
  const PanelRule rule = rule_for(interval, lo, hi, opts);
  std::vector<double> ar(rule.size()), ai(rule.size()), br(rule.size()), bi(rule.size());
  for (std::size_t p = 0; p < rule.size(); ++p) {
    const cplx a = eval_divided_difference(fk.nodes, rule.t[p]);
    const cplx b = eval_divided_difference(fn.nodes, rule.t[p]);
    ar[p] = a.real(), ai[p] = a.imag(), br[p] = b.real(), bi[p] = b.imag();
  }
  return dir * simd::weighted_cdot(rule.w.data(), ar.data(), ai.data(), br.data(), bi.data(), rule.size());
}

CMatrix cross_inner(const FunctionSystem& rows, const FunctionSystem& cols, const IntervalSpec& interval,
                    const QuadratureOptions& opts) {
  if (rows.d() != cols.d()) throw ValidationError("systems live in different direction spaces");
  const auto nr = static_cast<Eigen::Index>(rows.size()), nc = static_cast<Eigen::Index>(cols.size());
  CMatrix M(nr, nc);
  const bool quad = has_divided_differences(rows) || has_divided_differences(cols);
  Samples sr, sc;
  PanelRule rule;
  if (quad) {
    const auto [rlo, rhi] = rows.node_range();
    const auto [clo, chi] = cols.node_range();
    rule = rule_for(interval, std::min(rlo, clo), std::max(rhi, chi), opts);
    sr = sample(rows, rule, opts.threads);
    sc = sample(cols, rule, opts.threads);
  }
  parallel_for(static_cast<std::size_t>(nr), opts.threads, [&](std::size_t i) {
    const auto& fi = rows[i];
    for (Eigen::Index j = 0; j < nc; ++j) {
      const auto& fj = cols[static_cast<std::size_t>(j)];
      if (fi.is_exponential() && fj.is_exponential()) {
        M(static_cast<Eigen::Index>(i), j) = closed_pair(fi, fj, interval);
        continue;
      }
      const cplx dir = fi.direction.dot(fj.direction);
      M(static_cast<Eigen::Index>(i), j) =
          dir == cplx(0.0) ? cplx(0.0)
                           : dir * simd::weighted_cdot(rule.w.data(), sc.r(j), sc.m(j), sr.r(i), sr.m(i), rule.size());
    }
  });
  return M;
}

GramMatrix assemble_gram(const FunctionSystem& system, const IntervalSpec& interval, const QuadratureOptions& opts) {
  if (system.size() == 0) throw ValidationError("cannot assemble the Gram matrix of an empty system");
  const auto n = static_cast<Eigen::Index>(system.size());
  GramMatrix G;
  G.kind = system.kind();
  G.d = system.d();
  G.interval = interval;
  G.entries.resize(n, n);

  Samples s;
  PanelRule rule;
  if (has_divided_differences(system)) {
    const auto [lo, hi] = system.node_range();
    rule = rule_for(interval, lo, hi, opts);
    s = sample(system, rule, opts.threads);
  }
  // Upper triangle, then mirrored, so G is exactly Hermitian.
  parallel_for(static_cast<std::size_t>(n), opts.threads, [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const auto& fi = system[ui];
    for (Eigen::Index j = i; j < n; ++j) {
      const auto& fj = system[static_cast<std::size_t>(j)];
      cplx v;
      if (fi.is_exponential() && fj.is_exponential()) {
        v = closed_pair(fi, fj, interval);
      } else {
        const cplx dir = fi.direction.dot(fj.direction);
        v = dir == cplx(0.0) ? cplx(0.0)
                             : dir * simd::weighted_cdot(rule.w.data(), s.r(j), s.m(j), s.r(i), s.m(i), rule.size());
      }
      G.entries(i, j) = v;
    }
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    G.entries(i, i) = G.entries(i, i).real();
    for (Eigen::Index j = i + 1; j < n; ++j) G.entries(j, i) = std::conj(G.entries(i, j));
  }
  return G;
}

FunctionSystem normalized(const FunctionSystem& system, const IntervalSpec& interval, const QuadratureOptions& opts) {
  std::vector<SystemFunction> fs = system.functions();
  const bool quad = has_divided_differences(system);
  Samples s;
  PanelRule rule;
  if (quad) {
    const auto [lo, hi] = system.node_range();
    rule = rule_for(interval, lo, hi, opts);
    s = sample(system, rule, opts.threads);
  }
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double norm2 = fs[i].is_exponential()
                             ? fs[i].scale * fs[i].scale * interval.length()
                             : simd::weighted_norm2(rule.w.data(), s.r(i), s.m(i), rule.size());
    if (!(norm2 > 0)) throw NumericalError("system function with zero norm cannot be normalized");
    fs[i].scale /= std::sqrt(norm2);
  }
  return FunctionSystem(system.kind(), system.d(), std::move(fs));
}

double energy_quadratic_form(const GramMatrix& G, const CoefficientVector& coeffs) {
  if (static_cast<Eigen::Index>(coeffs.size()) != G.size())
    throw ValidationError("coefficient vector and Gram matrix dimensions differ");
  const CVector x = coeffs.as_vector();
  const cplx e = x.dot(G.entries * x);
  return std::max(0.0, e.real());
}

BiorthogonalFamily dual_family(const GramMatrix& G) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(G.entries, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(G.size() - 1);
  if (!(lmin > kNearSingular * lmax)) throw NearSingularError(lmin, lmax);

  BiorthogonalFamily dual;
  dual.min_eigenvalue = lmin;
  const Eigen::LDLT<CMatrix> ldlt(G.entries);
  dual.coefficients = ldlt.solve(CMatrix::Identity(G.size(), G.size()));
  dual.norms.resize(static_cast<std::size_t>(G.size()));
  for (Eigen::Index k = 0; k < G.size(); ++k) dual.norms[k] = std::sqrt(std::max(0.0, dual.coefficients(k, k).real()));
  // (f_j, phi_k) = (C* G)[k][j]
  const CMatrix R = dual.coefficients.adjoint() * G.entries - CMatrix::Identity(G.size(), G.size());
  dual.residual = R.cwiseAbs().maxCoeff();
  return dual;
}

CMatrix project_coefficients(const FunctionSystem& target, const FunctionSystem& sources, const IntervalSpec& interval,
                             bool target_orthonormal, const QuadratureOptions& opts) {
  const CMatrix B = cross_inner(target, sources, interval, opts);
  if (target_orthonormal) return B;
  const GramMatrix G = assemble_gram(target, interval, opts);
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(G.entries, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues()(0), lmax = eig.eigenvalues()(G.size() - 1);
  if (!(lmin > kNearSingular * lmax)) throw NearSingularError(lmin, lmax);
  return G.entries.ldlt().solve(B);
}

}  // namespace nhlab
