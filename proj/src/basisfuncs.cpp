#include "nhlab/basisfuncs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nhlab/error.hpp"
#include "nhlab/quadrature.hpp"

namespace nhlab {

namespace {

constexpr cplx I{0.0, 1.0};

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// (it)^{r-1} e^{i w t} / (r-1)!: all r nodes equal to w.
cplx confluent(double w, int r, double t) {
  cplx p = 1.0;
  for (int i = 1; i < r; ++i) p *= I * t / static_cast<double>(i);
  return p * expi(w * t);
}

}  // namespace

DirectionAssignment::DirectionAssignment(long first_index, CMatrix directions)
    : first_index_(first_index), dirs_(std::move(directions)) {
  if (dirs_.rows() < 1 || dirs_.cols() < 1) throw ValidationError("direction assignment must be nonempty");
  for (Eigen::Index c = 0; c < dirs_.cols(); ++c)
    if (std::abs(dirs_.col(c).norm() - 1.0) > 1e-12)
      throw ValidationError("direction for index " + std::to_string(first_index_ + c) + " is not a unit vector");
}

DirectionAssignment DirectionAssignment::constant(const ExponentFamily& family, int d, int axis) {
  if (d < 1 || axis < 0 || axis >= d) throw ValidationError("invalid direction axis");
  CMatrix m = CMatrix::Zero(d, static_cast<Eigen::Index>(family.size()));
  m.row(axis).setOnes();
  return DirectionAssignment(family.first_index(), std::move(m));
}

DirectionAssignment DirectionAssignment::from_partition(const ExponentFamily& family, const Partition& partition) {
  if (partition.class_of.size() != family.size()) throw ValidationError("partition does not match the family");
  CMatrix m = CMatrix::Zero(partition.d, static_cast<Eigen::Index>(family.size()));
  for (std::size_t pos = 0; pos < family.size(); ++pos)
    m(partition.class_of[pos] - 1, static_cast<Eigen::Index>(pos)) = 1.0;
  return DirectionAssignment(family.first_index(), std::move(m));
}

DirectionAssignment DirectionAssignment::random(const ExponentFamily& family, int d, std::uint64_t seed) {
  if (d < 1) throw ValidationError("dimension d must be positive");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  CMatrix m(d, static_cast<Eigen::Index>(family.size()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    // Box-Muller Gaussians give a rotation-invariant direction.
    for (int r = 0; r < d; ++r) {
      const double u1 = 1.0 - uniform(), u2 = uniform();
      const double rad = std::sqrt(-2.0 * std::log(u1));
      m(r, c) = cplx(rad * std::cos(2 * std::numbers::pi * u2), rad * std::sin(2 * std::numbers::pi * u2));
    }
    m.col(c) /= m.col(c).norm();
  }
  return DirectionAssignment(family.first_index(), std::move(m));
}

CoefficientVector::CoefficientVector(long first_index, std::vector<cplx> values)
    : first_index_(first_index), values_(std::move(values)), square_sum_(0.0) {
  for (const cplx& x : values_) square_sum_ += std::norm(x);
}

CVector eval_exponential(double omega, const CVector& direction, double t) { return direction * expi(omega * t); }

CVector eval_sum(const ExponentFamily& family, const DirectionAssignment& directions,
                 const CoefficientVector& coeffs, double t) {
  if (!directions.matches(family) || coeffs.first_index() != family.first_index() || coeffs.size() != family.size())
    throw ValidationError("family, directions and coefficients must share one index window");
  CVector x = CVector::Zero(directions.d());
  for (long k = family.first_index(); k <= family.last_index(); ++k)
    x += coeffs.at(k) * expi(family.at(k) * t) * directions.at(k);
  return x;
}

cplx eval_dd_hermite_genocchi(std::span<const double> nodes, double t, int quad_order) {
  if (nodes.empty()) throw ValidationError("divided difference needs at least one node");
  if (quad_order < 2) throw ValidationError("quadrature order must be at least 2");
  const int r = static_cast<int>(nodes.size());
  if (r == 1) return expi(nodes[0] * t);

  const int dim = r - 1;
  const auto& rule = gauss_legendre(quad_order);
  std::vector<double> x(quad_order), w(quad_order);
  for (int i = 0; i < quad_order; ++i) {
    x[i] = 0.5 * (rule.nodes[i] + 1.0);
    w[i] = 0.5 * rule.weights[i];
  }
  std::vector<double> steps(dim);
  for (int j = 0; j < dim; ++j) steps[j] = nodes[j + 1] - nodes[j];

  // Odometer over the dim-dimensional tensor grid; s_1 = u_1, s_j = u_j s_{j-1},
  // Jacobian s_1 s_2 ... s_{dim-1}.
  std::vector<int> idx(dim, 0);
  cplx sum = 0.0;
  while (true) {
    double s = 1.0, jac = 1.0, weight = 1.0, phase = nodes[0];
    for (int j = 0; j < dim; ++j) {
      if (j > 0) jac *= s;
      s *= x[idx[j]];
      weight *= w[idx[j]];
      phase += s * steps[j];
    }
    sum += weight * jac * expi(phase * t);
    int j = dim - 1;
    while (j >= 0 && ++idx[j] == quad_order) idx[j--] = 0;
    if (j < 0) break;
  }
  cplx pre = 1.0;
  for (int i = 0; i < dim; ++i) pre *= I * t;
  return pre * sum;
}

cplx eval_divided_difference(std::span<const double> nodes, double t, const DividedDifferenceOptions& opts) {
  if (nodes.empty()) throw ValidationError("divided difference needs at least one node");
  if (!std::is_sorted(nodes.begin(), nodes.end())) throw ValidationError("divided difference nodes must be sorted");
  const int r = static_cast<int>(nodes.size());
  const double threshold = opts.coalescence * std::max(1.0, std::abs(t));

  // Newton table, one diagonal at a time: table[i] holds [w_i, ..., w_{i+order}].
  std::vector<cplx> table(r);
  for (int i = 0; i < r; ++i) table[i] = expi(nodes[i] * t);
  for (int order = 1; order < r; ++order) {
    for (int i = 0; i + order < r; ++i) {
      const double spread = nodes[i + order] - nodes[i];
      if (spread >= threshold) {
        table[i] = (table[i + 1] - table[i]) / spread;
      } else if (spread == 0.0) {
        table[i] = confluent(nodes[i], order + 1, t);
      } else {
        const int q = std::max(opts.quad_order, 8 + static_cast<int>(std::ceil(std::abs(t) * spread)));
        table[i] = eval_dd_hermite_genocchi(nodes.subspan(i, order + 1), t, q);
      }
    }
  }
  return table[0];
}

cplx dd_derivative(std::span<const double> nodes, double t, double h) {
  if (!(h > 0)) throw ValidationError("finite-difference step must be positive");
  return (eval_divided_difference(nodes, t + h) - eval_divided_difference(nodes, t - h)) / (2.0 * h);
}

double dd_derivative_bound(std::span<const double> nodes, double t) {
  if (nodes.empty()) throw ValidationError("divided difference needs at least one node");
  if (t < 0) throw ValidationError("derivative bound is stated for t >= 0");
  const int r = static_cast<int>(nodes.size());
  const double fact = factorial(r - 1);
  double variation = std::abs(nodes[0]);
  for (int i = 1; i < r; ++i) variation += std::abs(nodes[i] - nodes[i - 1]);
  const double first = r >= 2 ? (r - 1) * std::pow(t, r - 2) / fact : 0.0;
  return first + variation * std::pow(t, r - 1) / fact;
}

std::vector<double> shift_to_last(std::span<const double> nodes) {
  std::vector<double> out(nodes.begin(), nodes.end());
  const double last = nodes.back();
  for (double& v : out) v -= last;
  return out;
}

DividedDifferenceBasis::DividedDifferenceBasis(ExponentFamily family, ChainDecomposition chains)
    : family_(std::move(family)), chains_(std::move(chains)) {
  functions_.reserve(family_.size());
  for (long k = family_.first_index(); k <= family_.last_index(); ++k) {
    const Chain& c = chains_.chain_of(k);
    Function f{k, c.start, {}};
    for (long j = c.start; j <= k; ++j) f.nodes.push_back(family_.at(j));
    functions_.push_back(std::move(f));
  }
}

}  // namespace nhlab
