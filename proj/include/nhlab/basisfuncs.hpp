#pragma once
// System functions: vector exponentials U_k e^{i w_k t}, their coefficient
// sums, and divided differences of w -> e^{i w t} over exponent chains.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "nhlab/exponents.hpp"

namespace nhlab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

class DirectionAssignment {
 public:
  /// Columns of `directions` are the unit vectors for indices first_index, first_index+1, ...
  DirectionAssignment(long first_index, CMatrix directions);

  /// Every index gets the coordinate vector E_axis.
  static DirectionAssignment constant(const ExponentFamily& family, int d, int axis = 0);
  /// Index k gets E_{class(k)}.
  static DirectionAssignment from_partition(const ExponentFamily& family, const Partition& partition);
  /// Independent uniformly distributed unit vectors in C^d.
  static DirectionAssignment random(const ExponentFamily& family, int d, std::uint64_t seed);

  int d() const { return static_cast<int>(dirs_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(dirs_.cols()); }
  long first_index() const { return first_index_; }
  bool matches(const ExponentFamily& family) const {
    return family.first_index() == first_index_ && family.size() == size();
  }
  auto at(long k) const { return dirs_.col(k - first_index_); }
  const CMatrix& matrix() const { return dirs_; }

 private:
  long first_index_;
  CMatrix dirs_;
};

/// Coefficients x_k on a family window, with the cached square sum.
class CoefficientVector {
 public:
  CoefficientVector(long first_index, std::vector<cplx> values);

  long first_index() const { return first_index_; }
  std::size_t size() const { return values_.size(); }
  cplx at(long k) const { return values_.at(static_cast<std::size_t>(k - first_index_)); }
  const std::vector<cplx>& values() const { return values_; }
  double square_sum() const { return square_sum_; }
  CVector as_vector() const { return Eigen::Map<const CVector>(values_.data(), static_cast<Eigen::Index>(values_.size())); }

 private:
  long first_index_;
  std::vector<cplx> values_;
  double square_sum_;
};

CVector eval_exponential(double omega, const CVector& direction, double t);

/// x(t) = sum_k x_k U_k e^{i w_k t} over the window.
CVector eval_sum(const ExponentFamily& family, const DirectionAssignment& directions,
                 const CoefficientVector& coeffs, double t);

// --- divided differences ----------------------------------------------------

struct DividedDifferenceOptions {
  int quad_order = 16;
  /// Table entries whose node spread is below coalescence * max(1, |t|) come from
  /// the simplex integral instead of the difference quotient.
  double coalescence = 1e-4;
};

/// [w_1, ..., w_r] of w -> e^{i w t}; nodes nondecreasing.
cplx eval_divided_difference(std::span<const double> nodes, double t, const DividedDifferenceOptions& opts = {});

/// The same quantity as the iterated simplex integral
///   (it)^{r-1} int_{1>=s_1>=...>=s_{r-1}>=0} exp(i [w_1 + s_1 (w_2-w_1) + ... + s_{r-1} (w_r-w_{r-1})] t) ds
/// by tensor Gauss-Legendre on the cube, collapsed onto the simplex. Any node order.
cplx eval_dd_hermite_genocchi(std::span<const double> nodes, double t, int quad_order = 16);

/// Finite-difference step used by the derivative checks.
inline double default_fd_step(double t) { return 1e-5 * std::max(1.0, std::abs(t)); }

/// Central difference in t of eval_divided_difference.
cplx dd_derivative(std::span<const double> nodes, double t, double h);

/// (r-1) t^{r-2}/(r-1)! + (|m_r-m_{r-1}| + ... + |m_2-m_1| + |m_1|) t^{r-1}/(r-1)!  for t >= 0.
double dd_derivative_bound(std::span<const double> nodes, double t);

/// Nodes shifted by the last one: m_i = w_i - w_r.
std::vector<double> shift_to_last(std::span<const double> nodes);

/// f_l = [w_m, ..., w_l] for every index l, with m the start of l's chain.
class DividedDifferenceBasis {
 public:
  struct Function {
    long index;
    long chain_start;
    std::vector<double> nodes;
  };

  DividedDifferenceBasis(ExponentFamily family, ChainDecomposition chains);

  const ExponentFamily& family() const { return family_; }
  const ChainDecomposition& chains() const { return chains_; }
  const Function& function(long k) const { return functions_.at(static_cast<std::size_t>(k - family_.first_index())); }
  std::size_t size() const { return functions_.size(); }

  cplx eval(long k, double t, const DividedDifferenceOptions& opts = {}) const {
    return eval_divided_difference(function(k).nodes, t, opts);
  }

 private:
  ExponentFamily family_;
  ChainDecomposition chains_;
  std::vector<Function> functions_;
};

}  // namespace nhlab
