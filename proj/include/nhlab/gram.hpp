#pragma once
// Inner products in L^2(I, C^d), Gram assembly, the orthonormal Fourier grid,
// dual (biorthogonal) families and orthogonal projections onto finite spans.
//
// Convention: (f, g) = int_I <f(t), g(t)> dt with <u, v> = sum_i u_i conj(v_i),
// and G[k][n] = (f_n, f_k), so that x* G x = int_I |sum_k x_k f_k(t)|^2 dt.

#include <numbers>
#include <string>
#include <vector>

#include "nhlab/basisfuncs.hpp"

namespace nhlab {

struct IntervalSpec {
  double a = 0.0;
  double b = 1.0;

  IntervalSpec() = default;
  IntervalSpec(double a_, double b_);
  static IntervalSpec of_length(double length) { return {0.0, length}; }

  double length() const { return b - a; }
  bool operator==(const IntervalSpec&) const = default;
};

/// int_a^b e^{i theta t} dt, accurate to a few ulps relative even near the zeros
/// of the sine factor.
cplx exp_inner_closed_form(double theta, const IntervalSpec& interval);

/// One system function: scale * U * [nodes](t). A single node is a plain exponential.
struct SystemFunction {
  long index = 0;
  std::vector<double> nodes;
  CVector direction;
  double scale = 1.0;

  bool is_exponential() const { return nodes.size() == 1; }
};

enum class SystemKind { exponential, divided_difference, fourier };

std::string to_string(SystemKind kind);

class FunctionSystem {
 public:
  FunctionSystem(SystemKind kind, int d, std::vector<SystemFunction> functions);

  static FunctionSystem exponential(const ExponentFamily& family, const DirectionAssignment& directions);
  static FunctionSystem divided_difference(const DividedDifferenceBasis& basis, const DirectionAssignment& directions);

  SystemKind kind() const { return kind_; }
  int d() const { return d_; }
  std::size_t size() const { return functions_.size(); }
  const SystemFunction& operator[](std::size_t i) const { return functions_[i]; }
  const std::vector<SystemFunction>& functions() const { return functions_; }

  /// Functions at positions [pos, pos + count).
  FunctionSystem slice(std::size_t pos, std::size_t count) const;
  /// Functions whose last node w satisfies |w - y| < r.
  FunctionSystem within(double y, double r) const;
  /// Smallest and largest node over all functions.
  std::pair<double, double> node_range() const;

  /// Scalar part scale * [nodes](t).
  cplx scalar_value(std::size_t i, double t) const;

 private:
  SystemKind kind_;
  int d_;
  std::vector<SystemFunction> functions_;
};

/// Frequencies 2 pi n / |I| tensored with E_1..E_d, scaled by |I|^{-1/2}.
class FourierGrid {
 public:
  FourierGrid(IntervalSpec interval, std::vector<long> n, int d);

  /// All n with |gamma_n - y| < radius (strict).
  static FourierGrid window(const IntervalSpec& interval, double y, double radius, int d);
  static FourierGrid range(const IntervalSpec& interval, long n_lo, long n_hi, int d);

  double gamma(long n) const { return 2.0 * std::numbers::pi * static_cast<double>(n) / interval_.length(); }
  const std::vector<long>& n_values() const { return n_; }
  int d() const { return d_; }
  std::size_t card() const { return n_.size(); }
  const IntervalSpec& interval() const { return interval_; }

  /// Functions ordered n-major, direction-minor.
  FunctionSystem as_system() const;

 private:
  IntervalSpec interval_;
  std::vector<long> n_;
  int d_;
};

struct QuadratureOptions {
  int order = 16;
  double max_phase = std::numbers::pi / 4;
  int threads = 1;
};

/// (f_k, f_n) for the exponential system of (family, directions).
cplx vector_inner(long k, long n, const ExponentFamily& family, const DirectionAssignment& directions,
                  const IntervalSpec& interval);

/// (f_k, f_n) for the divided-difference system, by panel Gauss-Legendre.
cplx dd_inner_quadrature(long k, long n, const DividedDifferenceBasis& basis, const DirectionAssignment& directions,
                         const IntervalSpec& interval, int quad_order = 16);

/// M[i][j] = (cols_j, rows_i). Closed form when both functions are exponentials,
/// panel quadrature otherwise.
CMatrix cross_inner(const FunctionSystem& rows, const FunctionSystem& cols, const IntervalSpec& interval,
                    const QuadratureOptions& opts = {});

struct GramMatrix {
  CMatrix entries;
  SystemKind kind = SystemKind::exponential;
  int d = 1;
  IntervalSpec interval;

  Eigen::Index size() const { return entries.rows(); }
};

GramMatrix assemble_gram(const FunctionSystem& system, const IntervalSpec& interval, const QuadratureOptions& opts = {});

/// Same system with every function rescaled to unit L^2(I) norm.
FunctionSystem normalized(const FunctionSystem& system, const IntervalSpec& interval, const QuadratureOptions& opts = {});

/// x* G x.
double energy_quadratic_form(const GramMatrix& G, const CoefficientVector& coeffs);

struct BiorthogonalFamily {
  /// phi_k = sum_j coefficients(j, k) f_j.
  CMatrix coefficients;
  std::vector<double> norms;
  double residual = 0.0;  // max |(f_j, phi_k) - delta_jk|
  double min_eigenvalue = 0.0;
};

/// Relative eigenvalue floor below which a Gram matrix is treated as singular.
inline constexpr double kNearSingular = 1e-10;

BiorthogonalFamily dual_family(const GramMatrix& G);

/// Coefficients (in the target functions) of the orthogonal projection of each
/// source function onto span(target); column s belongs to source s.
CMatrix project_coefficients(const FunctionSystem& target, const FunctionSystem& sources, const IntervalSpec& interval,
                             bool target_orthonormal, const QuadratureOptions& opts = {});

}  // namespace nhlab
