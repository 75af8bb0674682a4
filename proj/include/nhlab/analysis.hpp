#pragma once
// Spectral analysis and the experiment drivers built on it.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhlab/gram.hpp"

namespace nhlab {

struct AnalysisOptions {
  int threads = 1;
  int quad_order = 16;
};

struct EigenBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double residual = 0.0;  // max of ||G v - lambda v|| over the two extreme pairs
};

/// Full Hermitian eigensolve (Householder tridiagonalization + implicit QR),
/// verified by the residual of both extreme eigenpairs.
EigenBounds extreme_eigenvalues(const CMatrix& G);
inline EigenBounds extreme_eigenvalues(const GramMatrix& G) { return extreme_eigenvalues(G.entries); }

enum class Verdict { stable, degenerating, indeterminate };
std::string to_string(Verdict v);

struct FrameBoundReport {
  std::vector<int> N;
  std::vector<double> lambda_min;
  std::vector<double> lambda_max;
  double interval_length = 0.0;
  /// Eigenvalues below this are at the roundoff level of the eigensolve.
  double resolution = 0.0;
  bool interlacing = true;
  Verdict verdict = Verdict::indeterminate;

  bool resolved(std::size_t i) const { return lambda_min[i] > resolution; }
};

/// Relative resolution floor for lambda_min.
inline constexpr double kResolutionFloor = 1e-12;

/// Stability rule shared by every frame-bound sweep: "stable" when the last
/// lambda_min is resolved and moved by at most 5% over each of the last two
/// grid steps; "degenerating" when it fell below 0.1 of the first value or
/// below resolution; otherwise "indeterminate".
Verdict classify(std::span<const double> lambda_min, double resolution);

/// Extreme eigenvalues of the Gram of the 2N+1 functions centred in `system`, per N.
FrameBoundReport frame_bound_sequence(const FunctionSystem& system, const IntervalSpec& interval,
                                      std::span<const int> N_grid, const AnalysisOptions& opts = {});

struct SweepResult {
  std::string parameter;
  std::vector<double> grid;
  std::vector<FrameBoundReport> reports;
  std::vector<double> values;  // scalar sweeps
  /// Last degenerating grid point before the first stable one, if the sweep crosses.
  std::optional<double> last_degenerating;
  std::optional<double> first_stable;
};

/// Frame-bound sequences on I = (start, start + L) for every L in `lengths`.
SweepResult threshold_sweep(const FunctionSystem& system, std::span<const double> lengths, std::span<const int> N_grid,
                            const AnalysisOptions& opts = {}, double start = 0.0);

struct TraceExperiment {
  double y = 0.0, r = 0.0, R = 0.0;
  int d = 1;
  long card_omega_r = 0;
  long card_gamma = 0;
  std::vector<long> omega_indices;
  cplx trace_direct;      // sum_k (S e_k, phi_k)
  cplx trace_decomposed;  // Card + sum_k ((Q - Id) e_k, phi_k)
  cplx correction;        // the sum in trace_decomposed
  std::vector<double> defect_norms;  // ||(Q - Id) e_k||
  double max_dual_norm = 0.0;
  double biorthogonality_residual = 0.0;

  double trace_bound() const { return static_cast<double>(d) * static_cast<double>(card_gamma); }
  bool trace_bound_holds(double tol = 1e-6) const { return std::abs(trace_direct) <= trace_bound() + tol; }
  bool decomposition_consistent(double rel_tol = 1e-6) const {
    return std::abs(trace_direct - trace_decomposed) <= rel_tol * static_cast<double>(card_omega_r);
  }
  double max_defect() const;
};

/// Trace of S = P_r Q_{r+R} on V_r = span{e_k : |w_k - y| < r}; `system` must be exponential.
TraceExperiment run_trace_experiment(const FunctionSystem& system, const IntervalSpec& interval, double y, double r,
                                     double R);

/// 8 d |I|^{-1} sum_{n>=0} (2 pi n/|I| + R)^{-2}, with `terms` explicit terms and an integral tail.
double defect_majorant(int d, double length, double R, long terms = 1'000'000);

struct DefectDecay {
  std::vector<double> R;
  std::vector<double> max_defect;  // max_k ||(Q_{r+R} - Id) e_k||
  std::vector<double> majorant;    // bound on the squared defect
  double slope = 0.0;
  double intercept = 0.0;
  bool zero_defect = false;  // every e_k already lies in the grid span

  bool below_majorant() const;
};

DefectDecay defect_decay_fit(const FunctionSystem& system, const IntervalSpec& interval, double y, double r,
                             std::span<const double> R_grid, const AnalysisOptions& opts = {});

struct DdThresholdReport {
  double empirical_C = 0.0;  // max |int_I f_k e^{-i gamma_n t} dt| |w_k - gamma_n|
  long argmax_k = 0;
  long argmax_n = 0;
  long pairs = 0;
  double bound_C = 0.0;  // integration-by-parts bound from |g| and |g'|
  bool finite = true;
};

/// `system` is a divided-difference (or exponential) system; w_k is the last node of f_k.
DdThresholdReport dd_threshold_check(const FunctionSystem& system, const IntervalSpec& interval,
                                     std::span<const long> n_sample, const AnalysisOptions& opts = {});

struct ConditioningPoint {
  double delta = 0.0;
  std::optional<double> raw_condition;  // empty: raw Gram numerically singular
  double dd_condition = 0.0;
  double dd_normalized_condition = 0.0;
};

/// Clustered pairs {k s, k s + delta} for lattice sites in [lo, hi].
std::vector<ConditioningPoint> conditioning_comparison(double spacing, double window_lo, double window_hi,
                                                       const IntervalSpec& interval, std::span<const double> deltas,
                                                       const AnalysisOptions& opts = {});

struct DensityChainRow {
  double r = 0.0;
  long card_omega_r = 0;
  long card_gamma = 0;
  double ratio = 0.0;    // Card(Omega_r) / Card(Gamma_{r+R})
  double epsilon = 0.0;  // inf when the defect bound is too weak
  bool holds = false;    // Card(Omega_r) <= (d + epsilon) Card(Gamma_{r+R})
  double implied_length = 0.0;  // lower bound on |I| implied by this row
};

struct DensityChainReport {
  double R = 0.0;
  int d = 1;
  std::vector<DensityChainRow> rows;
  double dplus_estimate = 0.0;
  double dplus_threshold = 0.0;  // 2 pi D+ / d
};

DensityChainReport density_chain_check(const ExponentFamily& family, const DirectionAssignment& directions,
                                       const IntervalSpec& interval, std::span<const double> r_grid, double R,
                                       std::optional<double> y = std::nullopt, const AnalysisOptions& opts = {});

}  // namespace nhlab
