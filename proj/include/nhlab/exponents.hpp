#pragma once
// Exponent families: generation, gap conditions, chains, counting function,
// upper-density estimation and periodic sharpness partitions.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nhlab {

/// How a family was produced; enough to regenerate it bit for bit.
struct GeneratorSpec {
  enum class Kind { lattice, perturbed_lattice, clustered_pairs, explicit_values };

  Kind kind = Kind::lattice;
  double spacing = 1.0;
  double offset = 0.0;        // lattice shift
  double window_lo = 0.0;     // lattice sites k*spacing in [window_lo, window_hi]
  double window_hi = 0.0;
  double max_perturbation = 0.0;  // perturbed-lattice, absolute
  double delta = 0.0;             // clustered-pairs offset
  std::vector<double> values;     // explicit
  std::uint64_t seed = 0;

  bool operator==(const GeneratorSpec&) const = default;
};

std::string to_string(GeneratorSpec::Kind kind);
GeneratorSpec::Kind generator_kind_from_string(const std::string& name);

/// Sorted finite window of real exponents indexed by consecutive integers
/// first_index, first_index+1, ...
class ExponentFamily {
 public:
  ExponentFamily() = default;
  ExponentFamily(std::vector<double> exponents, long first_index = 0, std::string label = {});

  std::size_t size() const { return exponents_.size(); }
  long first_index() const { return first_index_; }
  long last_index() const { return first_index_ + static_cast<long>(exponents_.size()) - 1; }
  bool contains_index(long k) const { return k >= first_index_ && k <= last_index(); }

  /// Exponent with family index k.
  double at(long k) const;
  double operator[](std::size_t pos) const { return exponents_[pos]; }

  std::span<const double> values() const { return exponents_; }
  const std::string& label() const { return label_; }
  double span_length() const { return exponents_.back() - exponents_.front(); }

  const std::optional<GeneratorSpec>& generator() const { return generator_; }
  void set_generator(GeneratorSpec spec) { generator_ = std::move(spec); }

  /// Every exponent multiplied by c > 0.
  ExponentFamily scaled(double c) const;
  /// Members with positions [pos, pos+count).
  ExponentFamily slice(std::size_t pos, std::size_t count) const;

  bool operator==(const ExponentFamily& o) const {
    return exponents_ == o.exponents_ && first_index_ == o.first_index_ && label_ == o.label_;
  }

 private:
  std::vector<double> exponents_;
  long first_index_ = 0;
  std::string label_;
  std::optional<GeneratorSpec> generator_;
};

ExponentFamily generate_family(const GeneratorSpec& spec);

// --- gap conditions --------------------------------------------------------

struct GapReport {
  double gamma = 0.0;  // +inf for a single exponent
  bool satisfies_strict_gap = false;
  bool degenerate = false;  // fewer than two exponents

  int M = 1;
  bool insufficient_data = false;  // window shorter than M+1
  double gamma_prime = 0.0;        // min_k (w_{k+M} - w_k) / M
  bool satisfies_weak_gap = false;  // gamma_prime > 0

  /// Whether w_{k+M} - w_k >= M * threshold throughout the window. A relative
  /// slack of 1e-12 keeps decimal thresholds such as 0.45 from failing on the
  /// rounding of the differences.
  bool weak_gap_holds(double threshold) const {
    return !insufficient_data && gamma_prime >= threshold * (1 - 1e-12);
  }
};

GapReport validate_gaps(const ExponentFamily& family, int M);

// --- chains ----------------------------------------------------------------

struct Chain {
  long start = 0;  // family index of the first member
  int length = 1;
  bool boundary_incomplete = false;  // touches a window edge, so one side is unobserved

  long last() const { return start + length - 1; }
  bool operator==(const Chain&) const = default;
};

struct ChainDecomposition {
  std::vector<Chain> chains;
  double gamma_prime = 0.0;
  int M = 1;

  /// Chain containing family index k.
  const Chain& chain_of(long k) const;
};

ChainDecomposition detect_chains(const ExponentFamily& family, double gamma_prime, int M);

// --- counting and density --------------------------------------------------

/// Largest number of exponents in a closed interval of length r.
long counting_function(const ExponentFamily& family, double r);

struct DensityEstimate {
  std::vector<double> radii;
  std::vector<long> counts;
  double dplus_estimate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual of the fit
  std::size_t fit_begin = 0;  // fit uses radii[fit_begin, radii.size())
};

/// Least-squares slope of n+(r) against r over the upper half of r_grid.
DensityEstimate estimate_density(const ExponentFamily& family, std::span<const double> r_grid);

/// Default radius grid: `points` radii evenly spaced up to half the window span.
std::vector<double> default_radius_grid(const ExponentFamily& family, int points = 64);

// --- periodic structure and sharpness partitions ---------------------------

struct Periodicity {
  long count_per_period = 0;  // exponents per period
  double period = 0.0;
  double density() const { return static_cast<double>(count_per_period) / period; }
};

/// Smallest period under which the window repeats itself, if any.
std::optional<Periodicity> detect_periodicity(const ExponentFamily& family, double tol = 1e-9);

struct Partition {
  int d = 1;
  double target_alpha = 0.0;
  double achieved_alpha = 0.0;  // exact max class density of the periodic construction
  long block = 0;               // exponents per construction period
  long class1_run = 0;          // of which the first class1_run go to class 1
  std::vector<int> class_of;    // by position in the family, labels 1..d

  int class_at(const ExponentFamily& family, long k) const {
    return class_of.at(static_cast<std::size_t>(k - family.first_index()));
  }
  /// Exact density of class j for the periodic extension.
  std::vector<double> class_densities;
};

Partition build_sharpness_partition(const ExponentFamily& family, int d, double alpha);

/// Members of `family` assigned to class j, reindexed from 0.
ExponentFamily class_subfamily(const ExponentFamily& family, const Partition& partition, int j);

}  // namespace nhlab
