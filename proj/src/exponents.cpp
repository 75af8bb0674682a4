#include "nhlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "nhlab/error.hpp"

namespace nhlab {

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long floor_mod(long a, long b) { return a - floor_div(a, b) * b; }

// Uniform in [0, 1) from the top 53 bits; fixed across standard libraries.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string to_string(GeneratorSpec::Kind kind) {
  switch (kind) {
    case GeneratorSpec::Kind::lattice: return "lattice";
    case GeneratorSpec::Kind::perturbed_lattice: return "perturbed-lattice";
    case GeneratorSpec::Kind::clustered_pairs: return "clustered-pairs";
    case GeneratorSpec::Kind::explicit_values: return "explicit";
  }
  return "unknown";
}

GeneratorSpec::Kind generator_kind_from_string(const std::string& name) {
  if (name == "lattice") return GeneratorSpec::Kind::lattice;
  if (name == "perturbed-lattice") return GeneratorSpec::Kind::perturbed_lattice;
  if (name == "clustered-pairs") return GeneratorSpec::Kind::clustered_pairs;
  if (name == "explicit") return GeneratorSpec::Kind::explicit_values;
  throw ValidationError("unknown family kind '" + name + "'");
}

ExponentFamily::ExponentFamily(std::vector<double> exponents, long first_index, std::string label)
    : exponents_(std::move(exponents)), first_index_(first_index), label_(std::move(label)) {
  if (exponents_.empty()) throw ValidationError("exponent family must be nonempty");
  for (double w : exponents_)
    if (!std::isfinite(w)) throw ValidationError("exponent family contains a non-finite value");
  if (!std::is_sorted(exponents_.begin(), exponents_.end()))
    throw ValidationError("exponents must be nondecreasing");
}

double ExponentFamily::at(long k) const {
  if (!contains_index(k)) throw ValidationError("index " + std::to_string(k) + " outside the family window");
  return exponents_[static_cast<std::size_t>(k - first_index_)];
}

ExponentFamily ExponentFamily::scaled(double c) const {
  if (!(c > 0)) throw ValidationError("scale factor must be positive");
  std::vector<double> v(exponents_);
  for (double& w : v) w *= c;
  return ExponentFamily(std::move(v), first_index_, label_);
}

ExponentFamily ExponentFamily::slice(std::size_t pos, std::size_t count) const {
  if (count == 0 || pos + count > exponents_.size()) throw ValidationError("slice outside the family window");
  std::vector<double> v(exponents_.begin() + pos, exponents_.begin() + pos + count);
  return ExponentFamily(std::move(v), first_index_ + static_cast<long>(pos), label_);
}

ExponentFamily generate_family(const GeneratorSpec& spec) {
  using Kind = GeneratorSpec::Kind;
  if (spec.kind == Kind::explicit_values) {
    std::vector<double> v(spec.values);
    std::sort(v.begin(), v.end());
    ExponentFamily f(std::move(v), 0, "explicit");
    f.set_generator(spec);
    return f;
  }
  if (!(spec.spacing > 0)) throw ValidationError("spacing must be positive");
  if (!(spec.window_hi >= spec.window_lo)) throw ValidationError("window must satisfy lo <= hi");
  const long k_lo = static_cast<long>(std::ceil(spec.window_lo / spec.spacing - 1e-12));
  const long k_hi = static_cast<long>(std::floor(spec.window_hi / spec.spacing + 1e-12));
  if (k_hi < k_lo) throw ValidationError("window contains no lattice site");

  std::vector<double> v;
  long first = k_lo;
  std::string label;
  switch (spec.kind) {
    case Kind::lattice:
      for (long k = k_lo; k <= k_hi; ++k) v.push_back(spec.offset + static_cast<double>(k) * spec.spacing);
      label = "lattice";
      break;
    case Kind::perturbed_lattice: {
      if (!(spec.max_perturbation >= 0) || spec.max_perturbation >= 0.5 * spec.spacing)
        throw ValidationError("perturbation must lie in [0, spacing/2)");
      std::mt19937_64 rng(spec.seed);
      for (long k = k_lo; k <= k_hi; ++k) {
        const double u = 2.0 * unit_uniform(rng) - 1.0;
        v.push_back(spec.offset + static_cast<double>(k) * spec.spacing + u * spec.max_perturbation);
      }
      label = "perturbed-lattice";
      break;
    }
    case Kind::clustered_pairs:
      if (!(spec.delta >= 0) || spec.delta >= spec.spacing)
        throw ValidationError("cluster offset must lie in [0, spacing)");
      for (long k = k_lo; k <= k_hi; ++k) {
        const double base = spec.offset + static_cast<double>(k) * spec.spacing;
        v.push_back(base);
        v.push_back(base + spec.delta);
      }
      first = 2 * k_lo;
      label = "clustered-pairs";
      break;
    case Kind::explicit_values: break;
  }
  ExponentFamily f(std::move(v), first, label);
  f.set_generator(spec);
  return f;
}

GapReport validate_gaps(const ExponentFamily& family, int M) {
  if (M < 1) throw ValidationError("M must be a positive integer");
  const auto w = family.values();
  const std::size_t n = w.size();
  GapReport rep;
  rep.M = M;
  if (n < 2) {
    rep.degenerate = true;
    rep.gamma = std::numeric_limits<double>::infinity();
    rep.satisfies_strict_gap = true;
  } else {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) g = std::min(g, w[i] - w[i - 1]);
    rep.gamma = g;
    rep.satisfies_strict_gap = g > 0;
  }
  if (n < static_cast<std::size_t>(M) + 1) {
    rep.insufficient_data = true;
    return rep;
  }
  double gp = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + M < n; ++i) gp = std::min(gp, (w[i + M] - w[i]) / M);
  rep.gamma_prime = gp;
  rep.satisfies_weak_gap = gp > 0;
  return rep;
}

const Chain& ChainDecomposition::chain_of(long k) const {
  auto it = std::upper_bound(chains.begin(), chains.end(), k, [](long key, const Chain& c) { return key < c.start; });
  if (it == chains.begin() || k > std::prev(it)->last())
    throw ValidationError("index " + std::to_string(k) + " not covered by the chain decomposition");
  return *std::prev(it);
}

ChainDecomposition detect_chains(const ExponentFamily& family, double gamma_prime, int M) {
  if (!(gamma_prime > 0)) throw ValidationError("gamma_prime must be positive");
  if (M < 1) throw ValidationError("M must be a positive integer");
  ChainDecomposition out;
  out.gamma_prime = gamma_prime;
  out.M = M;
  const auto w = family.values();
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= w.size(); ++i) {
    if (i == w.size() || w[i] - w[i - 1] >= gamma_prime) {
      Chain c;
      c.start = family.first_index() + static_cast<long>(begin);
      c.length = static_cast<int>(i - begin);
      c.boundary_incomplete = (begin == 0) || (i == w.size());
      if (c.length > M)
        throw ValidationError("weak gap violated: chain of length " + std::to_string(c.length) + " at index " +
                              std::to_string(c.start) + " exceeds M = " + std::to_string(M));
      out.chains.push_back(c);
      begin = i;
    }
  }
  return out;
}

long counting_function(const ExponentFamily& family, double r) {
  if (!(r > 0)) throw ValidationError("counting radius must be positive");
  const auto w = family.values();
  long best = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto hi = std::upper_bound(w.begin() + i, w.end(), w[i] + r);
    best = std::max(best, static_cast<long>(hi - (w.begin() + i)));
  }
  return best;
}

DensityEstimate estimate_density(const ExponentFamily& family, std::span<const double> r_grid) {
  DensityEstimate est;
  est.radii.assign(r_grid.begin(), r_grid.end());
  const double span = family.span_length();
  for (double r : est.radii) {
    if (!(r > 0)) throw ValidationError("radius grid values must be positive");
    if (r > span * (1 + 1e-12)) throw ValidationError("radius exceeds the family window span");
  }
  est.fit_begin = est.radii.size() / 2;
  const std::size_t m = est.radii.size() - est.fit_begin;
  if (m < 3) throw ValidationError("density fit needs at least 3 radii in the upper half of the grid");

  est.counts.reserve(est.radii.size());
  for (double r : est.radii) est.counts.push_back(counting_function(family, r));

  double sx = 0, sy = 0;
  for (std::size_t i = est.fit_begin; i < est.radii.size(); ++i) {
    sx += est.radii[i];
    sy += static_cast<double>(est.counts[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = est.fit_begin; i < est.radii.size(); ++i) {
    const double dx = est.radii[i] - mx;
    sxx += dx * dx;
    sxy += dx * (static_cast<double>(est.counts[i]) - my);
  }
  if (!(sxx > 0)) throw ValidationError("density fit needs distinct radii");
  est.dplus_estimate = std::max(0.0, sxy / sxx);
  est.intercept = my - est.dplus_estimate * mx;
  double ss = 0;
  for (std::size_t i = est.fit_begin; i < est.radii.size(); ++i) {
    const double e = static_cast<double>(est.counts[i]) - (est.intercept + est.dplus_estimate * est.radii[i]);
    ss += e * e;
  }
  est.residual = std::sqrt(ss / m);
  return est;
}

std::vector<double> default_radius_grid(const ExponentFamily& family, int points) {
  const double top = 0.5 * family.span_length();
  if (!(top > 0) || points < 6) throw ValidationError("family too small for a default radius grid");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = top * (i + 1) / points;
  return g;
}

std::optional<Periodicity> detect_periodicity(const ExponentFamily& family, double tol) {
  const auto w = family.values();
  const std::size_t n = w.size();
  for (std::size_t p = 1; 2 * p <= n; ++p) {
    const double period = w[p] - w[0];
    if (!(period > 0)) continue;
    bool ok = true;
    for (std::size_t i = 0; i + p < n && ok; ++i)
      ok = std::abs((w[i + p] - w[i]) - period) <= tol * std::max(1.0, period);
    if (ok) return Periodicity{static_cast<long>(p), period};
  }
  return std::nullopt;
}

Partition build_sharpness_partition(const ExponentFamily& family, int d, double alpha) {
  if (d < 1) throw ValidationError("number of classes d must be positive");
  const auto per = detect_periodicity(family);
  if (!per) throw ValidationError("construction requires periodic family");
  const double dplus = per->density();
  const double eps = 1e-12 * dplus;
  if (alpha < dplus / d - eps || alpha > dplus + eps)
    throw ValidationError("alpha must lie in [D+/d, D+] = [" + std::to_string(dplus / d) + ", " +
                          std::to_string(dplus) + "]");
  if (d == 1) alpha = dplus;

  // Smallest number of base periods q whose block holds a class-1 run of the exact
  // proportion alpha/D+; otherwise the closest rational approximation with q <= 64.
  const double share = alpha / dplus;
  long best_q = 1, best_run = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (long q = 1; q <= 64; ++q) {
    const long block = q * per->count_per_period;
    const long run = std::lround(share * static_cast<double>(block));
    const double err = std::abs(static_cast<double>(run) / block - share);
    if (err < best_err - 1e-15) {
      best_err = err;
      best_q = q;
      best_run = run;
    }
    if (err <= 1e-12) break;
  }
  Partition part;
  part.d = d;
  part.target_alpha = alpha;
  part.block = best_q * per->count_per_period;
  part.class1_run = best_run;
  const long rest = part.block - part.class1_run;
  if (d == 1 && rest != 0) throw NumericalError("single-class partition must take the whole block");

  part.class_of.resize(family.size());
  for (std::size_t pos = 0; pos < family.size(); ++pos) {
    const long k = family.first_index() + static_cast<long>(pos);
    const long within = floor_mod(k, part.block);
    if (within < part.class1_run) {
      part.class_of[pos] = 1;
    } else {
      const long ordinal = floor_div(k, part.block) * rest + (within - part.class1_run);
      part.class_of[pos] = 2 + static_cast<int>(floor_mod(ordinal, d - 1));
    }
  }

  const double block_length = static_cast<double>(best_q) * per->period;
  part.class_densities.assign(d, 0.0);
  part.class_densities[0] = static_cast<double>(part.class1_run) / block_length;
  for (int j = 1; j < d; ++j) part.class_densities[j] = static_cast<double>(rest) / (d - 1) / block_length;
  part.achieved_alpha = *std::max_element(part.class_densities.begin(), part.class_densities.end());
  return part;
}

ExponentFamily class_subfamily(const ExponentFamily& family, const Partition& partition, int j) {
  std::vector<double> v;
  for (std::size_t pos = 0; pos < family.size(); ++pos)
    if (partition.class_of[pos] == j) v.push_back(family[pos]);
  if (v.empty()) throw ValidationError("class " + std::to_string(j) + " is empty");
  return ExponentFamily(std::move(v), 0, family.label() + "/class" + std::to_string(j));
}

}  // namespace nhlab
