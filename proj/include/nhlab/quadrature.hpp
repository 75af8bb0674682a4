#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <numbers>
#include <vector>

namespace nhlab {

/// Gauss-Legendre rule on [-1, 1].
template <class Real>
struct GaussLegendreRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// Newton iteration on P_n from the Chebyshev-like initial guesses; accurate to
/// a few ulps of Real for n up to a few hundred.
template <class Real>
GaussLegendreRule<Real> make_gauss_legendre(int n) {
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](Real x) {
    Real p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair<Real, Real>{p1, n * (x * p1 - p0) / (x * x - 1)};
  };
  GaussLegendreRule<Real> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Real pi = std::numbers::pi_v<Real>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    for (int iter = 0; iter < 100; ++iter) {
      auto [p, dp] = legendre(x);
      Real dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 4 * std::numeric_limits<Real>::epsilon()) break;
    }
    Real dp = legendre(x).second;
    Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  return rule;
}

/// Cached double-precision rule; thread-safe.
const GaussLegendreRule<double>& gauss_legendre(int n);

/// Composite rule on [a, b]: `panels` equal panels, `order` points each.
struct PanelRule {
  std::vector<double> t;
  std::vector<double> w;
  std::size_t size() const { return t.size(); }
};

PanelRule composite_gauss_legendre(double a, double b, int panels, int order);

/// Panels needed so each spans at most `max_phase` radians of a phase rotating at `rate`.
int panels_for_phase(double length, double rate, double max_phase = std::numbers::pi / 4);

}  // namespace nhlab
