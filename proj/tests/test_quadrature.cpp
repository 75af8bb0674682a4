#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhlab/gram.hpp"
#include "nhlab/quadrature.hpp"
#include "nhlab/simd/kernels.hpp"
#include "oracles.hpp"

using namespace nhlab;
using namespace std::complex_literals;
constexpr double pi = std::numbers::pi;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 32, 64}) {
    const auto& g = gauss_legendre(n);
    double wsum = 0;
    for (double w : g.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int p = 0; p <= 2 * n - 1; p += 2) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      CHECK(s == doctest::Approx(2.0 / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("composite rule and panel count") {
  const auto rule = composite_gauss_legendre(0.0, 3.0, 4, 8);
  REQUIRE(rule.size() == 32);
  double s = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.w[i] * std::exp(rule.t[i]);
  CHECK(s == doctest::Approx(std::exp(3.0) - 1).epsilon(1e-14));
  CHECK(panels_for_phase(2 * pi, 1.0) == 8);
  CHECK(panels_for_phase(1.0, 0.0) == 1);
}

TEST_CASE("closed form examples") {
  CHECK(std::abs(exp_inner_closed_form(0, {0, 1}) - 1.0) < 1e-15);
  CHECK(std::abs(exp_inner_closed_form(2 * pi, {0, 1})) < 1e-15);
  CHECK(std::abs(exp_inner_closed_form(1, {0, pi}) - 2i) < 1e-15);
}

TEST_CASE("closed form matches long double quadrature") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const double a = -50 + 100 * u(rng);
    const double L = std::pow(10.0, -3 + 5 * u(rng));
    const double theta_max = 1e3 / L;
    const double theta = (u(rng) < 0.5 ? -1 : 1) * theta_max * std::pow(10.0, -12 * u(rng));
    const IntervalSpec I(a, a + L);
    const auto ref = oracle::exp_integral(theta, I.a, I.b);
    worst = std::max(worst, std::abs(exp_inner_closed_form(theta, I) - ref) / std::abs(ref));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("closed form across the small-phase switch") {
  for (double theta : {1e-12, 1e-9, 3e-5, 9.99e-5, 1.0001e-4, 1e-3}) {
    const IntervalSpec I(0.3, 2.3);
    const auto ref = oracle::exp_integral(theta, I.a, I.b);
    CHECK(std::abs(exp_inner_closed_form(theta, I) - ref) / std::abs(ref) <= 1e-14);
  }
}

TEST_CASE("scalar and AVX2 kernels agree") {
  const simd::KernelTable* v = simd::avx2_kernels();
  if (!v) {
    MESSAGE("no AVX2 variant on this machine; only the scalar kernels are exercised");
    return;
  }
  const auto& s = simd::scalar_kernels();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n = 0; n < 70; ++n) {
    std::vector<double> w(n), ar(n), ai(n), br(n), bi(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::abs(u(rng));
      ar[i] = u(rng);
      ai[i] = u(rng);
      br[i] = u(rng);
      bi[i] = u(rng);
    }
    const auto cs = s.weighted_cdot(w.data(), ar.data(), ai.data(), br.data(), bi.data(), n);
    const auto cv = v->weighted_cdot(w.data(), ar.data(), ai.data(), br.data(), bi.data(), n);
    CHECK(std::abs(cs - cv) <= 1e-14 * (1.0 + static_cast<double>(n)));
    const double ns = s.weighted_norm2(w.data(), ar.data(), ai.data(), n);
    const double nv = v->weighted_norm2(w.data(), ar.data(), ai.data(), n);
    CHECK(std::abs(ns - nv) <= 1e-14 * (1.0 + static_cast<double>(n)));
  }
}

TEST_CASE("dispatch picks a usable table") {
  const auto& k = simd::kernels();
  const double w[] = {1, 2};
  const double ar[] = {1, 0}, ai[] = {0, 1}, br[] = {1, 0}, bi[] = {0, 1};
  CHECK(std::abs(k.weighted_cdot(w, ar, ai, br, bi, 2) - 3.0) < 1e-15);
  MESSAGE("kernels: " << simd::isa_name(k.isa));
}
