#include "nhlab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "nhlab/error.hpp"

namespace nhlab {

const GaussLegendreRule<double>& gauss_legendre(int n) {
  if (n < 1) throw ValidationError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule<double>>(make_gauss_legendre<double>(n));
  return *slot;
}

PanelRule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw ValidationError("panel count must be positive");
  const auto& rule = gauss_legendre(order);
  PanelRule out;
  out.t.reserve(static_cast<std::size_t>(panels) * order);
  out.w.reserve(out.t.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    for (int i = 0; i < order; ++i) {
      out.t.push_back(mid + 0.5 * h * rule.nodes[i]);
      out.w.push_back(0.5 * h * rule.weights[i]);
    }
  }
  return out;
}

int panels_for_phase(double length, double rate, double max_phase) {
  const double phase = std::abs(length * rate);
  return std::max(1, static_cast<int>(std::ceil(phase / max_phase)));
}

}  // namespace nhlab
