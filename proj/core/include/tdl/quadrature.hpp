#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace tdl {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule, computed by Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(int n);

// Integral of f over [a, b] with one n-point Gauss-Legendre panel.
template <class F>
auto gauss_panel(F&& f, double a, double b, int n = 16) {
  const auto& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  decltype(f(mid)) acc{};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return acc * half;
}

// (1 / 2 pi i) * contour integral of g(z) (z - center)^moment dz over the
// circle |z - center| = radius, `points`-point trapezoid. For g meromorphic
// inside with a pole only at center, moment = 0 gives the residue and
// moment = 1 the coefficient of (z - center)^{-2}.
template <class G>
std::complex<double> circle_moment(G&& g, std::complex<double> center, double radius, int moment, int points = 128) {
  std::complex<double> acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const std::complex<double> e = std::polar(1.0, 2.0 * std::numbers::pi * k / points);
    acc += g(center + radius * e) * std::pow(radius * e, moment + 1);
  }
  return acc / static_cast<double>(points);
}

}  // namespace tdl
