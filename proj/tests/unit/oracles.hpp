#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> lo, hi;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      lo.push_back(d);
      if (d * d != n) hi.push_back(n / d);
    }
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

// sum_{d | n} d^{i theta} by enumeration.
inline cplx tau(std::uint64_t n, double theta) {
  cplx s = 0.0;
  for (auto d : divisors(n)) s += std::polar(1.0, theta * std::log(static_cast<double>(d)));
  return s;
}

// sum_{n <= x} |tau(n)|^2 with half weight at an integer x.
inline double partial_sum(double x, double theta, bool half_at_integer = true) {
  double s = 0.0;
  const auto n_max = static_cast<std::uint64_t>(std::floor(x));
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    double w = std::norm(tau(n, theta));
    if (half_at_integer && n == n_max && static_cast<double>(n) == x) w *= 0.5;
    s += w;
  }
  return s;
}

// Direct trapezoid on |z - c| = r of f(z) (z - c)^m, i.e. the Laurent
// coefficient of index -(m + 1).
template <class F>
cplx laurent(F f, cplx c, double r, int m, int points = 256) {
  cplx acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const cplx u = std::polar(r, 2.0 * M_PI * k / points);
    acc += f(c + u) * std::pow(u, m + 1);
  }
  return acc / static_cast<double>(points);
}

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(gen); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
};

}  // namespace oracle
