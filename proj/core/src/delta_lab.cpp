#include "tdl/delta_lab.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tdl/errors.hpp"
#include "tdl/quadrature.hpp"

namespace tdl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string range_text(double a, double b) {
  std::ostringstream os;
  os.precision(10);
  os << "[" << a << ", " << b << "]";
  return os.str();
}

void require_coverage(const std::vector<double>& grid, double lo, double hi, const char* op) {
  if (grid.empty()) throw PreconditionError(std::string(op) + ": empty Delta series");
  if (grid.front() > lo || grid.back() < hi) {
    std::string missing;
    if (grid.front() > lo) missing += range_text(lo, grid.front());
    if (grid.back() < hi) missing += (missing.empty() ? "" : " and ") + range_text(grid.back(), hi);
    throw PreconditionError(std::string(op) + ": checkpoint grid " + range_text(grid.front(), grid.back()) +
                            " does not cover " + range_text(lo, hi) + "; missing " + missing);
  }
}

struct Node {
  double x, delta;
};

// Checkpoints of [lo, hi] with interpolated end nodes.
std::vector<Node> nodes_on(const DeltaSeries& d, double lo, double hi) {
  std::vector<Node> out;
  out.push_back({lo, d.at(lo)});
  auto it = std::upper_bound(d.grid.begin(), d.grid.end(), lo);
  for (; it != d.grid.end() && *it < hi; ++it) out.push_back({*it, d.delta[static_cast<std::size_t>(it - d.grid.begin())]});
  out.push_back({hi, d.at(hi)});
  return out;
}

template <class W>
double weighted_square_integral(const std::vector<Node>& nodes, W&& weight) {
  const auto& rule = gauss_legendre(4);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Node& a = nodes[i];
    const Node& b = nodes[i + 1];
    const double half = 0.5 * (b.x - a.x);
    if (half <= 0.0) continue;
    const double mid = 0.5 * (b.x + a.x);
    double cell = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = rule.nodes[k];
      const double x = mid + half * t;
      const double dl = a.delta + (b.delta - a.delta) * 0.5 * (1.0 + t);
      cell += rule.weights[k] * dl * dl * weight(x);
    }
    acc += cell * half;
  }
  return acc;
}

template <class F>
cplx adaptive_gauss(F& f, double a, double b, double rel_tol, int depth) {
  const cplx whole = gauss_panel(f, a, b);
  const double m = 0.5 * (a + b);
  const cplx left = gauss_panel(f, a, m);
  const cplx right = gauss_panel(f, m, b);
  const cplx halves = left + right;
  // Scale: L1 size of the integrand on the panel.
  double scale = 0.0;
  {
    const auto& rule = gauss_legendre(16);
    const double h = 0.5 * (b - a);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) scale += rule.weights[k] * std::abs(f(m + h * rule.nodes[k]));
    scale *= h;
  }
  if (std::abs(whole - halves) <= rel_tol * scale + 1e-300) return halves;
  if (depth <= 0) throw NumericalError("smoothing_tail: adaptive quadrature did not converge");
  return adaptive_gauss(f, a, m, rel_tol, depth - 1) + adaptive_gauss(f, m, b, rel_tol, depth - 1);
}

}  // namespace

double DeltaSeries::at(double x) const {
  if (grid.empty() || x < grid.front() || x > grid.back()) {
    throw PreconditionError("DeltaSeries: x=" + std::to_string(x) + " outside the checkpoint grid");
  }
  auto it = std::lower_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  if (*it == x || i == 0) return delta[i];
  const double x0 = grid[i - 1], x1 = grid[i];
  const double w = (x - x0) / (x1 - x0);
  return delta[i - 1] + w * (delta[i] - delta[i - 1]);
}

DeltaSeries delta_series(const PartialSumSeries& sums, const MainTermConstants& constants) {
  if (sums.params.theta() != constants.params.theta()) {
    throw PreconditionError("delta_series: constants derived for theta=" + std::to_string(constants.params.theta()) +
                            " but series has theta=" + std::to_string(sums.params.theta()));
  }
  if (sums.grid.size() != sums.values.size()) throw PreconditionError("delta_series: grid/values length mismatch");
  const PowerLogSum m = main_term_expansion(constants);
  DeltaSeries d{sums.params, sums.grid, std::vector<double>(sums.grid.size()), constants.fingerprint()};
  for (std::size_t i = 0; i < sums.grid.size(); ++i) {
    if (sums.grid[i] < 2.0) throw DomainError("delta_series: checkpoints must be >= 2");
    d.delta[i] = sums.values[i] - m.value(sums.grid[i]);
  }
  return d;
}

double alpha_of(double T, double c) {
  if (!(T > 1.0) || !(c > 0.0)) throw DomainError("alpha_of: need T > 1 and c > 0");
  return 0.375 - c / std::pow(std::log(T), 0.125);
}

MomentReport smoothed_moment(const DeltaSeries& delta, double T, double c, double b_exponent, double upper_limit) {
  if (!(b_exponent > 0.0)) throw DomainError("smoothed_moment: b must be positive");
  if (!(upper_limit > T)) throw DomainError("smoothed_moment: upper limit must exceed T");
  require_coverage(delta.grid, T, upper_limit, "smoothed_moment");
  MomentReport r;
  r.T = T;
  r.b_exponent = b_exponent;
  r.c = c;
  r.alpha = alpha_of(T, c);
  r.y = std::pow(T, b_exponent);
  r.upper_limit = upper_limit;
  r.within_theorem_hypothesis = b_exponent >= 80.0;
  r.quadrature = "gauss-legendre-4 per checkpoint cell, Delta piecewise linear";
  const double p = -2.0 * r.alpha - 1.0;
  const double y = r.y;
  r.value = weighted_square_integral(nodes_on(delta, T, upper_limit), [&](double x) {
    return std::pow(x, p) * (std::isfinite(y) ? std::exp(-2.0 * x / y) : 1.0);
  });

  double sup = 0.0;
  for (std::size_t i = 0; i < delta.grid.size(); ++i) {
    const double x = delta.grid[i];
    if (x >= upper_limit / 2.0) sup = std::max(sup, delta.delta[i] * delta.delta[i] * std::pow(x, p));
  }
  r.tail_bound = std::isfinite(y) ? sup * y * std::exp(-2.0 * upper_limit / y) : (sup > 0.0 ? kInf : 0.0);
  return r;
}

double local_moment(const DeltaSeries& delta, double X, double alpha) {
  if (!(X > 0.0)) throw DomainError("local_moment: X must be positive");
  require_coverage(delta.grid, X, 2.0 * X, "local_moment");
  const double p = -2.0 * alpha - 1.0;
  return weighted_square_integral(nodes_on(delta, X, 2.0 * X), [&](double x) { return std::pow(x, p); });
}

std::string_view to_string(ThresholdKind k) {
  return k == ThresholdKind::power_alpha_of_x ? "power_alpha_of_x" : "landau_quarter";
}

ThresholdKind parse_threshold_kind(std::string_view name) {
  if (name == "power_alpha_of_x" || name == "power") return ThresholdKind::power_alpha_of_x;
  if (name == "landau_quarter" || name == "landau") return ThresholdKind::landau_quarter;
  throw DomainError("unknown threshold kind '" + std::string(name) + "'");
}

ExceedanceReport exceedance_measure(const DeltaSeries& delta, const ExceedanceRequest& req) {
  if (!(req.X > 0.0)) throw DomainError("exceedance_measure: X must be positive");
  if (!(req.sample_step > 0.0)) throw DomainError("exceedance_measure: sample_step must be positive");
  if (std::isnan(req.lambda) || req.epsilon < 0.0) throw DomainError("exceedance_measure: bad lambda/epsilon");
  require_coverage(delta.grid, req.X, 2.0 * req.X, "exceedance_measure");
  const auto nodes = nodes_on(delta, req.X, 2.0 * req.X);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i + 1].x - nodes[i].x > req.sample_step) {
      throw PreconditionError("exceedance_measure: grid under-resolved, cell " +
                              range_text(nodes[i].x, nodes[i + 1].x) + " longer than sample_step");
    }
  }

  ExceedanceReport rep{req.X, req.kind, req.lambda, req.epsilon, req.c, req.sample_step, {}};
  auto tally = [&](const char* name, auto&& exceeds) {
    SetMeasure m{name, 0.0, 0.0};
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const bool a = exceeds(nodes[i]);
      const bool b = exceeds(nodes[i + 1]);
      const double len = nodes[i + 1].x - nodes[i].x;
      if (a && b) m.measure_lower += len;
      if (a || b) m.measure_upper += len;
    }
    rep.sets.push_back(m);
  };
  if (req.kind == ThresholdKind::power_alpha_of_x) {
    tally("A", [&](const Node& n) { return std::abs(n.delta) > req.lambda * std::pow(n.x, alpha_of(n.x, req.c)); });
  } else {
    const double amp = req.lambda - req.epsilon;
    tally("A1", [&](const Node& n) { return n.delta > amp * std::pow(n.x, 0.25); });
    tally("A2", [&](const Node& n) { return n.delta < -amp * std::pow(n.x, 0.25); });
  }
  return rep;
}

double fit_landau_lambda(const DeltaSeries& delta, double lo, double hi, double quantile) {
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw DomainError("fit_landau_lambda: quantile outside [0, 1]");
  std::vector<double> r;
  for (std::size_t i = 0; i < delta.grid.size(); ++i) {
    const double x = delta.grid[i];
    if (x >= lo && x <= hi) r.push_back(std::abs(delta.delta[i]) / std::pow(x, 0.25));
  }
  if (r.empty()) throw PreconditionError("fit_landau_lambda: no checkpoints in calibration range " + range_text(lo, hi));
  std::sort(r.begin(), r.end());
  const auto k = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(r.size()))) ;
  return r[std::min(r.size() - 1, k == 0 ? 0 : k - 1)];
}

std::size_t count_sign_changes(const DeltaSeries& delta, double lo, double hi) {
  std::size_t changes = 0;
  int last = 0;
  for (std::size_t i = 0; i < delta.grid.size(); ++i) {
    const double x = delta.grid[i];
    if (x < lo || x > hi || delta.delta[i] == 0.0) continue;
    const int sign = delta.delta[i] > 0.0 ? 1 : -1;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

UpperBoundShape upper_bound_shape(const DeltaSeries& delta, double lo, double hi) {
  UpperBoundShape s;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < delta.grid.size(); ++i) {
    const double x = delta.grid[i];
    if (x < lo || x > hi || x <= 1.0) continue;
    const double d = delta.delta[i];
    const double ratio = std::abs(d) / (std::sqrt(x) * std::pow(std::log(x), 6));
    if (ratio > s.sup_ratio) {
      s.sup_ratio = ratio;
      s.argmax_x = x;
    }
    s.max_over_x38 = std::max(s.max_over_x38, std::abs(d) / std::pow(x, 0.375));
    s.max_abs_over_x14 = std::max(s.max_abs_over_x14, std::abs(d) / std::pow(x, 0.25));
    sum += d / std::pow(x, 0.25);
    ++count;
  }
  if (count == 0) throw PreconditionError("upper_bound_shape: no checkpoints in " + range_text(lo, hi));
  s.mean_over_x14 = sum / static_cast<double>(count);
  return s;
}

MainTermConstants fit_main_term_constants(const PartialSumSeries& sums, double lo, double hi) {
  const double theta = sums.params.theta();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < sums.grid.size(); ++i) {
    if (sums.grid[i] >= lo && sums.grid[i] <= hi && sums.grid[i] >= 2.0) rows.push_back(i);
  }
  if (rows.size() < 8) throw PreconditionError("fit_main_term_constants: fewer than 8 checkpoints in " + range_text(lo, hi));
  Eigen::MatrixXd a(rows.size(), 4);
  Eigen::VectorXd b(rows.size());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double x = sums.grid[rows[static_cast<std::size_t>(r)]];
    const double lx = std::log(x);
    // Rows divided by x.
    a(r, 0) = lx;
    a(r, 1) = std::cos(theta * lx);
    a(r, 2) = std::sin(theta * lx);
    a(r, 3) = 1.0;
    b(r) = sums.values[rows[static_cast<std::size_t>(r)]] / x;
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  MainTermConstants c{sums.params, coef(0), cplx{0.5 * coef(1), -0.5 * coef(2)}, coef(3),
                      ConstantsDerivation::fit_oracle, "least-squares " + range_text(lo, hi)};
  return c;
}

SmoothingTail smoothing_tail(double T, double y, cplx z, bool with_log) {
  if (!(T >= 1.0) || !(y > 0.0)) throw DomainError("smoothing_tail: need T >= 1 and y > 0");
  if (z.real() < 0.0 || z.real() > 1.0) throw DomainError("smoothing_tail: need 0 <= Re z <= 1");
  const cplx one_minus_z = 1.0 - z;
  // u = e^v: integrand e^{-e^v / y} e^{(1 - z) v} (v)
  auto f = [&](double v) {
    const cplx e = std::exp(one_minus_z * v - std::exp(v) / y);
    return with_log ? e * v : e;
  };
  const double a = std::log(T);
  const double b = std::log(T + 80.0 * y);
  const double period = z.imag() != 0.0 ? 2.0 * std::numbers::pi / std::abs(z.imag()) : 1.0;
  const double h = std::min(1.0, period);
  cplx acc = 0.0;
  for (double lo = a; lo < b; lo += h) {
    const double hi = std::min(b, lo + h);
    acc += adaptive_gauss(f, lo, hi, 1e-13, 40);
  }
  const cplx lead = std::exp(one_minus_z * std::log(T)) / (z - 1.0);
  return {acc, with_log ? lead * std::log(T) : lead};
}

DirichletPolynomial make_dirichlet_polynomial(std::vector<cplx> coefficients, std::vector<double> frequencies) {
  if (coefficients.size() != frequencies.size()) throw DomainError("DirichletPolynomial: length mismatch");
  if (coefficients.empty()) throw DomainError("DirichletPolynomial: empty");
  std::vector<double> sorted = frequencies;
  std::sort(sorted.begin(), sorted.end());
  double gap = kInf;
  for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i] - sorted[i - 1]);
  if (!(gap > 0.0)) throw DomainError("DirichletPolynomial: duplicate frequencies");
  return {std::move(coefficients), std::move(frequencies), gap};
}

MeanSquare mv_mean_square(const DirichletPolynomial& poly, double T) {
  if (!(T > 0.0)) throw DomainError("mv_mean_square: T must be positive");
  if (!(poly.min_gap > 0.0)) throw DomainError("mv_mean_square: duplicate frequencies");
  const auto [lo_it, hi_it] = std::minmax_element(poly.frequencies.begin(), poly.frequencies.end());
  const double spread = *hi_it - *lo_it;
  const double h = spread > 0.0 ? std::min(1.0, 2.0 * std::numbers::pi / spread / 4.0) : 1.0;
  const auto panels = static_cast<std::size_t>(std::ceil(T / h));
  const double step = T / static_cast<double>(panels);
  auto density = [&](double t) {
    cplx s = 0.0;
    for (std::size_t n = 0; n < poly.coefficients.size(); ++n) s += poly.coefficients[n] * std::polar(1.0, poly.frequencies[n] * t);
    return std::norm(s);
  };
  double numeric = 0.0;
  for (std::size_t k = 0; k < panels; ++k) numeric += gauss_panel(density, k * step, (k + 1) * step);
  double l2 = 0.0;
  for (const cplx& a : poly.coefficients) l2 += std::norm(a);
  return {numeric, T * l2, std::isfinite(poly.min_gap) ? l2 / poly.min_gap : 0.0};
}

}  // namespace tdl
