#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdl/dseries.hpp"
#include "tdl/tau_core.hpp"

namespace tdl {

// Delta(x) = S(x) - M(x) on the checkpoint grid of a sieve run.
struct DeltaSeries {
  TwistedParams params;
  std::vector<double> grid;
  std::vector<double> delta;
  std::string constants_ref;

  // Linear interpolation between checkpoints; x must lie inside the grid.
  double at(double x) const;
};

// Throws PreconditionError when the constants belong to another theta.
DeltaSeries delta_series(const PartialSumSeries& sums, const MainTermConstants& constants);

// alpha(T) = 3/8 - c / (log T)^{1/8}; T > 1, c > 0.
double alpha_of(double T, double c);

struct MomentReport {
  double T = 0.0;
  double b_exponent = 0.0;
  double y = 0.0;  // T^b, may be +inf
  double c = 0.0;
  double alpha = 0.0;
  double upper_limit = 0.0;
  double value = 0.0;
  double tail_bound = 0.0;
  std::string quadrature;
  // The omega theorem needs b >= 80; smaller b is a desk experiment outside
  // its hypothesis.
  bool within_theorem_hypothesis = false;
};

// int_T^U |Delta(x)|^2 x^{-2 alpha - 1} e^{-2x/y} dx, y = T^b, Delta
// piecewise linear between checkpoints (4-point Gauss-Legendre per cell).
// Throws PreconditionError listing the gap when the grid does not cover
// [T, U].
MomentReport smoothed_moment(const DeltaSeries& delta, double T, double c, double b_exponent, double upper_limit);

// int_X^{2X} |Delta(x)|^2 x^{-2 alpha - 1} dx.
double local_moment(const DeltaSeries& delta, double X, double alpha);

enum class ThresholdKind : std::uint8_t {
  // |Delta(x)| > lambda x^{alpha(x)}, alpha(x) = alpha_of(x, c).
  power_alpha_of_x,
  // Delta(x) > (lambda - epsilon) x^{1/4} and Delta(x) < -(lambda - epsilon) x^{1/4}.
  landau_quarter,
};
std::string_view to_string(ThresholdKind k);
ThresholdKind parse_threshold_kind(std::string_view name);

struct SetMeasure {
  std::string name;  // "A", "A1" or "A2"
  double measure_lower = 0.0;
  double measure_upper = 0.0;
};

struct ExceedanceReport {
  double X = 0.0;
  ThresholdKind threshold_kind = ThresholdKind::landau_quarter;
  double lambda = 0.0;
  double epsilon = 0.0;
  double c = 0.0;
  double sample_step = 0.0;
  std::vector<SetMeasure> sets;
};

struct ExceedanceRequest {
  double X = 0.0;
  ThresholdKind kind = ThresholdKind::landau_quarter;
  double lambda = 0.0;
  double epsilon = 0.0;
  double c = 0.05;  // used by power_alpha_of_x only
  double sample_step = 0.0;
};

// Cell counting on the checkpoints of [X, 2X]: a cell contributes its
// length to measure_lower when both endpoints exceed, to measure_upper when
// either does. Throws PreconditionError when a cell is longer than
// sample_step or the grid does not cover [X, 2X].
ExceedanceReport exceedance_measure(const DeltaSeries& delta, const ExceedanceRequest& request);

// 90th percentile (by default) of |Delta(x)| / x^{1/4} over checkpoints in [lo, hi].
double fit_landau_lambda(const DeltaSeries& delta, double lo, double hi, double quantile = 0.9);

// Number of strict sign changes of Delta over checkpoints in [lo, hi].
std::size_t count_sign_changes(const DeltaSeries& delta, double lo, double hi);

struct UpperBoundShape {
  double sup_ratio = 0.0;   // sup |Delta| / (x^{1/2} log^6 x)
  double argmax_x = 0.0;
  double max_over_x38 = 0.0;  // sup |Delta| / x^{3/8}
  double mean_over_x14 = 0.0;
  double max_abs_over_x14 = 0.0;
};
UpperBoundShape upper_bound_shape(const DeltaSeries& delta, double lo, double hi);

// Least-squares fit of S(x) over checkpoints in [lo, hi] in the basis
// {x log x, x cos(theta log x), x sin(theta log x), x}.
MainTermConstants fit_main_term_constants(const PartialSumSeries& sums, double lo, double hi);

struct SmoothingTail {
  cplx numeric;
  cplx analytic;
};

// numeric: int_T^inf e^{-u/y} u^{-z} (log u) du by adaptive Gauss-Legendre
// in log u on panels of one oscillation period 2 pi / |Im z|.
// analytic: the leading term T^{1-z}/(z-1) (times log T with with_log).
// Requires 0 <= Re z <= 1 and T >= 1.
SmoothingTail smoothing_tail(double T, double y, cplx z, bool with_log);

struct DirichletPolynomial {
  std::vector<cplx> coefficients;
  std::vector<double> frequencies;
  double min_gap = 0.0;  // min |lambda_m - lambda_n| over m != n (+inf for one term)
};

// Validates equal lengths and distinct frequencies.
DirichletPolynomial make_dirichlet_polynomial(std::vector<cplx> coefficients, std::vector<double> frequencies);

struct MeanSquare {
  double numeric = 0.0;  // int_0^T |sum a_n e^{i lambda_n t}|^2 dt
  double main = 0.0;     // T sum |a_n|^2
  double mv_window = 0.0;  // (1 / delta) sum |a_n|^2
};

inline constexpr double kMontgomeryVaughanConstant = 3.0 * 3.14159265358979323846;

MeanSquare mv_mean_square(const DirichletPolynomial& poly, double T);

}  // namespace tdl
