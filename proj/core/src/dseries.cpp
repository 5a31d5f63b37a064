#include "tdl/dseries.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "tdl/errors.hpp"
#include "tdl/quadrature.hpp"

namespace tdl {
namespace {

constexpr double kPoleGuard = 1e-10;
constexpr double kDenominatorFloor = 1e-12;

void check_not_near_zero(cplx two_s, const ZeroTable& zeros) {
  if (std::abs(two_s.real() - 0.5) > 1e-6) return;
  const double t = std::abs(two_s.imag());
  const auto& g = zeros.ordinates;
  auto it = std::lower_bound(g.begin(), g.end(), t);
  for (auto cand : {it, it == g.begin() ? it : std::prev(it)}) {
    if (cand != g.end() && std::abs(cplx{two_s.real() - 0.5, t - *cand}) < 1e-6) {
      throw SingularityError("d_series: zeta(2s) denominator vanishes (2s at tabulated zero gamma=" +
                             std::to_string(*cand) + ")");
    }
  }
}

void fnv_mix(std::uint64_t& h, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

cplx d_series(cplx s, const TwistedParams& params, const ZetaEvalPolicy& policy, const ZeroTable* zeros) {
  const double theta = params.theta();
  const cplx i_theta{0.0, theta};
  if (std::abs(s - 1.0) < kPoleGuard) throw SingularityError("d_series: pole of zeta(s)^2 at s = 1");
  if (std::abs(s + i_theta - 1.0) < kPoleGuard) throw SingularityError("d_series: pole of zeta(s + i theta) at s = 1 - i theta");
  if (std::abs(s - i_theta - 1.0) < kPoleGuard) throw SingularityError("d_series: pole of zeta(s - i theta) at s = 1 + i theta");
  if (zeros) check_not_near_zero(2.0 * s, *zeros);

  const cplx denominator = zeta(2.0 * s, policy);
  if (std::abs(denominator) < kDenominatorFloor) {
    throw SingularityError("d_series: zeta(2s) denominator near zero at s = (" + std::to_string(s.real()) + ", " +
                           std::to_string(s.imag()) + ")");
  }
  cplx numerator;
  if (s.real() >= 0.0) {
    const ZetaTriplet z = zeta_triplet(s, theta, policy);
    numerator = z.center * z.center * z.plus * z.minus;
  } else {
    const cplx zc = zeta(s, policy);
    numerator = zc * zc * zeta(s + i_theta, policy) * zeta(s - i_theta, policy);
  }
  return numerator / denominator;
}

std::string_view to_string(ConstantsDerivation d) {
  return d == ConstantsDerivation::contour_quadrature ? "contour_quadrature" : "fit_oracle";
}

std::string policy_fingerprint(const ZetaEvalPolicy& policy) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "em%d-b%d-t%.3g", policy.em_terms, policy.em_bernoulli_order,
                policy.target_abs_error);
  return buf;
}

std::string MainTermConstants::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : {params.theta(), omega1, omega_plus.real(), omega_plus.imag(), omega3}) fnv_mix(h, v);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MainTermConstants main_term_constants(const TwistedParams& params, const ZetaEvalPolicy& policy,
                                      const ContourOptions& options) {
  if (params.degenerate()) throw DomainError("main_term_constants: |theta| below floor, poles of D(s) collide");
  const double theta = params.theta();
  const double r_one = options.radius_one > 0.0 ? options.radius_one : std::min(std::abs(theta) / 2.0, 0.25);
  const double r_twist = options.radius_twist > 0.0 ? options.radius_twist : std::min(std::abs(theta) / 2.0, 0.125);
  if (r_one >= std::abs(theta) || r_twist >= std::abs(theta)) {
    throw DomainError("main_term_constants: contour radius reaches a neighbouring pole");
  }

  auto d_over_s = [&](cplx s) { return d_series(s, params, policy) / s; };
  const cplx twist_pole{1.0, theta};

  struct Raw {
    double c2, c1;
    cplx plus;
  };
  auto extract = [&](double r1, double r2) {
    return Raw{circle_moment(d_over_s, 1.0, r1, 1, options.points).real(),
               circle_moment(d_over_s, 1.0, r1, 0, options.points).real(),
               circle_moment(d_over_s, twist_pole, r2, 0, options.points)};
  };
  const Raw a = extract(r_one, r_twist);
  const Raw b = extract(r_one / 2.0, r_twist / 2.0);

  const double scale = std::abs(a.c2);
  auto agree = [&](double u, double v) { return std::abs(u - v) <= options.agreement * std::max(std::abs(u), 1e-2 * scale); };
  if (!agree(a.c2, b.c2) || !agree(a.c1, b.c1) ||
      std::abs(a.plus - b.plus) > options.agreement * std::abs(a.plus)) {
    throw NumericalError("main_term_constants: contour quadrature at radius r and r/2 disagree");
  }
  MainTermConstants c{params, a.c2, a.plus, a.c1, ConstantsDerivation::contour_quadrature, policy_fingerprint(policy)};
  return c;
}

double PowerLogSum::value(double x) const {
  const double lx = std::log(x);
  double acc = 0.0;
  for (const auto& t : terms_) {
    const cplx v = t.coefficient * std::exp(t.exponent * lx) * std::pow(lx, t.log_power);
    acc += t.conjugate_pair ? 2.0 * v.real() : v.real();
  }
  return acc;
}

double PowerLogSum::derivative(double x) const {
  const double lx = std::log(x);
  double acc = 0.0;
  for (const auto& t : terms_) {
    // d/dx c x^a L^k = c x^{a-1} (a L^k + k L^{k-1})
    cplx inner = t.exponent * std::pow(lx, t.log_power);
    if (t.log_power > 0) inner += static_cast<double>(t.log_power) * std::pow(lx, t.log_power - 1);
    const cplx v = t.coefficient * std::exp((t.exponent - 1.0) * lx) * inner;
    acc += t.conjugate_pair ? 2.0 * v.real() : v.real();
  }
  return acc;
}

PowerLogSum main_term_expansion(const MainTermConstants& c) {
  return PowerLogSum({
      {c.omega1, 1.0, 1, false},
      {c.omega_plus, cplx{1.0, c.params.theta()}, 0, true},
      {c.omega3, 1.0, 0, false},
  });
}

double main_term(double x, const MainTermConstants& constants) {
  if (!(x >= 2.0)) throw DomainError("main_term: x must be >= 2");
  return main_term_expansion(constants).value(x);
}

double main_term_derivative(double x, const MainTermConstants& constants) {
  if (!(x >= 2.0)) throw DomainError("main_term_derivative: x must be >= 2");
  return main_term_expansion(constants).derivative(x);
}

ZeroResidueTerm zero_pole_residue(double gamma, const TwistedParams& params, const ZetaEvalPolicy& policy) {
  if (gamma == 0.0 || !std::isfinite(gamma)) throw DomainError("zero_pole_residue: gamma must be finite and nonzero");
  const cplx rho{0.5, gamma};
  const cplx half = rho / 2.0;
  const cplx derivative = zeta_prime(rho, policy);
  if (std::abs(derivative) < 1e-4) {
    throw NumericalError("zero_pole_residue: |zeta'(rho)| < 1e-4 at gamma=" + std::to_string(gamma) +
                         " (non-simple zero or bad ordinate)");
  }
  if (std::abs(zeta(rho, policy)) > 1e-6 * std::max(1.0, std::abs(derivative))) {
    throw NumericalError("zero_pole_residue: gamma=" + std::to_string(gamma) + " is not a zero of zeta(1/2 + i gamma)");
  }
  const ZetaTriplet z = zeta_triplet(half, params.theta(), policy);
  const cplx coefficient = z.center * z.center * z.plus * z.minus / (2.0 * derivative * half);
  return {gamma, coefficient, half};
}

std::vector<ZeroResidueTerm> zero_residue_terms(const ZeroTable& zeros, std::size_t count, const TwistedParams& params,
                                                const ZetaEvalPolicy& policy) {
  if (count > zeros.size()) throw PreconditionError("zero_residue_terms: K exceeds the zero table size");
  std::vector<ZeroResidueTerm> terms;
  terms.reserve(count);
  for (std::size_t k = 0; k < count; ++k) terms.push_back(zero_pole_residue(zeros.ordinates[k], params, policy));
  return terms;
}

}  // namespace tdl
