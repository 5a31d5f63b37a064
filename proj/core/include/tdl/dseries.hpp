#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "tdl/params.hpp"
#include "tdl/zeta.hpp"

namespace tdl {

// D(s) = sum |tau(n, theta)|^2 n^{-s} = zeta(s)^2 zeta(s + i theta) zeta(s - i theta) / zeta(2s).
//
// Throws SingularityError naming the factor when s is within 1e-10 of 1 or
// 1 +- i theta, when |zeta(2s)| < 1e-12, or (if `zeros` is given) when 2s
// lies within 1e-6 of a tabulated zero 1/2 + i gamma.
cplx d_series(cplx s, const TwistedParams& params, const ZetaEvalPolicy& policy = {},
              const ZeroTable* zeros = nullptr);

enum class ConstantsDerivation : std::uint8_t { contour_quadrature, fit_oracle };
std::string_view to_string(ConstantsDerivation d);

// Main-term constants in phase-bearing form:
//   M(x) = omega1 x log x + 2 Re(omega_plus x^{1 + i theta}) + omega3 x.
// The cosine form of the same term is amplitude() x cos(theta log x + phase()).
struct MainTermConstants {
  TwistedParams params;
  double omega1 = 0.0;
  cplx omega_plus = 0.0;
  double omega3 = 0.0;
  ConstantsDerivation derivation = ConstantsDerivation::contour_quadrature;
  std::string policy_fingerprint;

  double amplitude() const { return 2.0 * std::abs(omega_plus); }
  double phase() const { return std::arg(omega_plus); }
  // Stable digest of theta and the three constants.
  std::string fingerprint() const;
};

struct ContourOptions {
  int points = 128;
  // <= 0 selects min(|theta|/2, 1/4) at s = 1 and min(|theta|/2, 1/8) at 1 + i theta.
  double radius_one = 0.0;
  double radius_twist = 0.0;
  // Results at the radius and at half the radius must agree to this
  // relative tolerance.
  double agreement = 1e-6;
};

// Laurent data of D(s)/s at s = 1 and the residue at s = 1 + i theta, by
// trapezoid quadrature on circles. Throws DomainError below the theta floor
// and NumericalError when the radius check fails.
MainTermConstants main_term_constants(const TwistedParams& params, const ZetaEvalPolicy& policy = {},
                                      const ContourOptions& options = {});

std::string policy_fingerprint(const ZetaEvalPolicy& policy);

// c x^{exponent} (log x)^{log_power}, optionally doubled real part (a term
// plus its complex conjugate partner).
struct PowerLogTerm {
  cplx coefficient;
  cplx exponent;
  int log_power = 0;
  bool conjugate_pair = false;
};

// Sum of power-log terms with value and exact derivative.
class PowerLogSum {
 public:
  PowerLogSum() = default;
  explicit PowerLogSum(std::vector<PowerLogTerm> terms) : terms_(std::move(terms)) {}

  double value(double x) const;
  double derivative(double x) const;
  const std::vector<PowerLogTerm>& terms() const noexcept { return terms_; }

 private:
  std::vector<PowerLogTerm> terms_;
};

PowerLogSum main_term_expansion(const MainTermConstants& constants);

// M(x) and M'(x); x >= 2 (DomainError otherwise).
double main_term(double x, const MainTermConstants& constants);
double main_term_derivative(double x, const MainTermConstants& constants);

// Residue of D(s) x^s / s at s = rho/2, rho = 1/2 + i gamma, divided by
// x^{rho/2}. Negative gamma gives the conjugate zero's term.
struct ZeroResidueTerm {
  double gamma = 0.0;
  cplx coefficient;
  cplx exponent;  // 1/4 + i gamma / 2
};

// Throws NumericalError when |zeta'(rho)| < 1e-4 (non-simple zero or bad
// ordinate).
ZeroResidueTerm zero_pole_residue(double gamma, const TwistedParams& params, const ZetaEvalPolicy& policy = {});

std::vector<ZeroResidueTerm> zero_residue_terms(const ZeroTable& zeros, std::size_t count,
                                                const TwistedParams& params, const ZetaEvalPolicy& policy = {});

}  // namespace tdl
