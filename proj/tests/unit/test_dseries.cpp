#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "tdl/dseries.hpp"
#include "tdl/errors.hpp"
#include "tdl/tau_core.hpp"

using namespace tdl;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace

TEST(DSeries, DirichletSumAtLargeRealPart) {
  const TwistedParams params(1.0);
  const cplx s{4.0, 1.5};
  cplx direct = 0.0;
  for (std::uint64_t n = 20000; n >= 1; --n) direct += tau_sq(n, params) * std::exp(-s * std::log(static_cast<double>(n)));
  EXPECT_LT(rel(d_series(s, params), direct), 1e-11);
}

TEST(DSeries, FrozenReferenceValues) {
  const TwistedParams params(1.0);
  EXPECT_LT(rel(d_series({2.0, 0.5}, params), {2.7594316991057033426, -1.7253894965447131596}), 1e-11);
  EXPECT_LT(rel(d_series({0.375, 100.0}, params), {2.3008750418607670217, 2.0894755935466849152}), 1e-10);
}

TEST(DSeries, RealOnRealAxisAndConjugateSymmetric) {
  const TwistedParams params(2.0);
  const cplx s{0.4, 37.0};
  EXPECT_LT(std::abs(d_series(std::conj(s), params) - std::conj(d_series(s, params))), 1e-12 * std::abs(d_series(s, params)));
  EXPECT_LT(std::abs(d_series(3.0, params).imag()), 1e-14);
}

TEST(DSeries, SingularitiesNamed) {
  const TwistedParams params(1.0);
  try {
    d_series({1.0, 1.0}, params);
    FAIL();
  } catch (const SingularityError& e) {
    EXPECT_NE(std::string(e.what()).find("zeta(s - i theta)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(d_series(1.0, params), SingularityError);
  const auto zeros = parse_zeros("14.134725141734693790\n");
  EXPECT_THROW(d_series({0.25, 0.5 * 14.134725141734693790}, params, {}, &zeros), SingularityError);
}

TEST(Constants, OmegaOneClosedForm) {
  for (double theta : {0.5, 1.0, 2.0, 7.0}) {
    const TwistedParams params(theta);
    const auto c = main_term_constants(params);
    const double ref = std::norm(zeta({1.0, theta})) / zeta(2.0).real();
    EXPECT_LT(std::abs(c.omega1 - ref) / ref, 1e-10) << theta;
  }
}

TEST(Constants, ResidueAtTwistClosedForm) {
  for (double theta : {0.5, 1.0, 3.0}) {
    const cplx r{1.0, theta};
    const cplx ref = zeta(r) * zeta(r) * zeta({1.0, 2.0 * theta}) / (zeta({2.0, 2.0 * theta}) * r);
    EXPECT_LT(rel(main_term_constants(TwistedParams(theta)).omega_plus, ref), 1e-9) << theta;
  }
}

TEST(Constants, OmegaThreeFiniteDifferenceOracle) {
  // D(s)/s = zeta(s)^2 g(s), zeta(s)^2 = (s-1)^{-2} + 2 gamma (s-1)^{-1} + ...
  for (double theta : {0.5, 1.0, 2.0}) {
    auto g = [&](double s) {
      return (zeta({s, theta}) * zeta({s, -theta}) / (zeta(2.0 * s) * s)).real();
    };
    const double h = 1e-4;
    const double gp = (g(1 + 2 * h) * -1.0 + 8.0 * g(1 + h) - 8.0 * g(1 - h) + g(1 - 2 * h)) / (12.0 * h);
    const double ref = gp + 2.0 * kEulerGamma * g(1.0);
    const auto c = main_term_constants(TwistedParams(theta));
    EXPECT_NEAR(c.omega3, ref, 1e-8 * std::abs(ref)) << theta;
  }
  EXPECT_NEAR(main_term_constants(TwistedParams(1.0)).omega3, 1.7140606439916135182, 1e-9);
}

TEST(Constants, RadiusChoiceDoesNotMatter) {
  const TwistedParams params(1.0);
  ContourOptions a, b;
  a.radius_one = 0.1;
  a.radius_twist = 0.05;
  b.radius_one = 0.3;
  b.radius_twist = 0.2;
  const auto ca = main_term_constants(params, {}, a), cb = main_term_constants(params, {}, b);
  EXPECT_NEAR(ca.omega1, cb.omega1, 1e-11);
  EXPECT_NEAR(ca.omega3, cb.omega3, 1e-10);
  EXPECT_LT(std::abs(ca.omega_plus - cb.omega_plus), 1e-11);
  EXPECT_EQ(ca.derivation, ConstantsDerivation::contour_quadrature);
}

TEST(Constants, FingerprintStableAndSensitive) {
  const auto a = main_term_constants(TwistedParams(1.0));
  const auto b = main_term_constants(TwistedParams(1.0));
  const auto c = main_term_constants(TwistedParams(1.5));
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(Constants, ThetaBelowFloorRejected) {
  EXPECT_THROW(main_term_constants(TwistedParams::unchecked(1e-5)), DomainError);
}

TEST(MainTerm, ExpansionAndDerivative) {
  const auto c = main_term_constants(TwistedParams(1.0));
  for (double x : {10.0, 1234.5, 1e6}) {
    const double lx = std::log(x);
    const double ref = c.omega1 * x * lx + 2.0 * (c.omega_plus * std::exp(cplx(1.0, 1.0) * lx)).real() + c.omega3 * x;
    EXPECT_NEAR(main_term(x, c), ref, 1e-12 * std::abs(ref));
    const double h = 1e-4 * x;
    const double fd = (main_term(x + h, c) - main_term(x - h, c)) / (2 * h);
    EXPECT_NEAR(main_term_derivative(x, c), fd, 1e-7 * std::abs(fd));
  }
  EXPECT_THROW(main_term(1.5, c), DomainError);
}

TEST(MainTerm, AsymptoticToPartialSums) {
  const TwistedParams params(1.0);
  const auto c = main_term_constants(params);
  const std::vector<double> grid{1e5, 2e5};
  const auto s = partial_sum_sieve(2e5, grid, params);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LT(std::abs(s.values[i] - main_term(grid[i], c)), 10.0 * std::pow(grid[i], 0.375));
  }
}

TEST(ZeroResidue, FirstZeroReferenceAndContourOracle) {
  const TwistedParams params(1.0);
  const double g1 = 14.134725141734693790;
  const auto term = zero_pole_residue(g1, params);
  EXPECT_LT(rel(term.coefficient, {0.13821433730642479245, -0.015905994294032308672}), 1e-8);
  EXPECT_EQ(term.exponent, cplx(0.25, 0.5 * g1));
  auto integrand = [&](cplx s) { return d_series(s, params) / s; };
  const cplx res = oracle::laurent(integrand, cplx(0.25, 0.5 * g1), 1e-2, 0, 128);
  EXPECT_LT(rel(term.coefficient, res), 1e-7);
  const auto conj_term = zero_pole_residue(-g1, params);
  EXPECT_LT(std::abs(conj_term.coefficient - std::conj(term.coefficient)), 1e-12);
}

TEST(ZeroResidue, RejectsNonZero) {
  EXPECT_THROW(zero_pole_residue(15.0, TwistedParams(1.0)), NumericalError);
}

TEST(DSeries, ClosedFormAtThetaZero) {
  const double pi4 = std::pow(std::numbers::pi, 4);
  EXPECT_NEAR(d_series(2.0, TwistedParams::unchecked(0.0)).real(), 5.0 * pi4 / 72.0, 1e-9);
}

TEST(DSeries, TruncatedDirichletSums) {
  const TwistedParams params(1.0);
  double direct = 0.0;
  for (std::uint64_t n = 10000; n >= 1; --n) direct += tau_sq(n, params) / std::pow(static_cast<double>(n), 3.0);
  EXPECT_NEAR(d_series(3.0, params).real(), direct, 1e-5);
  const cplx s{2.0, 5.0};
  EXPECT_LT(std::abs(d_series(std::conj(s), params) - std::conj(d_series(s, params))), 1e-13);
}

TEST(DSeriesProperty, DirichletTailDecay) {
  // Fit C once at (Re s, N) = (2, 1e3), then check the bound elsewhere.
  const TwistedParams params(1.0);
  auto tail = [&](cplx s, std::uint64_t N) {
    cplx acc = 0.0;
    for (std::uint64_t n = N; n >= 1; --n) acc += tau_sq(n, params) * std::exp(-s * std::log(static_cast<double>(n)));
    return std::abs(d_series(s, params) - acc);
  };
  auto bound = [](double sigma, double N) { return std::pow(N, 1.0 - sigma + 0.1); };
  const double C = 4.0 * tail({2.0, 0.0}, 1000) / bound(2.0, 1000);
  for (double sigma : {1.5, 2.0, 2.5, 3.0}) {
    for (std::uint64_t N : {1000u, 10000u}) {
      for (double t : {0.0, 7.0}) {
        EXPECT_LE(tail({sigma, t}, N), C * bound(sigma, static_cast<double>(N))) << sigma << " " << N << " " << t;
      }
    }
  }
}

TEST(Constants, HalvedRadiusAndRefinedPolicy) {
  const TwistedParams params(1.0);
  ContourOptions half;
  half.radius_one = 0.125;
  half.radius_twist = 0.0625;
  const auto a = main_term_constants(params);
  const auto b = main_term_constants(params, {}, half);
  ZetaEvalPolicy fine;
  fine.em_bernoulli_order = 30;
  fine.target_abs_error = 1e-15;
  const auto c = main_term_constants(params, fine);
  for (const auto* o : {&b, &c}) {
    EXPECT_NEAR(o->omega1, a.omega1, 1e-8 * a.omega1);
    EXPECT_NEAR(o->omega3, a.omega3, 1e-8 * a.omega3);
    EXPECT_LT(std::abs(o->omega_plus - a.omega_plus), 1e-8 * std::abs(a.omega_plus));
  }
}

TEST(ConstantsProperty, ParityInTheta) {
  for (double theta : {0.7, 2.5}) {
    const auto p = main_term_constants(TwistedParams(theta));
    const auto m = main_term_constants(TwistedParams(-theta));
    EXPECT_NEAR(p.omega1, m.omega1, 1e-12);
    EXPECT_NEAR(p.omega3, m.omega3, 1e-10);
    EXPECT_LT(std::abs(m.omega_plus - std::conj(p.omega_plus)), 1e-12);
    EXPECT_GT(p.omega1, 0.0);
  }
}

TEST(MainTerm, DegenerateConstantsAndLeadingTerm) {
  MainTermConstants unit{TwistedParams(1.0)};
  unit.omega3 = 1.0;
  EXPECT_DOUBLE_EQ(main_term(1e5, unit), 1e5);
  const auto c = main_term_constants(TwistedParams(1.0));
  const double h = 1e-3 * 1e5;
  const double fd = (main_term(1e5 + h, c) - main_term(1e5 - h, c)) / (2.0 * h);
  EXPECT_NEAR(main_term_derivative(1e5, c), fd, 1e-6 * std::abs(fd));
}

TEST(ZeroResidue, TableTermsAndStability) {
  const TwistedParams params(1.0);
  const auto zeros = load_zeros(resolve_zeros_path(std::nullopt));
  const auto terms = zero_residue_terms(zeros, zeros.size(), params);
  ASSERT_EQ(terms.size(), 100u);
  for (const auto& t : terms) EXPECT_EQ(t.exponent.real(), 0.25);
  const cplx rho_half{0.25, 0.5 * zeros.ordinates[0]};
  const auto fine = zero_pole_residue(zeros.ordinates[0], params, ZetaEvalPolicy::refined(2.0 * rho_half, 2));
  EXPECT_LT(rel(fine.coefficient, terms[0].coefficient), 1e-6);
  // Contour of D(s) x^s / s around rho/2 at x = e.
  const double e = std::exp(1.0);
  auto integrand = [&](cplx s) { return d_series(s, params) * std::exp(s) / s; };
  const cplx res = oracle::laurent(integrand, rho_half, 1e-2, 0, 128);
  EXPECT_LT(rel(res, terms[0].coefficient * std::exp(rho_half * std::log(e))), 1e-5);
}

TEST(MainTerm, LeadingTermAtTenToTheTen) {
  const auto c = main_term_constants(TwistedParams(1.0));
  const double x = 1e10;
  EXPECT_NEAR(main_term(x, c) / (x * std::log(x)), c.omega1, 1e-2);
}

TEST(MainTerm, LeadingTermRate) {
  const auto c = main_term_constants(TwistedParams(1.0));
  const double k = std::abs(c.omega3) + 2.0 * std::abs(c.omega_plus);
  for (double lx : {10.0, 23.0, 100.0, 400.0}) {
    const double x = std::exp(lx);
    const double dev = std::abs(main_term(x, c) / (x * lx) - c.omega1);
    EXPECT_LE(dev, k / lx * (1.0 + 1e-12)) << lx;
  }
  EXPECT_LT(std::abs(main_term(std::exp(400.0), c) / (std::exp(400.0) * 400.0) - c.omega1), 1e-2);
}
