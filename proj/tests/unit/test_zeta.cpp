#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>

#include "oracles.hpp"
#include "tdl/errors.hpp"
#include "tdl/zeta.hpp"

using namespace tdl;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Reference values from an independent 40-digit evaluation.
struct Frozen {
  cplx s, value;
};
const Frozen kZetaValues[] = {
    {{0.5, 10.0}, {1.5448952202967527669, -0.11533646527127337544}},
    {{3.0, 4.0}, {0.89055490696507325814, -0.0080759454243272598468}},
    {{-2.5, 3.0}, {0.068763679033646481628, 0.13398028393783442697}},
    {{0.25, 1000.0}, {-1.5149547957182149629, 2.7471194548092950591}},
    {{2.0, -7.0}, {1.02207496985339132, -0.17354853780217450824}},
    {{-7.3, 0.4}, {0.0047869913688542114444, 0.0009228991333975999492}},
    {{0.5, 5000.0}, {0.40684271363543255898, -0.69376415919808510245}},
};

}  // namespace

TEST(Zeta, ClosedForms) {
  EXPECT_LT(std::abs(zeta(2.0) - kPi * kPi / 6.0), 1e-14);
  EXPECT_LT(std::abs(zeta(4.0) - std::pow(kPi, 4) / 90.0), 1e-14);
  EXPECT_LT(std::abs(zeta(0.0) + 0.5), 1e-14);
  EXPECT_LT(std::abs(zeta(-1.0) + 1.0 / 12.0), 1e-13);
  EXPECT_LT(std::abs(zeta(-3.0) - 1.0 / 120.0), 1e-13);
  EXPECT_LT(std::abs(zeta(-2.0)), 1e-13);
  EXPECT_LT(std::abs(zeta_prime(0.0) + 0.5 * std::log(2.0 * kPi)), 1e-12);
}

TEST(Zeta, FrozenReferenceValues) {
  for (const auto& f : kZetaValues) EXPECT_LT(rel(zeta(f.s), f.value), 1e-11) << f.s;
}

TEST(Zeta, DerivativeReference) {
  const cplx ref{0.71450679084377599238, 1.0052408839470131555};
  EXPECT_LT(rel(zeta_prime({0.5, 20.0}), ref), 1e-9);
}

TEST(ZetaProperty, DerivativeMatchesFiniteDifference) {
  for (cplx s : {cplx{2.0, 0.0}, cplx{2.0, 3.0}, cplx{0.3, 40.0}, cplx{-1.5, 2.0}}) {
    const double h = 1e-5;
    const cplx fd = (zeta(s + h) - zeta(s - h)) / (2.0 * h);
    EXPECT_LT(std::abs(zeta_prime(s) - fd), 1e-7 * std::max(1.0, std::abs(fd)));
  }
}

TEST(ZetaProperty, ReflectionSymmetry) {
  for (cplx s : {cplx{0.2, 17.0}, cplx{1.7, 3.0}, cplx{-0.8, 50.0}}) {
    EXPECT_LT(std::abs(zeta(std::conj(s)) - std::conj(zeta(s))), 1e-13 * std::abs(zeta(s)));
  }
}

TEST(ZetaProperty, RefinementStability) {
  for (cplx s : {cplx{0.5, 100.0}, cplx{0.9, 2000.0}, cplx{0.1, 3.0}}) {
    const cplx a = zeta(s);
    const cplx b = zeta(s, ZetaEvalPolicy::refined(s, 4));
    EXPECT_LT(rel(a, b), 1e-12) << s;
  }
}

TEST(ZetaProperty, FunctionalEquationDefectOnGrid) {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const cplx s{0.2 + 0.6 * i / 9.0, 5.0 + 495.0 * j / 9.0};
      EXPECT_LT(functional_equation_defect(s), 1e-7) << s;
    }
  }
}

TEST(ZetaProperty, FunctionalEquationSpotValues) {
  EXPECT_LT(functional_equation_defect({0.3, 20.0}), 1e-8);
  EXPECT_LT(functional_equation_defect({0.5, 50.0}), 1e-8);
  EXPECT_LT(functional_equation_defect(0.5), 1e-10);
  EXPECT_LT(functional_equation_defect({0.7, 3.0}), 1e-8);
  // Across Re s = 0 the two evaluation routes meet.
  EXPECT_LT(rel(zeta({-1e-9, 9.0}), zeta({1e-9, 9.0})), 1e-7);
}

TEST(ZetaProperty, DoubledTermsStable) {
  oracle::Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const cplx s{rng.real(0.0, 3.0), rng.real(-1000.0, 1000.0)};
    const cplx a = zeta(s);
    const cplx b = zeta(s, ZetaEvalPolicy::refined(s, 2));
    ASSERT_LT(std::abs(a - b), 1e-14 * std::max(1.0, std::abs(a))) << s;
  }
}

TEST(ZetaProperty, DirichletSumAtThree) {
  oracle::Rng rng(22);
  for (int i = 0; i < 20; ++i) {
    const cplx s{3.0, rng.real(-50.0, 50.0)};
    cplx direct = 0.0;
    for (int n = 10000; n >= 1; --n) direct += std::exp(-s * std::log(static_cast<double>(n)));
    EXPECT_LE(std::abs(zeta(s) - direct), 2e-8);
  }
}

TEST(Zeta, DerivativeNonzeroAtFirstZero) {
  EXPECT_GT(std::abs(zeta_prime({0.5, kFirstZeroOrdinate})), 1e-3);
}

TEST(Zeta, TripletMatchesSeparateEvaluations) {
  const cplx s{0.375, 123.0};
  const auto t = zeta_triplet(s, 1.0);
  EXPECT_LT(rel(t.center, zeta(s)), 1e-12);
  EXPECT_LT(rel(t.plus, zeta(s + cplx(0, 1))), 1e-12);
  EXPECT_LT(rel(t.minus, zeta(s - cplx(0, 1))), 1e-12);
}

TEST(Zeta, Errors) {
  EXPECT_THROW(zeta(1.0), SingularityError);
  EXPECT_THROW(zeta({0.5, 2e6}), RangeError);
  ZetaEvalPolicy low;
  low.em_terms = 3;
  EXPECT_THROW(zeta({0.5, 1000.0}, low), RangeError);
  ZetaEvalPolicy bad;
  bad.em_bernoulli_order = 40;
  EXPECT_THROW(zeta(2.0, bad), DomainError);
  EXPECT_THROW(zeta_prime({1.0005, 0.0}), DomainError);
  EXPECT_THROW(functional_equation_defect(-2.0), SingularityError);
}

TEST(Zeta, AutomaticTermsRespectFloor) {
  for (double t : {0.0, 100.0, 10000.0}) {
    EXPECT_GE(resolved_em_terms({0.5, t}), ZetaEvalPolicy::min_terms(t));
  }
}

TEST(LogGamma, ReferenceAndRecurrence) {
  // log_gamma fixes no branch: compare real parts and the exponentials.
  const cplx lg = log_gamma({3.0, 4.0});
  EXPECT_NEAR(lg.real(), -1.7566267846037841105, 1e-13);
  EXPECT_LT(std::abs(std::exp(lg) - std::exp(cplx(-1.7566267846037841105, 4.7426644380346579282))), 1e-14);
  EXPECT_LT(std::abs(std::exp(log_gamma({0.2, -7.0})) -
                     std::exp(cplx(-10.660245035487833116, -6.1496540620873310195))),
            1e-13 * std::exp(-10.66));
  for (double x : {0.1, 0.5, 1.5, 7.25, 30.0}) EXPECT_NEAR(log_gamma(x).real(), std::lgamma(x), 1e-13 * std::max(1.0, std::lgamma(x)));
  EXPECT_LT(std::abs(tdl::gamma(cplx(0.5)) - std::sqrt(kPi)), 1e-14);
  const cplx z{0.3, 2.2};
  EXPECT_LT(rel(tdl::gamma(z + 1.0), z * tdl::gamma(z)), 1e-13);
  EXPECT_LT(rel(tdl::gamma(cplx{-2.5, 0.5}) * tdl::gamma(cplx{3.5, -0.5}), kPi / std::sin(kPi * cplx{-2.5, 0.5})), 1e-12);
}

TEST(Zeros, BundledTableVanishes) {
  const auto table = load_zeros(resolve_zeros_path(std::nullopt));
  ASSERT_EQ(table.size(), 100u);
  EXPECT_NEAR(table.ordinates.front(), kFirstZeroOrdinate, 1e-12);
  for (double g : table.ordinates) EXPECT_LT(std::abs(zeta({0.5, g})), 1e-9) << g;
}

TEST(Zeros, ParserRejectsMalformedInput) {
  auto line_of = [](const std::string& text) {
    try {
      parse_zeros(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("# header\n14.134725141734693\nabc\n"), 3u);
  EXPECT_EQ(line_of("14.134725141734693\n21.02\n20.0\n"), 3u);
  EXPECT_EQ(line_of("14.134725141734693\n-3\n"), 2u);
  EXPECT_EQ(line_of("15.0\n"), 1u);
  EXPECT_THROW(parse_zeros("# only comments\n\n"), ParseError);
  const auto ok = parse_zeros("# c\n\n14.134725141734693\n  21.022039638771555  \n");
  EXPECT_EQ(ok.size(), 2u);
}

TEST(Zeros, PathResolutionOrder) {
  EXPECT_EQ(resolve_zeros_path(std::filesystem::path("/x/y")), std::filesystem::path("/x/y"));
  ::setenv("TDL_ZEROS", "/from/env", 1);
  EXPECT_EQ(resolve_zeros_path(std::nullopt), std::filesystem::path("/from/env"));
  ::unsetenv("TDL_ZEROS");
  EXPECT_THROW(load_zeros("/nonexistent/zeros.txt"), IoError);
}
