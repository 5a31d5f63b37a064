#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tdl {

using cplx = std::complex<double>;

// Euler-Maclaurin evaluation parameters.
//
// em_terms is the direct-sum cutoff N. Zero selects N automatically: it
// starts at the validity floor 2 (1 + |Im s| / 2pi) and doubles until the
// remainder estimate drops below target_abs_error. An explicit N below the
// floor is rejected with RangeError.
struct ZetaEvalPolicy {
  int em_terms = 0;
  int em_bernoulli_order = 24;
  double target_abs_error = 1e-14;

  void validate() const;
  // Smallest admissible em_terms at height |Im s| = t.
  static int min_terms(double t);
  // Explicit policy whose em_terms is `factor` times the automatic choice
  // at s; used by convergence checks.
  static ZetaEvalPolicy refined(cplx s, int factor, const ZetaEvalPolicy& base);
  static ZetaEvalPolicy refined(cplx s, int factor);
};

inline constexpr double kMaxZetaHeight = 1e6;

// Riemann zeta at s != 1 (|Im s| <= 1e6). Euler-Maclaurin for Re s >= 0,
// functional equation for Re s < 0.
cplx zeta(cplx s, const ZetaEvalPolicy& policy = {});

// zeta(s), zeta(s + i shift), zeta(s - i shift) sharing one pass over the
// direct sum. Requires Re s >= 0 and none of the three arguments equal to 1.
struct ZetaTriplet {
  cplx center, plus, minus;
};
ZetaTriplet zeta_triplet(cplx s, double shift, const ZetaEvalPolicy& policy = {});

// Euler-Maclaurin N actually used for s under the policy.
int resolved_em_terms(cplx s, const ZetaEvalPolicy& policy = {});

// Derivative by the Cauchy integral over |z - s| = radius, `points`-point
// trapezoid. Throws DomainError when the circle reaches s = 1.
cplx zeta_prime(cplx s, const ZetaEvalPolicy& policy = {}, double radius = 1e-3, int points = 64);

// log Gamma(z) (Stirling with upward recursion below |z| = 10, reflection for
// Re z < 1/2). The imaginary part is not normalized to the principal branch.
cplx log_gamma(cplx z);
cplx gamma(cplx z);

// pi^{s - 1/2} Gamma((1 - s)/2) / Gamma(s/2), so zeta(s) = factor * zeta(1 - s).
cplx functional_equation_factor(cplx s);

// |zeta(s) - functional_equation_factor(s) zeta(1-s)| / |zeta(s)|,
// both zeta values from the direct evaluator.
double functional_equation_defect(cplx s, const ZetaEvalPolicy& policy = {});

// ---------------------------------------------------------------------------

inline constexpr double kFirstZeroOrdinate = 14.134725141734693790;

// Ordinates gamma_k > 0 of zeta zeros 1/2 + i gamma_k, strictly ascending.
struct ZeroTable {
  std::vector<double> ordinates;
  std::string source_label;

  std::size_t size() const noexcept { return ordinates.size(); }
};

// One positive decimal per line; '#' starts a comment line; blank lines are
// skipped. Rejects empty, non-numeric, non-positive or non-ascending input
// (ParseError carries the line number) and a first ordinate farther than
// 1e-4 from 14.134725...
ZeroTable parse_zeros(const std::string& text, const std::string& label = "<memory>");
ZeroTable load_zeros(const std::filesystem::path& path);

// --zeros PATH, else $TDL_ZEROS, else the bundled 100-zero table (if known at
// build time).
std::filesystem::path resolve_zeros_path(const std::optional<std::filesystem::path>& cli_path);

}  // namespace tdl
