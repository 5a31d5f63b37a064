#include "tdl/zeta.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tdl/errors.hpp"

namespace tdl {
namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} / (2k)! for k = 1..30.
constexpr std::array<double, 30> kEmCoeff = {
    8.3333333333333333333e-2,   -1.3888888888888888889e-3,  3.3068783068783068783e-5,
    -8.2671957671957671958e-7,  2.0876756987868098979e-8,   -5.2841901386874931848e-10,
    1.3382536530684678833e-11,  -3.3896802963225828668e-13, 8.5860620562778445641e-15,
    -2.174868698558061873e-16,  5.5090028283602295152e-18,  -1.3954464685812523341e-19,
    3.5347070396294674717e-21,  -8.9535174270375468504e-23, 2.2679524523376830603e-24,
    -5.7447906688722024453e-26, 1.4551724756148649019e-27,  -3.6859949406653101782e-29,
    9.336734257095044672e-31,   -2.3650224157006299346e-32, 5.9906717624821343047e-34,
    -1.5174548844682902617e-35, 3.8437581254541882322e-37,  -9.7363530726466910353e-39,
    2.4662470442006809571e-40,  -6.2470767418207436931e-42, 1.5824030244644914298e-43,
    -4.0082736859489359685e-45, 1.0153075855569556312e-46,  -2.5718041582418717499e-48,
};

// B_{2k} / (2k (2k - 1)) for the Stirling series.
constexpr std::array<double, 10> kStirlingCoeff = {
    8.3333333333333333333e-2, -2.7777777777777777778e-3, 7.9365079365079365079e-4,
    -5.952380952380952381e-4, 8.4175084175084175084e-4,  -1.9175269175269175269e-3,
    6.4102564102564102564e-3, -2.955065359477124183e-2,  1.7964437236883057316e-1,
    -1.3924322169059011164,
};

constexpr int kMaxAutoTerms = 1 << 24;

// |B_{2k}/(2k)!| ~ 2 / (2 pi)^{2k}, used only to size the remainder.
double em_coeff_magnitude(int k) {
  if (k <= static_cast<int>(kEmCoeff.size())) return std::abs(kEmCoeff[k - 1]);
  return 2.0 * std::pow(2.0 * kPi, -2.0 * k);
}

// Phase -t log n reduced mod 2 pi in extended precision: at large t the
// double product t log n alone loses ~t log n ulps of phase per term.
double reduced_phase(long double t, long double log_n) {
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  constexpr long double inv_two_pi = 0.159154943091895335768883763372514L;
  const long double ph = -t * log_n;
  return static_cast<double>(ph - two_pi * static_cast<long double>(std::llround(ph * inv_two_pi)));
}

// log n in extended precision, tabulated for the cutoffs used in practice.
long double log_ext(int n) {
  constexpr int kTable = 1 << 16;
  static const std::vector<long double> table = [] {
    std::vector<long double> t(kTable);
    for (int k = 1; k < kTable; ++k) t[k] = std::log(static_cast<long double>(k));
    return t;
  }();
  return n < kTable ? table[n] : std::log(static_cast<long double>(n));
}

// N^{-s} with the phase reduced as above.
cplx neg_power(cplx s, int n) {
  const long double ln = log_ext(n);
  return std::polar(std::exp(-s.real() * static_cast<double>(ln)), reduced_phase(s.imag(), ln));
}

// Euler-Maclaurin tail beyond the direct sum sum_{n<N} n^{-s}.
struct EmTail {
  cplx value;
  double error;
};

EmTail em_tail(cplx s, int n_terms, int order) {
  const double n = static_cast<double>(n_terms);
  const cplx n_pow = neg_power(s, n_terms);
  cplx value = n * n_pow / (s - 1.0) + 0.5 * n_pow;
  cplx factor = s * n_pow / n;  // (s)_{2k-1} N^{-s-2k+1} at k = 1
  for (int k = 1; k <= order; ++k) {
    value += kEmCoeff[k - 1] * factor;
    factor *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k) / (n * n);
  }
  const double sig = s.real() + 2.0 * order + 1.0;
  double error = em_coeff_magnitude(order + 1) * std::abs(factor);
  if (sig > 0.0) error *= std::abs(s + (2.0 * order + 1.0)) / sig;
  return {value, error};
}

int auto_terms(cplx s, const ZetaEvalPolicy& policy) {
  int n = std::max(ZetaEvalPolicy::min_terms(std::abs(s.imag())), 10);
  while (em_tail(s, n, policy.em_bernoulli_order).error > policy.target_abs_error) {
    if (n >= kMaxAutoTerms) throw NumericalError("zeta: Euler-Maclaurin cutoff did not reach the error target");
    n *= 2;
  }
  return n;
}

int terms_for(cplx s, const ZetaEvalPolicy& policy) {
  policy.validate();
  if (std::abs(s.imag()) > kMaxZetaHeight) throw RangeError("zeta: |Im s| beyond supported range 1e6");
  if (policy.em_terms == 0) return auto_terms(s, policy);
  if (policy.em_terms < ZetaEvalPolicy::min_terms(std::abs(s.imag()))) {
    throw RangeError("zeta: em_terms=" + std::to_string(policy.em_terms) + " infeasible at |Im s|=" +
                     std::to_string(std::abs(s.imag())));
  }
  return policy.em_terms;
}

cplx direct_sum(cplx s, int n_terms) {
  cplx sum = 0.0;
  for (int n = n_terms - 1; n >= 1; --n) sum += neg_power(s, n);
  return sum;
}

cplx zeta_em(cplx s, const ZetaEvalPolicy& policy) {
  if (s == cplx{1.0, 0.0}) throw SingularityError("zeta: pole at s = 1");
  const int n = terms_for(s, policy);
  return direct_sum(s, n) + em_tail(s, n, policy.em_bernoulli_order).value;
}

// log sin(w) without overflow for large |Im w|.
cplx log_sin(cplx w) {
  if (std::abs(w.imag()) < 20.0) return std::log(std::sin(w));
  const cplx i{0.0, 1.0};
  if (w.imag() > 0.0) return -i * w + std::log(cplx{0.0, 0.5}) + std::log(1.0 - std::exp(2.0 * i * w));
  return i * w - std::log(cplx{0.0, 2.0}) + std::log(1.0 - std::exp(-2.0 * i * w));
}

bool near_nonpositive_integer(cplx z, double tol) {
  if (std::abs(z.imag()) > tol || z.real() > tol) return false;
  return std::abs(z.real() - std::round(z.real())) <= tol;
}

}  // namespace

void ZetaEvalPolicy::validate() const {
  if (em_terms < 0) throw DomainError("ZetaEvalPolicy: em_terms must be >= 0");
  if (em_bernoulli_order < 2 || em_bernoulli_order > 30) {
    throw DomainError("ZetaEvalPolicy: em_bernoulli_order must lie in [2, 30]");
  }
  if (!(target_abs_error > 0.0)) throw DomainError("ZetaEvalPolicy: target_abs_error must be positive");
}

int ZetaEvalPolicy::min_terms(double t) { return static_cast<int>(std::ceil(2.0 * (1.0 + t / (2.0 * kPi)))); }

ZetaEvalPolicy ZetaEvalPolicy::refined(cplx s, int factor, const ZetaEvalPolicy& base) {
  ZetaEvalPolicy p = base;
  p.em_terms = factor * resolved_em_terms(s, base);
  return p;
}

ZetaEvalPolicy ZetaEvalPolicy::refined(cplx s, int factor) { return refined(s, factor, ZetaEvalPolicy{}); }

int resolved_em_terms(cplx s, const ZetaEvalPolicy& policy) { return terms_for(s, policy); }

cplx zeta(cplx s, const ZetaEvalPolicy& policy) {
  if (s == cplx{1.0, 0.0}) throw SingularityError("zeta: pole at s = 1");
  if (s.real() >= 0.0) return zeta_em(s, policy);
  if (std::abs(s.imag()) > kMaxZetaHeight) throw RangeError("zeta: |Im s| beyond supported range 1e6");
  // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
  const cplx log_factor = s * std::log(2.0) + (s - 1.0) * std::log(kPi) + log_sin(0.5 * kPi * s) + log_gamma(1.0 - s);
  return std::exp(log_factor) * zeta_em(1.0 - s, policy);
}

ZetaTriplet zeta_triplet(cplx s, double shift, const ZetaEvalPolicy& policy) {
  if (s.real() < 0.0) throw DomainError("zeta_triplet: requires Re s >= 0");
  const cplx is{0.0, shift};
  const cplx args[3] = {s, s + is, s - is};
  int n = 0;
  for (const cplx& a : args) {
    if (a == cplx{1.0, 0.0}) throw SingularityError("zeta_triplet: pole at s = 1");
    n = std::max(n, terms_for(a, policy));
  }
  cplx c = 0.0, p = 0.0, m = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    const long double lk = log_ext(k);
    const double mag = std::exp(-s.real() * static_cast<double>(lk));
    c += std::polar(mag, reduced_phase(s.imag(), lk));
    p += std::polar(mag, reduced_phase(static_cast<long double>(s.imag()) + shift, lk));
    m += std::polar(mag, reduced_phase(static_cast<long double>(s.imag()) - shift, lk));
  }
  const int order = policy.em_bernoulli_order;
  return {c + em_tail(args[0], n, order).value, p + em_tail(args[1], n, order).value,
          m + em_tail(args[2], n, order).value};
}

cplx zeta_prime(cplx s, const ZetaEvalPolicy& policy, double radius, int points) {
  if (!(radius > 0.0) || points < 8) throw DomainError("zeta_prime: bad circle parameters");
  if (std::abs(s - 1.0) <= radius + 1e-8) throw DomainError("zeta_prime: evaluation circle reaches the pole s = 1");
  cplx acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double phi = 2.0 * kPi * k / points;
    const cplx e = std::polar(1.0, phi);
    acc += zeta(s + radius * e, policy) * std::conj(e);
  }
  return acc / (static_cast<double>(points) * radius);
}

cplx log_gamma(cplx z) {
  if (near_nonpositive_integer(z, 0.0)) throw SingularityError("log_gamma: pole at non-positive integer");
  if (z.real() < 0.5) return std::log(kPi) - log_sin(kPi * z) - log_gamma(1.0 - z);
  cplx shift_product = 1.0;
  cplx shift_log = 0.0;
  int steps = 0;
  while (std::abs(z) < 10.0) {
    shift_product *= z;
    z += 1.0;
    if (++steps % 8 == 0) {
      shift_log += std::log(shift_product);
      shift_product = 1.0;
    }
  }
  shift_log += std::log(shift_product);
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx power = inv;
  for (double c : kStirlingCoeff) {
    series += c * power;
    power *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift_log;
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

cplx functional_equation_factor(cplx s) {
  return std::exp((s - 0.5) * std::log(kPi) + log_gamma(0.5 * (1.0 - s)) - log_gamma(0.5 * s));
}

double functional_equation_defect(cplx s, const ZetaEvalPolicy& policy) {
  if (near_nonpositive_integer(0.5 * s, 1e-8) || near_nonpositive_integer(0.5 * (1.0 - s), 1e-8)) {
    throw SingularityError("functional_equation_defect: s adjacent to a Gamma-factor pole");
  }
  const cplx lhs = zeta_em(s, policy);
  const cplx rhs = functional_equation_factor(s) * zeta_em(1.0 - s, policy);
  return std::abs(lhs - rhs) / std::abs(lhs);
}

// ---------------------------------------------------------------------------

ZeroTable parse_zeros(const std::string& text, const std::string& label) {
  ZeroTable table;
  table.source_label = label;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const char* first = line.data() + b;
    const char* last = line.data() + e + 1;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
      throw ParseError("zeros: non-numeric entry '" + std::string(first, last) + "' in " + label, line_no);
    }
    if (!(value > 0.0)) throw ParseError("zeros: ordinates must be positive in " + label, line_no);
    if (!table.ordinates.empty() && !(value > table.ordinates.back())) {
      throw ParseError("zeros: ordinates must be strictly ascending in " + label, line_no);
    }
    if (table.ordinates.empty() && std::abs(value - kFirstZeroOrdinate) > 1e-4) {
      throw ParseError("zeros: first ordinate does not match 14.134725... in " + label, line_no);
    }
    table.ordinates.push_back(value);
  }
  if (table.ordinates.empty()) throw ParseError("zeros: no ordinates in " + label, line_no);
  return table;
}

ZeroTable load_zeros(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("zeros: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_zeros(buf.str(), path.string());
}

std::filesystem::path resolve_zeros_path(const std::optional<std::filesystem::path>& cli_path) {
  if (cli_path && !cli_path->empty()) return *cli_path;
  if (const char* env = std::getenv("TDL_ZEROS"); env && *env) return env;
#ifdef TDL_DEFAULT_ZEROS_PATH
  return TDL_DEFAULT_ZEROS_PATH;
#else
  throw PreconditionError("no zeros table: pass --zeros PATH or set TDL_ZEROS");
#endif
}

}  // namespace tdl
