#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tdl/params.hpp"

namespace tdl {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Single-n evaluation
// ---------------------------------------------------------------------------

struct PrimePower {
  std::uint64_t prime;
  int exponent;
};

// Prime factorization of n >= 1 (Miller-Rabin + Pollard-Brent), ascending
// primes. factorize(1) is empty.
std::vector<PrimePower> factorize(std::uint64_t n);

// tau(n, theta) = sum_{d | n} d^{i theta}, built as the product over p^a || n
// of sum_{j=0}^{a} p^{i j theta}. Throws DomainError for n = 0.
cplx tau(std::uint64_t n, const TwistedParams& params);

// |tau(n, theta)|^2.
double tau_sq(std::uint64_t n, const TwistedParams& params);

// Number of divisors d(n).
std::uint64_t divisor_count(std::uint64_t n);

// ---------------------------------------------------------------------------
// Range sieves
// ---------------------------------------------------------------------------

enum class SieveStrategy : std::uint8_t {
  // Adds d^{i theta} into every multiple of d (folded at sqrt(n), the
  // cofactor contribution is n^{i theta} * conj(d^{i theta})).
  divisor_add = 0,
  // Strips prime powers with a per-segment smallest-prime sieve and builds
  // tau multiplicatively.
  spf_multiplicative = 1,
};

enum class BoundaryConvention : std::uint8_t {
  // A checkpoint x that is an integer counts n = x with weight 1/2.
  half_weight_at_integer = 0,
  full_weight = 1,
};

std::string_view to_string(SieveStrategy s);
std::string_view to_string(BoundaryConvention c);
SieveStrategy parse_sieve_strategy(std::string_view name);
BoundaryConvention parse_boundary_convention(std::string_view name);

// Precomputed tables for one strategy and all n < limit. fill() is const and
// may be called concurrently from several threads.
class TauSieve {
 public:
  TauSieve(const TwistedParams& params, SieveStrategy strategy, std::uint64_t limit);

  // out[i] = tau(lo + i, theta) for i < out.size(); requires lo >= 1 and
  // lo + out.size() <= limit.
  void fill(std::uint64_t lo, std::span<cplx> out) const;

  SieveStrategy strategy() const noexcept { return strategy_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  void fill_divisor_add(std::uint64_t lo, std::span<cplx> out) const;
  void fill_spf(std::uint64_t lo, std::span<cplx> out) const;

  double theta_;
  SieveStrategy strategy_;
  std::uint64_t limit_;
  std::uint64_t root_;  // floor(sqrt(limit - 1))
  // divisor_add: unit[d] = d^{i theta} for d <= root.
  std::vector<cplx> unit_;
  // spf_multiplicative: primes <= root with geometric sums
  // sum_{j<=a} p^{i j theta} stored at geo_[geo_offset_[k] + a - 1].
  std::vector<std::uint64_t> primes_;
  std::vector<std::size_t> geo_offset_;
  std::vector<cplx> geo_;
};

// Convenience: tau(n) for n in [lo, hi).
std::vector<cplx> tau_range(std::uint64_t lo, std::uint64_t hi, const TwistedParams& params,
                            SieveStrategy strategy);

struct PartialSumSeries {
  TwistedParams params;
  std::vector<double> grid;
  std::vector<double> values;
  BoundaryConvention boundary_convention = BoundaryConvention::half_weight_at_integer;
  SieveStrategy sieve_id = SieveStrategy::divisor_add;
};

struct SieveOptions {
  static constexpr std::uint64_t kDefaultSegment = std::uint64_t{1} << 22;
  // Segment buffers hold complex<double> values; beyond this the
  // configuration is rejected instead of risking a partial allocation.
  static constexpr std::uint64_t kMaxSegment = std::uint64_t{1} << 28;

  SieveStrategy strategy = SieveStrategy::divisor_add;
  BoundaryConvention convention = BoundaryConvention::half_weight_at_integer;
  std::uint64_t segment_length = kDefaultSegment;
  unsigned workers = 1;
};

// State to continue a sieve: every n < next_n has been accumulated into
// prefix (full weight).
struct SieveResume {
  std::uint64_t next_n = 1;
  double prefix = 0.0;
};

// S(x) = sum*_{n <= x} |tau(n, theta)|^2 at every checkpoint of `grid`.
// Segments are processed by `workers` threads and reduced in ascending
// order, so the result is bit-identical for any worker count.
PartialSumSeries partial_sum_sieve(double x_max, std::span<const double> grid,
                                   const TwistedParams& params, const SieveOptions& options = {},
                                   SieveResume resume = {});

// Continue `previous` up to x_max, appending the checkpoints of `grid` that
// lie beyond its last checkpoint.
PartialSumSeries resume_partial_sum_sieve(const PartialSumSeries& previous, double x_max,
                                          std::span<const double> grid,
                                          const SieveOptions& options = {});

// Geometric checkpoint grid x_0 = start, x_{k+1} = ratio * x_k while
// x_k <= stop (stop itself appended when not hit).
std::vector<double> geometric_grid(double start, double stop, double ratio);

}  // namespace tdl
