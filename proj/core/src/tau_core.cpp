#include "tdl/tau_core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <new>
#include <numeric>
#include <string>
#include <thread>

#include "tdl/compensated.hpp"

namespace tdl {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 base, u64 e, u64 m) {
  u64 r = 1;
  base %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    e >>= 1;
  }
  return r;
}

// Deterministic for all 64-bit n with these bases.
bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Brent's variant of Pollard rho; n odd composite.
u64 pollard_brent(u64 n) {
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, q = 1, g = 1, ys = 2;
    const u64 m = 128;
    u64 r = 1;
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void collect_factors(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  const u64 f = pollard_brent(n);
  collect_factors(f, out);
  collect_factors(n / f, out);
}

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

cplx unit_power(double theta, u64 n) { return std::polar(1.0, theta * std::log(static_cast<double>(n))); }

// sum_{j=0}^{a} p^{i j theta}
cplx geometric_factor(double theta, u64 p, int a) {
  const double lp = std::log(static_cast<double>(p));
  cplx s = 1.0;
  for (int j = 1; j <= a; ++j) s += std::polar(1.0, theta * lp * j);
  return s;
}

}  // namespace

std::vector<PrimePower> factorize(u64 n) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  std::vector<PrimePower> result;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}) {
    if (n % p == 0) {
      int a = 0;
      while (n % p == 0) {
        n /= p;
        ++a;
      }
      result.push_back({p, a});
    }
  }
  std::vector<u64> rest;
  collect_factors(n, rest);
  std::sort(rest.begin(), rest.end());
  for (u64 p : rest) {
    if (!result.empty() && result.back().prime == p) {
      ++result.back().exponent;
    } else {
      result.push_back({p, 1});
    }
  }
  return result;
}

cplx tau(u64 n, const TwistedParams& params) {
  if (n == 0) throw DomainError("tau: n must be positive");
  cplx value = 1.0;
  for (const auto& [p, a] : factorize(n)) value *= geometric_factor(params.theta(), p, a);
  return value;
}

double tau_sq(u64 n, const TwistedParams& params) { return std::norm(tau(n, params)); }

u64 divisor_count(u64 n) {
  if (n == 0) throw DomainError("divisor_count: n must be positive");
  u64 d = 1;
  for (const auto& pp : factorize(n)) d *= static_cast<u64>(pp.exponent + 1);
  return d;
}

std::string_view to_string(SieveStrategy s) {
  return s == SieveStrategy::divisor_add ? "divisor_add" : "spf_multiplicative";
}

std::string_view to_string(BoundaryConvention c) {
  return c == BoundaryConvention::half_weight_at_integer ? "half_weight_at_integer" : "full_weight";
}

SieveStrategy parse_sieve_strategy(std::string_view name) {
  if (name == "divisor_add" || name == "divisor") return SieveStrategy::divisor_add;
  if (name == "spf_multiplicative" || name == "spf") return SieveStrategy::spf_multiplicative;
  throw DomainError("unknown sieve strategy '" + std::string(name) + "'");
}

BoundaryConvention parse_boundary_convention(std::string_view name) {
  if (name == "half_weight_at_integer" || name == "half") return BoundaryConvention::half_weight_at_integer;
  if (name == "full_weight" || name == "full") return BoundaryConvention::full_weight;
  throw DomainError("unknown boundary convention '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

TauSieve::TauSieve(const TwistedParams& params, SieveStrategy strategy, u64 limit)
    : theta_(params.theta()), strategy_(strategy), limit_(std::max<u64>(limit, 2)) {
  root_ = isqrt(limit_ - 1);
  if (strategy_ == SieveStrategy::divisor_add) {
    unit_.resize(root_ + 1);
    for (u64 d = 1; d <= root_; ++d) unit_[d] = unit_power(theta_, d);
    return;
  }
  std::vector<char> composite(root_ + 1, 0);
  for (u64 p = 2; p <= root_; ++p) {
    if (composite[p]) continue;
    for (u64 q = p * p; q <= root_; q += p) composite[q] = 1;
    primes_.push_back(p);
    geo_offset_.push_back(geo_.size());
    const double lp = std::log(static_cast<double>(p));
    cplx sum = 1.0;
    u64 pk = 1;
    for (int a = 1; pk <= (limit_ - 1) / p; ++a) {
      pk *= p;
      sum += std::polar(1.0, theta_ * lp * a);
      geo_.push_back(sum);
    }
  }
}

void TauSieve::fill(u64 lo, std::span<cplx> out) const {
  if (lo == 0) throw DomainError("TauSieve::fill: n must be positive");
  if (lo + out.size() > limit_) throw PreconditionError("TauSieve::fill: range exceeds sieve limit");
  if (out.empty()) return;
  if (strategy_ == SieveStrategy::divisor_add) {
    fill_divisor_add(lo, out);
  } else {
    fill_spf(lo, out);
  }
}

void TauSieve::fill_divisor_add(u64 lo, std::span<cplx> out) const {
  const u64 hi = lo + out.size();
  std::fill(out.begin(), out.end(), cplx{});
  const u64 rmax = isqrt(hi - 1);
  // Divisors strictly below sqrt(n).
  for (u64 d = 1; d <= rmax; ++d) {
    const u64 e0 = std::max(d + 1, (lo + d - 1) / d);
    const cplx w = unit_[d];
    for (u64 n = d * e0; n < hi; n += d) out[n - lo] += w;
  }
  for (u64 i = 0; i < out.size(); ++i) {
    const cplx small = out[i];
    out[i] = small + unit_power(theta_, lo + i) * std::conj(small);
  }
  for (u64 m = isqrt(lo - 1) + 1; m <= rmax; ++m) {
    const u64 sq = m * m;
    if (sq >= lo && sq < hi) out[sq - lo] += unit_[m];
  }
}

void TauSieve::fill_spf(u64 lo, std::span<cplx> out) const {
  const u64 hi = lo + out.size();
  std::vector<u64> rest(out.size());
  std::iota(rest.begin(), rest.end(), lo);
  std::fill(out.begin(), out.end(), cplx{1.0, 0.0});
  const u64 rmax = isqrt(hi - 1);
  for (std::size_t k = 0; k < primes_.size() && primes_[k] <= rmax; ++k) {
    const u64 p = primes_[k];
    const cplx* geo = geo_.data() + geo_offset_[k];
    for (u64 n = (lo + p - 1) / p * p; n < hi; n += p) {
      const u64 i = n - lo;
      u64 r = rest[i] / p;
      int a = 1;
      while (r % p == 0) {
        r /= p;
        ++a;
      }
      rest[i] = r;
      out[i] *= geo[a - 1];
    }
  }
  for (u64 i = 0; i < out.size(); ++i) {
    if (rest[i] > 1) out[i] *= cplx{1.0, 0.0} + unit_power(theta_, rest[i]);
  }
}

std::vector<cplx> tau_range(u64 lo, u64 hi, const TwistedParams& params, SieveStrategy strategy) {
  if (hi < lo) throw DomainError("tau_range: hi < lo");
  std::vector<cplx> out(hi - lo);
  if (out.empty()) return out;
  TauSieve sieve(params, strategy, hi);
  sieve.fill(lo, out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct CheckpointHit {
  std::size_t index;
  CompensatedSum local;
};

struct SegmentResult {
  CompensatedSum total;
  std::vector<CheckpointHit> hits;
};

}  // namespace

PartialSumSeries partial_sum_sieve(double x_max, std::span<const double> grid, const TwistedParams& params,
                                   const SieveOptions& options, SieveResume resume) {
  if (!std::isfinite(x_max) || x_max < 1.0) throw DomainError("partial_sum_sieve: x_max must be >= 1");
  if (x_max >= 9.0e15) throw RangeError("partial_sum_sieve: x_max beyond supported range");
  if (options.segment_length == 0 || options.segment_length > SieveOptions::kMaxSegment) {
    throw PreconditionError("partial_sum_sieve: segment length " + std::to_string(options.segment_length) +
                            " outside [1, 2^28]; refusing an out-of-memory configuration");
  }
  if (options.workers == 0) throw PreconditionError("partial_sum_sieve: workers must be >= 1");
  if (resume.next_n == 0) throw PreconditionError("partial_sum_sieve: resume point must be >= 1");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] <= 0.0) throw PreconditionError("partial_sum_sieve: checkpoints must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw PreconditionError("partial_sum_sieve: grid must be strictly ascending");
  }
  if (!grid.empty() && grid.back() > x_max) {
    throw PreconditionError("partial_sum_sieve: checkpoint " + std::to_string(grid.back()) + " beyond x_max " +
                            std::to_string(x_max));
  }

  const bool half = options.convention == BoundaryConvention::half_weight_at_integer;
  const u64 n_end = static_cast<u64>(std::floor(x_max)) + 1;  // exclusive
  const u64 start = resume.next_n;

  PartialSumSeries series{params, std::vector<double>(grid.begin(), grid.end()), std::vector<double>(grid.size(), 0.0),
                          options.convention, options.strategy};

  // Checkpoints resolved entirely by the resume prefix.
  std::size_t first = 0;
  while (first < grid.size() && std::floor(grid[first]) < static_cast<double>(start)) {
    const double x = grid[first];
    if (std::floor(x) + 1.0 != static_cast<double>(start) || (half && x == std::floor(x) && start > 1)) {
      throw PreconditionError("partial_sum_sieve: checkpoint " + std::to_string(x) + " precedes the resume point");
    }
    series.values[first] = resume.prefix;
    ++first;
  }
  if (start >= n_end) {
    for (std::size_t i = first; i < grid.size(); ++i) series.values[i] = resume.prefix;
    return series;
  }

  const u64 seg = options.segment_length;
  const u64 num_segments = (n_end - start + seg - 1) / seg;
  std::vector<SegmentResult> results(num_segments);
  // Checkpoint ranges per segment.
  std::vector<std::size_t> seg_first(num_segments + 1, grid.size());
  {
    std::size_t g = first;
    for (u64 k = 0; k < num_segments; ++k) {
      seg_first[k] = g;
      const double seg_hi = static_cast<double>(std::min(n_end, start + (k + 1) * seg));
      while (g < grid.size() && std::floor(grid[g]) < seg_hi) ++g;
    }
    seg_first[num_segments] = g;
  }

  const TauSieve sieve(params, options.strategy, n_end);
  std::atomic<u64> next_segment{0};
  std::mutex error_mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    try {
      std::vector<cplx> buffer;
      buffer.reserve(static_cast<std::size_t>(std::min<u64>(seg, n_end - start)));
      for (u64 k = next_segment.fetch_add(1); k < num_segments; k = next_segment.fetch_add(1)) {
        const u64 lo = start + k * seg;
        const u64 hi = std::min(n_end, lo + seg);
        buffer.resize(static_cast<std::size_t>(hi - lo));
        sieve.fill(lo, buffer);
        SegmentResult& res = results[k];
        std::size_t g = seg_first[k];
        const std::size_t g_end = seg_first[k + 1];
        for (u64 i = 0; i < hi - lo; ++i) {
          const double a = std::norm(buffer[i]);
          res.total.add(a);
          const double n = static_cast<double>(lo + i);
          while (g < g_end && std::floor(grid[g]) == n) {
            CompensatedSum at = res.total;
            if (half && grid[g] == n) at.add(-0.5 * a);
            res.hits.push_back({g, at});
            ++g;
          }
        }
      }
    } catch (const std::bad_alloc&) {
      std::lock_guard lock(error_mutex);
      failure = std::make_exception_ptr(PreconditionError("partial_sum_sieve: segment allocation failed"));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      failure = std::current_exception();
    }
  };

  const unsigned nthreads = static_cast<unsigned>(std::min<u64>(options.workers, num_segments));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  CompensatedSum running(resume.prefix);
  for (const auto& res : results) {
    for (const auto& hit : res.hits) {
      CompensatedSum at = running;
      at.add(hit.local);
      series.values[hit.index] = at.value();
    }
    running.add(res.total);
  }
  // Checkpoints in (floor(x_max), x_max] cannot exist, all are assigned.
  return series;
}

PartialSumSeries resume_partial_sum_sieve(const PartialSumSeries& previous, double x_max, std::span<const double> grid,
                                          const SieveOptions& options) {
  SieveOptions opts = options;
  opts.convention = previous.boundary_convention;
  if (previous.grid.empty()) return partial_sum_sieve(x_max, grid, previous.params, opts);

  const double last_x = previous.grid.back();
  const double last_s = previous.values.back();
  SieveResume resume;
  resume.next_n = static_cast<u64>(std::floor(last_x)) + 1;
  resume.prefix = last_s;
  if (previous.boundary_convention == BoundaryConvention::half_weight_at_integer && last_x == std::floor(last_x)) {
    resume.prefix += 0.5 * tau_sq(static_cast<u64>(last_x), previous.params);
  }
  std::vector<double> tail;
  for (double x : grid) {
    if (x > last_x) tail.push_back(x);
  }
  PartialSumSeries extra = partial_sum_sieve(std::max(x_max, last_x), tail, previous.params, opts, resume);
  PartialSumSeries merged = previous;
  merged.grid.insert(merged.grid.end(), extra.grid.begin(), extra.grid.end());
  merged.values.insert(merged.values.end(), extra.values.begin(), extra.values.end());
  return merged;
}

std::vector<double> geometric_grid(double start, double stop, double ratio) {
  if (!(start > 0.0) || !(stop >= start) || !(ratio > 1.0)) {
    throw DomainError("geometric_grid: need 0 < start <= stop and ratio > 1");
  }
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double x = start * std::pow(ratio, k);
    if (x > stop) break;
    grid.push_back(x);
  }
  if (grid.back() < stop) grid.push_back(stop);
  return grid;
}

}  // namespace tdl
