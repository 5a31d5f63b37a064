#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdl/delta_lab.hpp"
#include "tdl/dseries.hpp"

namespace tdl {

struct PerronConfig {
  double sigma = 0.375;
  double t_cut = 2000.0;
  // Must not exceed 2 pi / log x for any target x.
  double panel_length = 0.5;
  double tolerance = 1e-6;
  int nodes_per_panel = 16;

  void validate() const;
  // Largest admissible panel length for targets up to x_max.
  static double max_panel_length(double x_max) { return 2.0 * 3.14159265358979323846 / std::log(x_max); }
};

// Samples g(t) = D(sigma + it) / (sigma + it) on the Gauss-Legendre nodes of
// all panels of [-t_cut, t_cut]. Independent of x, so one cache serves
// every target point. Immutable after construction.
class DLineCache {
 public:
  DLineCache(const TwistedParams& params, const PerronConfig& config, const ZetaEvalPolicy& policy = {},
             unsigned workers = 1);
  // Rehydrates a cache from stored samples (see io.hpp).
  DLineCache(double theta, PerronConfig config, std::vector<double> nodes, std::vector<double> weights,
             std::vector<cplx> values);

  double theta() const noexcept { return theta_; }
  const PerronConfig& config() const noexcept { return config_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const cplx> values() const noexcept { return values_; }
  // FNV-1a digest of the t-grid; part of the on-disk cache key.
  std::uint64_t grid_hash() const;

 private:
  double theta_;
  PerronConfig config_;
  std::vector<double> nodes_;    // ascending t
  std::vector<double> weights_;  // quadrature weight per node
  std::vector<cplx> values_;
};

struct PerronResult {
  double value = 0.0;        // Re (1/2pi) int_{-T}^{T} D(s) x^s / s dt
  double imaginary = 0.0;    // Im of the same integral, ideally 0
  double half_line = 0.0;    // (1/pi) Re int_0^T, the folded integral
  double tail_diagnostic = 0.0;
  bool imaginary_ok = false;  // |imaginary| < tolerance (|value| + 1)
};

// Throws DomainError for x < 100 and PreconditionError when the cache panel
// length is too coarse for x.
PerronResult perron_delta(double x, const DLineCache& cache);
PerronResult perron_delta(double x, const TwistedParams& params, const PerronConfig& config,
                          const ZetaEvalPolicy& policy = {});

struct ZeroModelValue {
  double value = 0.0;
  bool empty_sum = false;  // K = 0
};

// 2 sum_{k<K} Re(c_k x^{1/4 + i gamma_k / 2}).
ZeroModelValue zero_model_delta(double x, std::size_t K, std::span<const ZeroResidueTerm> terms);

// The same sum with the conjugate-zero terms evaluated separately; the
// imaginary part measures the deviation from exact conjugate symmetry.
cplx zero_model_paired(double x, std::size_t K, std::span<const ZeroResidueTerm> terms,
                       std::span<const ZeroResidueTerm> conjugate_terms);

// 2 sum_{k<K} |c_k| : with x^{1/4} a uniform bound on the model.
double zero_model_envelope(std::size_t K, std::span<const ZeroResidueTerm> terms);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

struct ReconstructionRow {
  double x = 0.0;
  double delta_sieve = 0.0;
  double delta_perron = 0.0;  // NaN when no line cache was supplied
  double delta_zero_model = 0.0;
};

struct ReconstructionReport {
  double theta = 0.0;
  std::size_t zeros_used = 0;
  std::vector<ReconstructionRow> rows;

  // Root mean square of (delta_sieve - delta_zero_model) / x^{1/4}.
  double zero_model_residual_rms() const;
  double perron_residual_rms() const;
  // Pearson r between delta_sieve / x^{1/4} and delta_zero_model / x^{1/4}.
  double zero_model_correlation() const;
};

// Every sample must be a checkpoint of `delta` (PreconditionError otherwise).
ReconstructionReport reconstruction_report(std::span<const double> x_samples, const DeltaSeries& delta,
                                           const DLineCache* perron_cache, std::size_t K,
                                           std::span<const ZeroResidueTerm> terms);

}  // namespace tdl
