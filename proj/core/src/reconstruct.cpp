#include "tdl/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "tdl/errors.hpp"
#include "tdl/quadrature.hpp"

namespace tdl {

void PerronConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 0.5)) throw DomainError("PerronConfig: sigma must lie in (0, 1/2)");
  if (!(t_cut > 0.0)) throw DomainError("PerronConfig: t_cut must be positive");
  if (!(panel_length > 0.0)) throw DomainError("PerronConfig: panel_length must be positive");
  if (!(tolerance > 0.0)) throw DomainError("PerronConfig: tolerance must be positive");
  if (nodes_per_panel < 2 || nodes_per_panel > 64) throw DomainError("PerronConfig: nodes_per_panel outside [2, 64]");
}

DLineCache::DLineCache(const TwistedParams& params, const PerronConfig& config, const ZetaEvalPolicy& policy,
                       unsigned workers)
    : theta_(params.theta()), config_(config) {
  config_.validate();
  const auto half_panels = static_cast<std::size_t>(std::ceil(config_.t_cut / config_.panel_length));
  const double h = config_.t_cut / static_cast<double>(half_panels);
  config_.panel_length = h;
  const auto& rule = gauss_legendre(config_.nodes_per_panel);
  const std::size_t per = rule.nodes.size();
  const std::size_t panels = 2 * half_panels;
  nodes_.resize(panels * per);
  weights_.resize(panels * per);
  values_.resize(panels * per);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = -config_.t_cut + static_cast<double>(p) * h;
    for (std::size_t k = 0; k < per; ++k) {
      nodes_[p * per + k] = a + 0.5 * h * (1.0 + rule.nodes[k]);
      weights_[p * per + k] = 0.5 * h * rule.weights[k];
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto work = [&]() {
    try {
      for (std::size_t p = next.fetch_add(1); p < panels; p = next.fetch_add(1)) {
        for (std::size_t k = 0; k < per; ++k) {
          const std::size_t i = p * per + k;
          const cplx s{config_.sigma, nodes_[i]};
          values_[i] = d_series(s, params, policy) / s;
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      failure = std::current_exception();
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(panels)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

DLineCache::DLineCache(double theta, PerronConfig config, std::vector<double> nodes, std::vector<double> weights,
                       std::vector<cplx> values)
    : theta_(theta), config_(config), nodes_(std::move(nodes)), weights_(std::move(weights)), values_(std::move(values)) {
  config_.validate();
  if (nodes_.size() != weights_.size() || nodes_.size() != values_.size() || nodes_.empty()) {
    throw PreconditionError("DLineCache: inconsistent sample arrays");
  }
}

std::uint64_t DLineCache::grid_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    mix(nodes_[i]);
    mix(weights_[i]);
  }
  return h;
}

PerronResult perron_delta(double x, const DLineCache& cache) {
  if (!(x >= 100.0)) throw DomainError("perron_delta: x must be >= 100");
  const PerronConfig& cfg = cache.config();
  if (cfg.panel_length > PerronConfig::max_panel_length(x) * (1.0 + 1e-12)) {
    throw PreconditionError("perron_delta: panel length exceeds 2 pi / log x for x=" + std::to_string(x));
  }
  const double lx = std::log(x);
  const double scale = std::exp(cfg.sigma * lx) / (2.0 * std::numbers::pi);
  const auto t = cache.nodes();
  const auto w = cache.weights();
  const auto g = cache.values();
  const std::size_t per = static_cast<std::size_t>(cfg.nodes_per_panel);
  const std::size_t panels = t.size() / per;
  const std::size_t half = panels / 2;

  // Panel contributions, then the integral accumulated outward from t = 0 in
  // (+, -) panel pairs so the running value over [-tau, tau] is available.
  std::vector<cplx> panel(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    cplx acc = 0.0;
    for (std::size_t k = p * per; k < (p + 1) * per; ++k) acc += w[k] * g[k] * std::polar(1.0, t[k] * lx);
    panel[p] = acc * scale;
  }
  PerronResult r;
  cplx total = 0.0;
  double positive = 0.0;
  double run_min = std::numeric_limits<double>::infinity();
  double run_max = -run_min;
  for (std::size_t j = 0; j < half; ++j) {
    const cplx up = panel[half + j];
    const cplx down = panel[half - 1 - j];
    total += up + down;
    positive += up.real();
    if (2 * (j + 1) >= half) {
      run_min = std::min(run_min, total.real());
      run_max = std::max(run_max, total.real());
    }
  }
  r.value = total.real();
  r.imaginary = total.imag();
  r.half_line = 2.0 * positive;
  r.tail_diagnostic = run_max - run_min;
  r.imaginary_ok = std::abs(r.imaginary) < cfg.tolerance * (std::abs(r.value) + 1.0);
  return r;
}

PerronResult perron_delta(double x, const TwistedParams& params, const PerronConfig& config,
                          const ZetaEvalPolicy& policy) {
  const DLineCache cache(params, config, policy);
  return perron_delta(x, cache);
}

ZeroModelValue zero_model_delta(double x, std::size_t K, std::span<const ZeroResidueTerm> terms) {
  if (K > terms.size()) throw PreconditionError("zero_model_delta: K exceeds the number of residue terms");
  if (!(x > 0.0)) throw DomainError("zero_model_delta: x must be positive");
  if (K == 0) return {0.0, true};
  const double lx = std::log(x);
  double acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) acc += (terms[k].coefficient * std::exp(terms[k].exponent * lx)).real();
  return {2.0 * acc, false};
}

cplx zero_model_paired(double x, std::size_t K, std::span<const ZeroResidueTerm> terms,
                       std::span<const ZeroResidueTerm> conjugate_terms) {
  if (K > terms.size() || K > conjugate_terms.size()) throw PreconditionError("zero_model_paired: K too large");
  const double lx = std::log(x);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    acc += terms[k].coefficient * std::exp(terms[k].exponent * lx);
    acc += conjugate_terms[k].coefficient * std::exp(conjugate_terms[k].exponent * lx);
  }
  return acc;
}

double zero_model_envelope(std::size_t K, std::span<const ZeroResidueTerm> terms) {
  double s = 0.0;
  for (std::size_t k = 0; k < std::min(K, terms.size()); ++k) s += std::abs(terms[k].coefficient);
  return 2.0 * s;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("pearson_correlation: need two equal series of length >= 2");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double ReconstructionReport::zero_model_residual_rms() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) {
    const double e = (r.delta_sieve - r.delta_zero_model) / std::pow(r.x, 0.25);
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(rows.size()));
}

double ReconstructionReport::perron_residual_rms() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) {
    const double e = (r.delta_sieve - r.delta_perron) / std::pow(r.x, 0.25);
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(rows.size()));
}

double ReconstructionReport::zero_model_correlation() const {
  std::vector<double> a, b;
  for (const auto& r : rows) {
    const double q = std::pow(r.x, 0.25);
    a.push_back(r.delta_sieve / q);
    b.push_back(r.delta_zero_model / q);
  }
  return pearson_correlation(a, b);
}

ReconstructionReport reconstruction_report(std::span<const double> x_samples, const DeltaSeries& delta,
                                           const DLineCache* perron_cache, std::size_t K,
                                           std::span<const ZeroResidueTerm> terms) {
  ReconstructionReport rep;
  rep.theta = delta.params.theta();
  rep.zeros_used = K;
  if (perron_cache && perron_cache->theta() != rep.theta) {
    throw PreconditionError("reconstruction_report: line cache built for another theta");
  }
  for (double x : x_samples) {
    auto it = std::lower_bound(delta.grid.begin(), delta.grid.end(), x);
    if (it == delta.grid.end() || *it != x) {
      throw PreconditionError("reconstruction_report: no sieve checkpoint at x=" + std::to_string(x));
    }
    ReconstructionRow row;
    row.x = x;
    row.delta_sieve = delta.delta[static_cast<std::size_t>(it - delta.grid.begin())];
    row.delta_perron = perron_cache ? perron_delta(x, *perron_cache).value : std::numeric_limits<double>::quiet_NaN();
    row.delta_zero_model = zero_model_delta(x, K, terms).value;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace tdl
