#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <random>

#include "tdl/errors.hpp"
#include "tdl/io.hpp"

namespace tdl::cli {
namespace {

using nlohmann::ordered_json;

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << "\n"; }

std::vector<double> config_grid(const ExperimentConfig& config) {
  return geometric_grid(config.grid_start, config.x_max, config.grid_ratio);
}

PartialSumSeries load_sums(const ExperimentConfig& config) {
  const auto path = config.checkpoint_path(BoundaryConvention::half_weight_at_integer);
  if (!std::filesystem::exists(path)) {
    throw PreconditionError("no sieve checkpoint at " + path.string() + "; run `tdl sieve` with the same --theta, " +
                            "--grid-ratio and --out first");
  }
  auto sums = io::read_checkpoints(path);
  if (sums.params.theta() != config.theta) throw PreconditionError("checkpoint theta does not match --theta");
  return sums;
}

DeltaSeries load_delta(const ExperimentConfig& config) {
  const TwistedParams params(config.theta);
  return delta_series(load_sums(config), main_term_constants(params));
}

std::filesystem::path artifact(const ExperimentConfig& config, const std::string& stem) {
  return config.output_dir / (stem + "-th" + short_num(config.theta) + "-r" + short_num(config.grid_ratio));
}

std::vector<ZeroResidueTerm> load_terms(const ExperimentConfig& config, std::size_t K) {
  const auto zeros = load_zeros(resolve_zeros_path(config.zeros_path));
  if (K > zeros.size()) {
    throw PreconditionError("K=" + std::to_string(K) + " exceeds the zero table size " + std::to_string(zeros.size()));
  }
  return zero_residue_terms(zeros, K, TwistedParams(config.theta));
}

io::SvgTrace normalized_trace(std::string label, const std::vector<double>& x, const std::vector<double>& y) {
  io::SvgTrace t{std::move(label), x, y};
  for (std::size_t i = 0; i < x.size(); ++i) t.y[i] /= std::pow(x[i], 0.25);
  return t;
}

double parse_double(std::string_view s, const std::string& whole) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw PreconditionError("cannot parse complex number '" + whole + "'");
  return v;
}

}  // namespace

void ExperimentConfig::validate() const {
  TwistedParams check(theta);
  if (!(grid_ratio > 1.0)) throw PreconditionError("--grid-ratio must exceed 1");
  if (!(x_max >= 1e3)) throw PreconditionError("--xmax must be at least 1e3");
  if (workers < 1) throw PreconditionError("--workers must be at least 1");
  if (!(grid_start >= 2.0 && grid_start < x_max)) throw PreconditionError("--grid-start must lie in [2, xmax)");
  if (!(c > 0.0)) throw PreconditionError("--c must be positive");
  if (!(b_exponent > 0.0)) throw PreconditionError("--b must be positive");
}

std::filesystem::path ExperimentConfig::checkpoint_path(BoundaryConvention convention) const {
  return output_dir / ("sieve-th" + short_num(theta) + "-r" + short_num(grid_ratio) + "-s" + short_num(grid_start) + "-" +
                       std::string(to_string(convention)) + ".tdl1");
}

void cmd_sieve(const ExperimentConfig& config, const SieveArgs& args, std::ostream& out, std::ostream& log) {
  const TwistedParams params(config.theta);
  const auto grid = config_grid(config);
  SieveOptions options;
  options.convention = parse_boundary_convention(args.convention);
  options.segment_length = args.segment;
  options.workers = config.workers;
  const bool both = args.strategy == "both";
  options.strategy = both ? SieveStrategy::divisor_add : parse_sieve_strategy(args.strategy);
  const auto path = config.checkpoint_path(options.convention);

  std::string mode = "fresh";
  std::optional<PartialSumSeries> sums;
  if (std::filesystem::exists(path)) {
    auto previous = io::read_checkpoints(path);
    if (previous.params.theta() == config.theta && previous.boundary_convention == options.convention) {
      // Longest common prefix of the stored and requested grids; a stored
      // grid ends in its own x_max, which the longer grid need not contain.
      std::size_t k = 0;
      while (k < previous.grid.size() && k < grid.size() && previous.grid[k] == grid[k]) ++k;
      if (k == grid.size() && k == previous.grid.size()) {
        sums = std::move(previous);
        mode = "cached";
      } else if (k > 0 && k < grid.size()) {
        previous.grid.resize(k);
        previous.values.resize(k);
        sums = resume_partial_sum_sieve(previous, config.x_max, grid, options);
        mode = "resumed";
      }
    }
  }
  if (!sums) sums = partial_sum_sieve(config.x_max, grid, params, options);

  ordered_json j;
  j["v"] = io::kSchemaVersion;
  if (both) {
    SieveOptions other = options;
    other.strategy = SieveStrategy::spf_multiplicative;
    const auto check = partial_sum_sieve(config.x_max, grid, params, other);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double ref = std::max(std::abs(sums->values[i]), 1.0);
      worst = std::max(worst, std::abs(sums->values[i] - check.values[i]) / ref);
    }
    j["strategy_disagreement"] = worst;
    if (!(worst <= args.agreement)) {
      throw NumericalError("sieve strategies disagree: relative difference " + std::to_string(worst) + " in S(x)");
    }
  }
  if (mode != "cached") io::write_checkpoints(path, *sums);
  log << "tdl: sieve " << mode << " " << path.string() << "\n";
  j["theta"] = config.theta;
  j["x_max"] = config.x_max;
  j["checkpoints"] = sums->grid.size();
  j["S_last"] = num(sums->values.back());
  j["convention"] = std::string(to_string(options.convention));
  j["strategy"] = both ? std::string("both") : std::string(to_string(options.strategy));
  j["file"] = path.filename().string();
  emit(out, j);
}

void cmd_constants(const ExperimentConfig& config, std::ostream& out) {
  const auto c = main_term_constants(TwistedParams(config.theta));
  const auto text = io::constants_json(c);
  io::write_file(artifact(config, "constants").string() + ".json", text);
  out << text;
}

void cmd_delta(const ExperimentConfig& config, bool svg, std::ostream& out) {
  const auto d = load_delta(config);
  const auto base = artifact(config, "delta");
  io::write_file(base.string() + ".csv", io::delta_csv(d));
  if (svg) {
    io::write_file(base.string() + ".svg",
                   io::svg_chart("Delta(x) / x^(1/4), theta = " + short_num(config.theta),
                                 {normalized_trace("sieve", d.grid, d.delta)}));
  }
  const double lo = std::max(d.grid.front(), 1e4);
  const double hi = d.grid.back();
  ordered_json j;
  j["v"] = io::kSchemaVersion;
  j["theta"] = config.theta;
  j["checkpoints"] = d.grid.size();
  j["constants_ref"] = d.constants_ref;
  j["csv"] = base.filename().string() + ".csv";
  if (hi > lo) {
    const auto shape = upper_bound_shape(d, lo, hi);
    j["range_lo"] = lo;
    j["range_hi"] = hi;
    j["sup_ratio"] = num(shape.sup_ratio);
    j["argmax_x"] = num(shape.argmax_x);
    j["max_over_x38"] = num(shape.max_over_x38);
    j["max_abs_over_x14"] = num(shape.max_abs_over_x14);
    j["sign_changes"] = count_sign_changes(d, lo, hi);
  }
  emit(out, j);
}

void cmd_moment(const ExperimentConfig& config, const MomentArgs& args, std::ostream& out) {
  const auto d = load_delta(config);
  const double U = args.upper_limit.value_or(d.grid.back());
  const auto r = smoothed_moment(d, args.T, config.c, config.b_exponent, U);
  if (!args.X) {
    out << io::moment_json(r);
    return;
  }
  auto j = ordered_json::parse(io::moment_json(r));
  const double a = alpha_of(*args.X, config.c);
  j["X"] = *args.X;
  j["local_alpha"] = a;
  j["local_moment"] = num(local_moment(d, *args.X, a));
  emit(out, j);
}

void cmd_measure(const ExperimentConfig& config, const MeasureArgs& args, std::ostream& out) {
  const auto d = load_delta(config);
  ExceedanceRequest req;
  req.X = args.X;
  req.kind = parse_threshold_kind(args.kind);
  req.c = config.c;
  req.epsilon = args.epsilon;
  req.lambda = args.lambda ? *args.lambda : 0.5 * fit_landau_lambda(d, args.X, 2.0 * args.X);
  // Default resolution: the coarsest checkpoint cell inside [X, 2X].
  double step = 0.0;
  for (std::size_t i = 1; i < d.grid.size(); ++i) {
    if (d.grid[i] > args.X && d.grid[i - 1] < 2.0 * args.X) step = std::max(step, d.grid[i] - d.grid[i - 1]);
  }
  req.sample_step = args.sample_step.value_or(step);
  out << io::exceedance_json(exceedance_measure(d, req));
}

void cmd_perron(const ExperimentConfig& config, const PerronArgs& args, std::ostream& out) {
  if (args.xs.empty()) throw PreconditionError("perron: give at least one x");
  const TwistedParams params(config.theta);
  PerronConfig pc;
  pc.t_cut = args.t_cut;
  const double x_top = *std::max_element(args.xs.begin(), args.xs.end());
  if (!(x_top >= 100.0)) throw DomainError("perron: x must be >= 100");
  pc.panel_length = args.panel_length.value_or(PerronConfig::max_panel_length(x_top));
  pc.validate();
  const ZetaEvalPolicy policy;
  const auto path = config.output_dir / io::line_cache_name(config.theta, pc);
  std::optional<DLineCache> cache;
  if (std::filesystem::exists(path)) {
    std::string fp;
    auto loaded = io::read_line_cache(path, &fp);
    if (fp == policy_fingerprint(policy) && loaded.theta() == config.theta) cache.emplace(std::move(loaded));
  }
  if (!cache) {
    cache.emplace(params, pc, policy, config.workers);
    io::write_line_cache(path, *cache, policy_fingerprint(policy));
  }
  std::vector<PerronResult> results;
  for (double x : args.xs) {
    results.push_back(perron_delta(x, *cache));
    if (!results.back().imaginary_ok) {
      throw NumericalError("perron: imaginary part " + std::to_string(results.back().imaginary) + " above tolerance at x=" +
                           std::to_string(x));
    }
  }
  out << io::perron_json(args.xs, results, config.theta, cache->config());
}

void cmd_zeromodel(const ExperimentConfig& config, const ZeroModelArgs& args, std::ostream& out) {
  const auto d = load_delta(config);
  const auto terms = load_terms(config, args.K);
  const double hi = args.hi.value_or(d.grid.back());
  std::vector<double> xs;
  for (double x : d.grid) {
    if (x >= args.lo && x <= hi) xs.push_back(x);
  }
  const auto rep = reconstruction_report(xs, d, nullptr, args.K, terms);
  const auto base = artifact(config, "zeromodel-K" + std::to_string(args.K));
  io::write_file(base.string() + ".csv", io::report_csv(rep));
  auto j = ordered_json::parse(io::report_json(rep));
  j["empty_sum"] = args.K == 0;
  j["csv"] = base.filename().string() + ".csv";
  emit(out, j);
}

void cmd_report(const ExperimentConfig& config, const ReportArgs& args, std::ostream& out) {
  const auto d = load_delta(config);
  const double hi = args.hi.value_or(d.grid.back());
  std::vector<double> pool;
  for (double x : d.grid) {
    if (x >= std::max(args.lo, 100.0) && x <= hi) pool.push_back(x);
  }
  std::vector<double> xs;
  std::mt19937_64 rng(config.seed);
  std::sample(pool.begin(), pool.end(), std::back_inserter(xs), args.samples, rng);
  std::sort(xs.begin(), xs.end());
  const auto terms = load_terms(config, args.K);
  std::optional<DLineCache> cache;
  if (!xs.empty()) {
    PerronConfig pc;
    pc.t_cut = args.t_cut;
    pc.panel_length = PerronConfig::max_panel_length(xs.back());
    const auto path = config.output_dir / io::line_cache_name(config.theta, pc);
    const ZetaEvalPolicy policy;
    if (std::filesystem::exists(path)) {
      std::string fp;
      auto loaded = io::read_line_cache(path, &fp);
      if (fp == policy_fingerprint(policy) && loaded.theta() == config.theta) cache.emplace(std::move(loaded));
    }
    if (!cache) {
      cache.emplace(TwistedParams(config.theta), pc, policy, config.workers);
      io::write_line_cache(path, *cache, policy_fingerprint(policy));
    }
  }
  const auto rep = reconstruction_report(xs, d, cache ? &*cache : nullptr, args.K, terms);
  const auto base = artifact(config, "report");
  io::write_file(base.string() + ".csv", io::report_csv(rep));
  io::write_file(base.string() + ".json", io::report_json(rep));
  if (args.svg) {
    std::vector<double> s, p, z;
    for (const auto& r : rep.rows) {
      s.push_back(r.delta_sieve);
      p.push_back(r.delta_perron);
      z.push_back(r.delta_zero_model);
    }
    io::write_file(base.string() + ".svg",
                   io::svg_chart("Delta(x) / x^(1/4), theta = " + short_num(config.theta),
                                 {normalized_trace("sieve", xs, s), normalized_trace("perron", xs, p),
                                  normalized_trace("zero model K=" + std::to_string(args.K), xs, z)}));
  }
  auto j = ordered_json::parse(io::report_json(rep));
  j["seed"] = config.seed;
  j["csv"] = base.filename().string() + ".csv";
  emit(out, j);
}

cplx parse_complex(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (ch != ' ') t.push_back(ch);
  }
  if (t.empty()) throw PreconditionError("empty complex number");
  if (t.back() != 'i') return {parse_double(t, text), 0.0};
  t.pop_back();
  // Split at the last sign that is not an exponent sign or leading.
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    if (s.front() == '+') s.remove_prefix(1);
    return parse_double(s, text);
  };
  if (split == std::string::npos) return {0.0, imag_part(t)};
  return {parse_double(std::string_view(t).substr(0, split), text), imag_part(std::string_view(t).substr(split))};
}

void cmd_zeta(const std::string& s, std::ostream& out) {
  const cplx z = parse_complex(s);
  const ZetaEvalPolicy policy;
  const cplx v = zeta(z, policy);
  out << io::zeta_json(z, v, z.real() >= 0.0 ? resolved_em_terms(z, policy) : resolved_em_terms(1.0 - z, policy));
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted divisor sums: sieve, main term, error term and reconstructions"};
  app.require_subcommand(1);
  ExperimentConfig config;
  std::string zeros;
  std::string outdir = config.output_dir.string();
  app.add_option("--theta", config.theta, "Twist parameter theta")->capture_default_str();
  app.add_option("--xmax", config.x_max, "Largest x of the checkpoint grid")->capture_default_str();
  app.add_option("--grid-ratio", config.grid_ratio, "Geometric ratio between checkpoints")->capture_default_str();
  app.add_option("--grid-start", config.grid_start, "First checkpoint")->capture_default_str();
  app.add_option("--c", config.c, "Constant c in alpha(T) = 3/8 - c/(log T)^(1/8)")->capture_default_str();
  app.add_option("--b", config.b_exponent, "Smoothing exponent, y = T^b")->capture_default_str();
  app.add_option("--zeros", zeros, "Zeta zero ordinates file (else $TDL_ZEROS, else bundled)");
  app.add_option("--out", outdir, "Output and cache directory")->capture_default_str();
  app.add_option("--seed", config.seed, "Seed for sampled reports")->capture_default_str();
  app.add_option("--workers", config.workers, "Worker threads")->capture_default_str();

  SieveArgs sieve;
  auto* sc = app.add_subcommand("sieve", "Compute S(x) checkpoints into the cache");
  sc->add_option("--strategy", sieve.strategy, "divisor_add, spf or both")->capture_default_str();
  sc->add_option("--convention", sieve.convention, "half or full weight at integer checkpoints")->capture_default_str();
  sc->add_option("--segment", sieve.segment, "Segment length")->capture_default_str();
  sc->add_option("--agreement", sieve.agreement, "Relative tolerance for --strategy both")->capture_default_str();

  auto* cc = app.add_subcommand("constants", "Main-term constants from residues");

  bool delta_svg = false;
  auto* dc = app.add_subcommand("delta", "Error term Delta(x) on the cached grid");
  dc->add_flag("--svg", delta_svg, "Also write an SVG chart");

  MomentArgs moment;
  auto* mc = app.add_subcommand("moment", "Smoothed second moment");
  mc->add_option("T", moment.T, "Lower limit T")->required();
  mc->add_option("X", moment.X, "Also report the local moment on [X, 2X]");
  mc->add_option("--upper", moment.upper_limit, "Upper integration limit (default: last checkpoint)");

  MeasureArgs measure;
  auto* ec = app.add_subcommand("measure", "Exceedance-set measures on [X, 2X]");
  ec->add_option("X", measure.X, "Left end of the interval")->required();
  ec->add_option("kind", measure.kind, "power or landau")->capture_default_str();
  ec->add_option("--lambda", measure.lambda, "Threshold constant (default: half the fitted lambda)");
  ec->add_option("--epsilon", measure.epsilon, "Slack subtracted from lambda (landau)")->capture_default_str();
  ec->add_option("--sample-step", measure.sample_step, "Largest admissible cell (default: coarsest cell in [X, 2X])");

  PerronArgs perron;
  auto* pc = app.add_subcommand("perron", "Truncated Perron reconstruction of Delta");
  pc->add_option("x", perron.xs, "Evaluation points")->required();
  pc->add_option("--t-cut", perron.t_cut, "Truncation height")->capture_default_str();
  pc->add_option("--panel", perron.panel_length, "Panel length (default 2 pi / log max x)");

  ZeroModelArgs zm;
  auto* zc = app.add_subcommand("zeromodel", "K-zero oscillation model against the sieve");
  zc->add_option("K", zm.K, "Number of zeros")->required();
  zc->add_option("--lo", zm.lo, "Smallest checkpoint used")->capture_default_str();
  zc->add_option("--hi", zm.hi, "Largest checkpoint used (default: last)");

  ReportArgs report;
  auto* rc = app.add_subcommand("report", "Sieve, Perron and zero model side by side");
  rc->add_option("--K", report.K, "Number of zeros")->capture_default_str();
  rc->add_option("--samples", report.samples, "Checkpoints sampled (seeded)")->capture_default_str();
  rc->add_option("--lo", report.lo, "Smallest sampled checkpoint")->capture_default_str();
  rc->add_option("--hi", report.hi, "Largest sampled checkpoint (default: last)");
  rc->add_option("--t-cut", report.t_cut, "Perron truncation height")->capture_default_str();

  std::string zeta_arg;
  auto* zt = app.add_subcommand("zeta", "Riemann zeta at a complex point");
  zt->add_option("s", zeta_arg, "e.g. 2 or 0.5+14.134725i")->required();

  app.fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!zeros.empty()) config.zeros_path = std::filesystem::path(zeros);
    config.output_dir = outdir;
    if (zt->parsed()) {
      cmd_zeta(zeta_arg, out);
      return 0;
    }
    config.validate();
    if (sc->parsed()) cmd_sieve(config, sieve, out, err);
    if (cc->parsed()) cmd_constants(config, out);
    if (dc->parsed()) cmd_delta(config, delta_svg, out);
    if (mc->parsed()) cmd_moment(config, moment, out);
    if (ec->parsed()) cmd_measure(config, measure, out);
    if (pc->parsed()) cmd_perron(config, perron, out);
    if (zc->parsed()) cmd_zeromodel(config, zm, out);
    if (rc->parsed()) cmd_report(config, report, out);
    return 0;
  } catch (const NumericalError& e) {
    err << "tdl: numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "tdl: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace tdl::cli
