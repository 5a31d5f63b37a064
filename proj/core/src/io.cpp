#include "tdl/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tdl/errors.hpp"

namespace tdl::io {
namespace {

using nlohmann::ordered_json;

class Writer {
 public:
  void bytes(std::string_view b) { out_.append(b); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view data, const char* what) : data_(data), what_(what) {}
  std::string_view bytes(std::size_t n) {
    need(n);
    auto r = data_.substr(pos_, n);
    pos_ += n;
    return r;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes(1)[0]); }
  std::uint32_t u32() {
    auto b = bytes(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(b[i])} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto b = bytes(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(b[i])} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() { return std::string(bytes(u32())); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw IoError(std::string(what_) + ": truncated file");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
  const char* what_;
};

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double get_num(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw IoError(std::string("constants JSON: missing field ") + key);
  if (j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string encode_checkpoints(const PartialSumSeries& sums) {
  Writer w;
  w.bytes("TDL1");
  w.f64(sums.params.theta());
  w.u8(static_cast<std::uint8_t>(sums.boundary_convention));
  w.u64(sums.grid.size());
  for (std::size_t i = 0; i < sums.grid.size(); ++i) {
    w.f64(sums.grid[i]);
    w.f64(sums.values[i]);
  }
  return w.take();
}

PartialSumSeries decode_checkpoints(std::string_view bytes) {
  Reader r(bytes, "checkpoint");
  if (r.bytes(4) != "TDL1") throw IoError("checkpoint: bad magic, expected TDL1");
  const double theta = r.f64();
  const std::uint8_t conv = r.u8();
  if (conv > 1) throw IoError("checkpoint: unknown boundary convention byte");
  const std::uint64_t count = r.u64();
  if (count > r.remaining() / 16 || r.remaining() != count * 16) throw IoError("checkpoint: size does not match count");
  PartialSumSeries s{TwistedParams(theta), {}, {}, static_cast<BoundaryConvention>(conv), SieveStrategy::divisor_add};
  s.grid.reserve(count);
  s.values.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    s.grid.push_back(r.f64());
    s.values.push_back(r.f64());
    if (i > 0 && !(s.grid[i] > s.grid[i - 1])) throw IoError("checkpoint: grid not ascending");
  }
  return s;
}

void write_checkpoints(const std::filesystem::path& path, const PartialSumSeries& sums) {
  write_file(path, encode_checkpoints(sums));
}

PartialSumSeries read_checkpoints(const std::filesystem::path& path) { return decode_checkpoints(read_file(path)); }

std::string encode_line_cache(const DLineCache& cache, std::string_view policy_fingerprint) {
  const auto& c = cache.config();
  Writer w;
  w.bytes("TDLD");
  w.f64(c.sigma);
  w.f64(cache.theta());
  w.f64(c.t_cut);
  w.f64(c.panel_length);
  w.f64(c.tolerance);
  w.u32(static_cast<std::uint32_t>(c.nodes_per_panel));
  w.str(policy_fingerprint);
  w.u64(cache.grid_hash());
  w.u64(cache.nodes().size());
  for (std::size_t i = 0; i < cache.nodes().size(); ++i) {
    w.f64(cache.nodes()[i]);
    w.f64(cache.weights()[i]);
    w.f64(cache.values()[i].real());
    w.f64(cache.values()[i].imag());
  }
  return w.take();
}

DLineCache decode_line_cache(std::string_view bytes, std::string* policy_fingerprint) {
  Reader r(bytes, "line cache");
  if (r.bytes(4) != "TDLD") throw IoError("line cache: bad magic, expected TDLD");
  PerronConfig c;
  c.sigma = r.f64();
  const double theta = r.f64();
  c.t_cut = r.f64();
  c.panel_length = r.f64();
  c.tolerance = r.f64();
  c.nodes_per_panel = static_cast<int>(r.u32());
  std::string fp = r.str();
  const std::uint64_t hash = r.u64();
  const std::uint64_t count = r.u64();
  if (r.remaining() != count * 32) throw IoError("line cache: size does not match count");
  std::vector<double> t(count), wt(count);
  std::vector<cplx> g(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    t[i] = r.f64();
    wt[i] = r.f64();
    const double re = r.f64();
    g[i] = cplx(re, r.f64());
  }
  DLineCache cache(theta, c, std::move(t), std::move(wt), std::move(g));
  if (cache.grid_hash() != hash) throw IoError("line cache: t-grid hash mismatch");
  if (policy_fingerprint) *policy_fingerprint = std::move(fp);
  return cache;
}

void write_line_cache(const std::filesystem::path& path, const DLineCache& cache, std::string_view policy_fingerprint) {
  write_file(path, encode_line_cache(cache, policy_fingerprint));
}

DLineCache read_line_cache(const std::filesystem::path& path, std::string* policy_fingerprint) {
  return decode_line_cache(read_file(path), policy_fingerprint);
}

std::string line_cache_name(double theta, const PerronConfig& config) {
  return "dline-s" + fmt_short(config.sigma) + "-th" + fmt_short(theta) + "-T" + fmt_short(config.t_cut) + "-h" +
         fmt_short(config.panel_length) + "-n" + std::to_string(config.nodes_per_panel) + ".bin";
}

std::string constants_json(const MainTermConstants& c) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["theta"] = num(c.params.theta());
  j["omega1"] = num(c.omega1);
  j["omega_plus_re"] = num(c.omega_plus.real());
  j["omega_plus_im"] = num(c.omega_plus.imag());
  j["omega3"] = num(c.omega3);
  j["amplitude"] = num(c.amplitude());
  j["phase"] = num(c.phase());
  j["derivation"] = std::string(to_string(c.derivation));
  j["policy_fingerprint"] = c.policy_fingerprint;
  j["fingerprint"] = c.fingerprint();
  return dump(j);
}

MainTermConstants parse_constants_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw IoError(std::string("constants JSON: ") + e.what());
  }
  if (!j.contains("v") || j["v"] != kSchemaVersion) throw IoError("constants JSON: unsupported schema version");
  MainTermConstants c{TwistedParams(get_num(j, "theta")), 0.0, cplx{}, 0.0, ConstantsDerivation::contour_quadrature, {}};
  c.omega1 = get_num(j, "omega1");
  c.omega_plus = cplx(get_num(j, "omega_plus_re"), get_num(j, "omega_plus_im"));
  c.omega3 = get_num(j, "omega3");
  const std::string d = j.value("derivation", "contour_quadrature");
  c.derivation = d == "fit_oracle" ? ConstantsDerivation::fit_oracle : ConstantsDerivation::contour_quadrature;
  c.policy_fingerprint = j.value("policy_fingerprint", "");
  return c;
}

std::string moment_json(const MomentReport& r) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["T"] = num(r.T);
  j["b_exponent"] = num(r.b_exponent);
  j["y"] = num(r.y);
  j["c"] = num(r.c);
  j["alpha"] = num(r.alpha);
  j["upper_limit"] = num(r.upper_limit);
  j["value"] = num(r.value);
  j["tail_bound"] = num(r.tail_bound);
  j["quadrature"] = r.quadrature;
  j["within_theorem_hypothesis"] = r.within_theorem_hypothesis;
  return dump(j);
}

std::string exceedance_json(const ExceedanceReport& r) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["X"] = num(r.X);
  j["threshold_kind"] = std::string(to_string(r.threshold_kind));
  j["lambda"] = num(r.lambda);
  j["epsilon"] = num(r.epsilon);
  j["c"] = num(r.c);
  j["sample_step"] = num(r.sample_step);
  ordered_json sets = ordered_json::array();
  for (const auto& s : r.sets) {
    ordered_json e;
    e["name"] = s.name;
    e["measure_lower"] = num(s.measure_lower);
    e["measure_upper"] = num(s.measure_upper);
    sets.push_back(e);
  }
  j["sets"] = sets;
  return dump(j);
}

std::string report_json(const ReconstructionReport& r) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["theta"] = num(r.theta);
  j["zeros_used"] = r.zeros_used;
  j["rows"] = r.rows.size();
  j["zero_model_residual_rms"] = num(r.zero_model_residual_rms());
  j["perron_residual_rms"] = num(r.perron_residual_rms());
  j["zero_model_correlation"] = r.rows.size() >= 2 ? num(r.zero_model_correlation()) : ordered_json(nullptr);
  return dump(j);
}

std::string perron_json(const std::vector<double>& xs, const std::vector<PerronResult>& results, double theta,
                        const PerronConfig& config) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["theta"] = num(theta);
  j["sigma"] = num(config.sigma);
  j["t_cut"] = num(config.t_cut);
  j["panel_length"] = num(config.panel_length);
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ordered_json e;
    e["x"] = num(xs[i]);
    e["delta"] = num(results[i].value);
    e["imaginary"] = num(results[i].imaginary);
    e["tail_diagnostic"] = num(results[i].tail_diagnostic);
    e["imaginary_ok"] = results[i].imaginary_ok;
    rows.push_back(e);
  }
  j["results"] = rows;
  return dump(j);
}

std::string zeta_json(cplx s, cplx value, int em_terms) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["s_re"] = num(s.real());
  j["s_im"] = num(s.imag());
  j["value_re"] = num(value.real());
  j["value_im"] = num(value.imag());
  j["em_terms"] = em_terms;
  return dump(j);
}

std::string delta_csv(const DeltaSeries& d) {
  std::string out = "x,delta\n";
  for (std::size_t i = 0; i < d.grid.size(); ++i) out += fmt(d.grid[i]) + "," + fmt(d.delta[i]) + "\n";
  return out;
}

std::string report_csv(const ReconstructionReport& r) {
  std::string out = "x,delta_sieve,delta_perron,delta_zero_model\n";
  for (const auto& row : r.rows) {
    out += fmt(row.x) + "," + fmt(row.delta_sieve) + "," + (std::isfinite(row.delta_perron) ? fmt(row.delta_perron) : "") +
           "," + fmt(row.delta_zero_model) + "\n";
  }
  return out;
}

std::string svg_chart(std::string_view title, const std::vector<SvgTrace>& traces) {
  constexpr double W = 800, H = 400, L = 60, R = 20, Tp = 30, B = 40;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      if (!(t.x[i] > 0) || !std::isfinite(t.y[i])) continue;
      x0 = std::min(x0, std::log10(t.x[i]));
      x1 = std::max(x1, std::log10(t.x[i]));
      y0 = std::min(y0, t.y[i]);
      y1 = std::max(y1, t.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return L + (std::log10(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - Tp - B); };
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << Tp << "\" width=\"" << W - L - R << "\" height=\"" << H - Tp - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d) {
    const double xp = px(std::pow(10.0, d));
    o << "<text x=\"" << xp << "\" y=\"" << H - B + 16 << "\" font-family=\"sans-serif\" font-size=\"11\" "
      << "text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  o << "<text x=\"5\" y=\"" << Tp + 10 << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_short(y1) << "</text>\n";
  o << "<text x=\"5\" y=\"" << H - B << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_short(y0) << "</text>\n";
  if (y0 < 0 && y1 > 0) {
    o << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(0) << "\" y2=\"" << py(0)
      << "\" stroke=\"#999\" stroke-dasharray=\"4\"/>\n";
  }
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& t = traces[k];
    o << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << colors[k % 5] << "\" points=\"";
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      if (!(t.x[i] > 0) || !std::isfinite(t.y[i])) continue;
      o << px(t.x[i]) << "," << py(t.y[i]) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 150 << "\" y=\"" << Tp + 16 + 14 * static_cast<double>(k)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colors[k % 5] << "\">" << t.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

}  // namespace tdl::io
