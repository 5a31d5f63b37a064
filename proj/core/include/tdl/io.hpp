#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tdl/delta_lab.hpp"
#include "tdl/dseries.hpp"
#include "tdl/reconstruct.hpp"
#include "tdl/tau_core.hpp"

namespace tdl::io {

inline constexpr int kSchemaVersion = 1;

// Checkpoint file "TDL1": magic, theta (f64), convention (u8), count (u64),
// then count (x, S) f64 pairs; all little-endian.
std::string encode_checkpoints(const PartialSumSeries& sums);
PartialSumSeries decode_checkpoints(std::string_view bytes);
void write_checkpoints(const std::filesystem::path& path, const PartialSumSeries& sums);
PartialSumSeries read_checkpoints(const std::filesystem::path& path);

// D-line sample cache "TDLD": sigma, theta, t_cut, panel_length, tolerance
// (f64), nodes per panel (u32), policy fingerprint, grid hash (u64), count
// (u64), then (t, w, Re g, Im g) f64 records.
std::string encode_line_cache(const DLineCache& cache, std::string_view policy_fingerprint);
DLineCache decode_line_cache(std::string_view bytes, std::string* policy_fingerprint = nullptr);
void write_line_cache(const std::filesystem::path& path, const DLineCache& cache, std::string_view policy_fingerprint);
DLineCache read_line_cache(const std::filesystem::path& path, std::string* policy_fingerprint = nullptr);
// File name carrying the (sigma, theta, t-grid) key, e.g.
// "dline-s0.375-th1-T2000-h0.5.bin".
std::string line_cache_name(double theta, const PerronConfig& config);

// JSON documents, each with "v": 1. Non-finite numbers become null.
std::string constants_json(const MainTermConstants& c);
MainTermConstants parse_constants_json(std::string_view text);
std::string moment_json(const MomentReport& r);
std::string exceedance_json(const ExceedanceReport& r);
std::string report_json(const ReconstructionReport& r);
std::string perron_json(const std::vector<double>& xs, const std::vector<PerronResult>& results, double theta,
                        const PerronConfig& config);
std::string zeta_json(cplx s, cplx value, int em_terms);

// CSV artifacts.
std::string delta_csv(const DeltaSeries& d);
std::string report_csv(const ReconstructionReport& r);

struct SvgTrace {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
// Self-contained line chart, log-scaled x axis.
std::string svg_chart(std::string_view title, const std::vector<SvgTrace>& traces);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames, so readers never see a
// truncated artifact.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tdl::io
