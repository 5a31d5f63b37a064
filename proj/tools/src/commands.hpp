#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdl/delta_lab.hpp"
#include "tdl/reconstruct.hpp"

namespace tdl::cli {

struct ExperimentConfig {
  double theta = 1.0;
  double x_max = 1e7;
  double grid_ratio = 1.001;
  double grid_start = 1e3;
  double c = 0.05;
  double b_exponent = 80.0;
  std::optional<std::filesystem::path> zeros_path;
  std::filesystem::path output_dir = "tdl-out";
  std::uint64_t seed = 0;
  unsigned workers = 1;

  // Throws PreconditionError on grid_ratio <= 1, x_max < 1e3 or workers < 1.
  void validate() const;
  std::filesystem::path checkpoint_path(BoundaryConvention convention) const;
};

struct SieveArgs {
  std::string strategy = "divisor_add";  // divisor_add, spf or both
  std::string convention = "half";
  std::uint64_t segment = SieveOptions::kDefaultSegment;
  double agreement = 1e-9;
};

struct MomentArgs {
  double T = 1e4;
  std::optional<double> X;
  std::optional<double> upper_limit;
};

struct MeasureArgs {
  double X = 1e6;
  std::string kind = "landau";
  std::optional<double> lambda;  // default: half the fitted Landau lambda
  double epsilon = 0.0;
  std::optional<double> sample_step;
};

struct PerronArgs {
  std::vector<double> xs;
  double t_cut = 2000.0;
  std::optional<double> panel_length;
};

struct ZeroModelArgs {
  std::size_t K = 100;
  double lo = 1e5;
  std::optional<double> hi;
};

struct ReportArgs {
  std::size_t K = 100;
  std::size_t samples = 64;
  double lo = 1e4;
  std::optional<double> hi;
  double t_cut = 2000.0;
  bool svg = true;
};

// Each command writes its JSON result to `out` and artifacts to
// config.output_dir. Errors propagate as tdl::Error subclasses.
// Cache status (fresh, cached, resumed) goes to `log` so stdout stays
// identical across reruns.
void cmd_sieve(const ExperimentConfig& config, const SieveArgs& args, std::ostream& out, std::ostream& log);
void cmd_constants(const ExperimentConfig& config, std::ostream& out);
void cmd_delta(const ExperimentConfig& config, bool svg, std::ostream& out);
void cmd_moment(const ExperimentConfig& config, const MomentArgs& args, std::ostream& out);
void cmd_measure(const ExperimentConfig& config, const MeasureArgs& args, std::ostream& out);
void cmd_perron(const ExperimentConfig& config, const PerronArgs& args, std::ostream& out);
void cmd_zeromodel(const ExperimentConfig& config, const ZeroModelArgs& args, std::ostream& out);
void cmd_report(const ExperimentConfig& config, const ReportArgs& args, std::ostream& out);
void cmd_zeta(const std::string& s, std::ostream& out);

// "2", "0.5+14.13i", "-3.5-2i", "7i".
cplx parse_complex(const std::string& text);

// Parses argv and dispatches; returns the process exit code (0 success,
// 2 misuse or failed precondition, 3 numerical failure).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tdl::cli
