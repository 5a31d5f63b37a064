#include <gtest/gtest.h>

#include <json.hpp>

#include "tdl/errors.hpp"
#include "tdl/io.hpp"

using namespace tdl;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tdl-io-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Checkpoints, RoundTripIsExact) {
  const TwistedParams params(1.25);
  const auto grid = geometric_grid(10.0, 1e4, 1.05);
  const auto s = partial_sum_sieve(1e4, grid, params);
  const auto bytes = io::encode_checkpoints(s);
  EXPECT_EQ(bytes.substr(0, 4), "TDL1");
  EXPECT_EQ(bytes.size(), 4u + 8u + 1u + 8u + 16u * grid.size());
  const auto back = io::decode_checkpoints(bytes);
  EXPECT_EQ(back.params.theta(), 1.25);
  EXPECT_EQ(back.grid, s.grid);
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.boundary_convention, s.boundary_convention);
  const auto path = scratch("round.tdl1");
  io::write_checkpoints(path, s);
  EXPECT_EQ(io::read_file(path), bytes);
}

TEST(Checkpoints, CorruptFilesRejected) {
  const auto s = partial_sum_sieve(100.0, std::vector<double>{10.0, 100.0}, TwistedParams(1.0));
  auto bytes = io::encode_checkpoints(s);
  EXPECT_THROW(io::decode_checkpoints(bytes.substr(0, bytes.size() - 3)), IoError);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(io::decode_checkpoints(bad), IoError);
  EXPECT_THROW(io::read_checkpoints(scratch("missing.tdl1")), IoError);
}

TEST(LineCache, RoundTripPreservesSamplesAndKey) {
  PerronConfig cfg;
  cfg.t_cut = 20.0;
  cfg.panel_length = 0.5;
  const DLineCache cache(TwistedParams(1.0), cfg);
  const auto bytes = io::encode_line_cache(cache, "fp");
  std::string fp;
  const auto back = io::decode_line_cache(bytes, &fp);
  EXPECT_EQ(fp, "fp");
  EXPECT_EQ(back.grid_hash(), cache.grid_hash());
  EXPECT_TRUE(std::equal(back.values().begin(), back.values().end(), cache.values().begin()));
  EXPECT_EQ(perron_delta(1000.0, back).value, perron_delta(1000.0, cache).value);
  auto tampered = bytes;
  tampered[tampered.size() - 30] ^= 1;  // last node t: hash no longer matches
  EXPECT_THROW(io::decode_line_cache(tampered), IoError);
  EXPECT_NE(io::line_cache_name(1.0, cfg), io::line_cache_name(2.0, cfg));
}

TEST(Json, ConstantsRoundTripAndVersion) {
  const auto c = main_term_constants(TwistedParams(1.0));
  const auto text = io::constants_json(c);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["v"], 1);
  EXPECT_EQ(j["derivation"], "contour_quadrature");
  const auto back = io::parse_constants_json(text);
  EXPECT_EQ(back.omega1, c.omega1);
  EXPECT_EQ(back.omega_plus, c.omega_plus);
  EXPECT_EQ(back.omega3, c.omega3);
  EXPECT_EQ(back.fingerprint(), c.fingerprint());
  EXPECT_THROW(io::parse_constants_json("{\"v\":2}"), IoError);
  EXPECT_THROW(io::parse_constants_json("not json"), IoError);
}

TEST(Json, NonFiniteBecomesNull) {
  MomentReport r;
  r.y = std::numeric_limits<double>::infinity();
  r.tail_bound = std::numeric_limits<double>::quiet_NaN();
  const auto j = nlohmann::json::parse(io::moment_json(r));
  EXPECT_EQ(j["v"], 1);
  EXPECT_TRUE(j["y"].is_null());
  EXPECT_TRUE(j["tail_bound"].is_null());
  ExceedanceReport e;
  e.sets.push_back({"A1", 1.0, 2.0});
  const auto je = nlohmann::json::parse(io::exceedance_json(e));
  EXPECT_EQ(je["v"], 1);
  EXPECT_EQ(je["sets"][0]["name"], "A1");
  EXPECT_EQ(nlohmann::json::parse(io::zeta_json(2.0, 1.6, 10))["v"], 1);
  EXPECT_EQ(nlohmann::json::parse(io::report_json({}))["v"], 1);
}

TEST(Csv, HeadersAndRows) {
  DeltaSeries d{TwistedParams(1.0), {10.0, 20.0}, {0.5, -1.25}, ""};
  EXPECT_EQ(io::delta_csv(d), "x,delta\n10,0.5\n20,-1.25\n");
  ReconstructionReport r;
  r.rows.push_back({100.0, 1.0, std::numeric_limits<double>::quiet_NaN(), 2.0});
  EXPECT_EQ(io::report_csv(r), "x,delta_sieve,delta_perron,delta_zero_model\n100,1,,2\n");
}

TEST(Svg, SelfContainedAndDeterministic) {
  io::SvgTrace t{"trace", {10.0, 100.0, 1000.0}, {1.0, -1.0, 0.5}};
  const auto a = io::svg_chart("title", {t});
  EXPECT_EQ(a, io::svg_chart("title", {t}));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("polyline"), std::string::npos);
  EXPECT_NE(a.find("1e2"), std::string::npos);
}
