#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "test_support.hpp"
#include "vfts/config.hpp"
#include "vfts/forecast.hpp"
#include "vfts/io.hpp"

using namespace vfts;
using namespace vfts::testing;

TEST(JsonMatrix, RoundTripWithNan) {
  Eigen::MatrixXd m(2, 3);
  m << 1.0, -2.5, 1e-300, std::numeric_limits<double>::quiet_NaN(), 0.1, 3.0;
  const auto j = io::matrix_to_json(m);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 2u);
  EXPECT_TRUE(j[1][0].is_null());
  const auto back = io::matrix_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_TRUE(std::isnan(back(1, 0)));
  EXPECT_EQ(back(0, 1), -2.5);
  EXPECT_EQ(back(0, 2), 1e-300);
  EXPECT_EQ(back(1, 1), 0.1);
}

TEST(JsonModels, SampleAndPcaRoundTrip) {
  const auto s = fourier_sample(25, make_basis(8), {1.0, 0.3}, 1);
  const auto s2 = io::sample_from_json(nlohmann::json::parse(io::to_json(s).dump()));
  EXPECT_EQ(s2.basis, s.basis);
  EXPECT_EQ(s2.cycle_indices, s.cycle_indices);
  EXPECT_EQ(s2.process, s.process);
  EXPECT_EQ(s2.coefficients, s.coefficients);

  const auto m = fpca_univariate(s);
  const auto m2 = io::pca_from_json(nlohmann::json::parse(io::to_json(m).dump()));
  EXPECT_EQ(m2.eigenvalues, m.eigenvalues);
  EXPECT_EQ(m2.eigenfunctions, m.eigenfunctions);
  EXPECT_EQ(m2.scores, m.scores);
  EXPECT_EQ(m2.mean, m.mean);
  EXPECT_EQ(m2.total_variance, m.total_variance);
  ASSERT_EQ(m2.blocks.size(), 1u);
  EXPECT_EQ(m2.blocks[0].label, "reset");
}

TEST(JsonModels, VarShape) {
  const auto s = make_series(simulate_var({Eigen::MatrixXd::Identity(2, 2) * 0.4}, 200, 2));
  auto mask = std::vector<BoolMatrix>(2, BoolMatrix::Constant(2, 2, true));
  mask[1](0, 1) = false;
  const auto m = fit_var(s, 2, mask);
  const auto j = io::to_json(m);
  EXPECT_EQ(j.at("p"), 2);
  EXPECT_EQ(j.at("omega").size(), 2u);
  EXPECT_EQ(j.at("n_effective"), 198);
  EXPECT_TRUE(j.contains("sigma"));
  EXPECT_TRUE(j.contains("mask"));
  EXPECT_EQ(j.at("omega")[0][0][1].get<double>(), m.omega[0](0, 1));
  const auto m2 = io::var_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(m2.order, 2);
  EXPECT_EQ(m2.mask[1], m.mask[1]);
  EXPECT_EQ(m2.omega[1], m.omega[1]);
  EXPECT_EQ(m2.sigma, m.sigma);
  EXPECT_EQ(m2.labels, m.labels);
}

TEST(JsonModels, BundleRoundTripPredictsIdentically) {
  std::vector<FunctionalSample> samples = {fourier_sample(80, make_basis(8), {1.0, 0.4}, 3, "reset"),
                                           fourier_sample(80, make_basis(8), {0.7}, 4, "set", 3)};
  const auto b = fit_pipeline(samples, Approach::Univariate, {0.95, 2, 1.96, true, std::nullopt});
  const auto b2 = io::bundle_from_json(nlohmann::json::parse(io::to_json(b).dump()));
  EXPECT_EQ(io::to_json(b2).dump(), io::to_json(b).dump());
  const auto grid = uniform_grid(11);
  const auto f1 = forecast_curves(b, 2, grid);
  const auto f2 = forecast_curves(b2, 2, grid);
  EXPECT_EQ(f1.processes[1].predicted, f2.processes[1].predicted);
}

TEST(Csv, ForecastAndSummaryLayout) {
  ProcessForecast pf;
  pf.label = "reset";
  pf.cycle_indices = {7};
  pf.predicted = Eigen::MatrixXd::Constant(1, 2, 0.5);
  const double grid[] = {0.0, 1.0};
  std::ostringstream out;
  io::write_forecast_csv(out, pf, grid);
  EXPECT_EQ(out.str(), "cycle,t,predicted,actual\n7,0,0.5,NA\n7,1,0.5,NA\n");

  ForecastResult r;
  pf.imse = {0.25};
  r.processes = {pf};
  const std::string methods[] = {"univariate"};
  const ForecastResult results[] = {r};
  std::ostringstream sum;
  io::write_imse_summary(sum, results, methods);
  EXPECT_EQ(sum.str(), "cycle,process,method,imse\n7,reset,univariate,0.25\n");
}

TEST(Files, IoErrors) {
  EXPECT_EQ(code_of([] { io::read_json_file("/nonexistent/dir/file.json"); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([] { io::read_cycles_file("/nonexistent/cycles.csv"); }), ErrorCode::IoError);
  const auto dir = std::filesystem::temp_directory_path() / "vfts_io_test";
  std::filesystem::remove_all(dir);
  io::write_text_file(dir / "nested" / "a.txt", "x\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "nested" / "a.txt"));
  io::write_text_file(dir / "bad.json", "{not json");
  EXPECT_EQ(code_of([&] { io::read_json_file(dir / "bad.json"); }), ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

TEST(Config, Defaults) {
  const PipelineConfig c;
  EXPECT_EQ(c.jump_fraction, 0.20);
  EXPECT_EQ(c.basis_dimension, 20);
  EXPECT_EQ(c.fence_factor, 2.58);
  EXPECT_EQ(c.variance_threshold, 0.95);
  EXPECT_EQ(c.holdout, 10u);
  EXPECT_EQ(c.p_max, 10);
  EXPECT_EQ(c.prune_threshold, 1.96);
  EXPECT_EQ(c.alpha, 0.05);
  EXPECT_EQ(c.approach, "both");
  EXPECT_EQ(c.eval_grid, 201u);
}

TEST(Config, FlatFileAndRendering) {
  std::istringstream in(
      "# comment\n\nbasis_dimension = 12\nvariance_threshold=0.9 # trailing\ninput = a.csv, b.csv\n"
      "approach = multivariate\nprune = false\n");
  PipelineConfig c;
  for (const auto& [k, v] : parse_flat_config(in)) apply_setting(c, k, v);
  EXPECT_EQ(c.basis_dimension, 12);
  EXPECT_EQ(c.variance_threshold, 0.9);
  EXPECT_EQ(c.inputs, (std::vector<std::string>{"a.csv", "b.csv"}));
  EXPECT_EQ(c.approach, "multivariate");
  EXPECT_FALSE(c.prune);

  std::istringstream again(render_config(c));
  PipelineConfig d;
  for (const auto& [k, v] : parse_flat_config(again)) apply_setting(d, k, v);
  EXPECT_EQ(render_config(d), render_config(c));
  EXPECT_EQ(parse_flat_config(again).size(), 0u);
  std::istringstream keys(render_config(PipelineConfig{}));
  EXPECT_EQ(parse_flat_config(keys).size(), config_keys().size());
}

TEST(Config, BadValues) {
  PipelineConfig c;
  EXPECT_EQ(code_of([&] { apply_setting(c, "nonsense", "1"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_setting(c, "holdout", "ten"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_setting(c, "variance_threshold", "1"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_setting(c, "fence_factor", "1"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_setting(c, "approach", "neither"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_setting(c, "basis_dimension", "3"); }), ErrorCode::ConfigError);
  std::istringstream in("just words\n");
  EXPECT_EQ(code_of([&] { parse_flat_config(in); }), ErrorCode::ConfigError);
}

TEST(ErrorNames, SnakeCase) {
  EXPECT_EQ(to_string(ErrorCode::ConfigError), "config_error");
  EXPECT_EQ(to_string(ErrorCode::UnknownSubcommand), "unknown_subcommand");
  EXPECT_EQ(to_string(ErrorCode::NoSwitchPoint), "no_switch_point");
}
