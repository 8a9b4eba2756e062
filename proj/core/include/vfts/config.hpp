#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vfts {

struct PipelineConfig {
  std::vector<std::string> inputs;  // cycle CSV files
  std::string output = "out";
  double jump_fraction = 0.20;
  int basis_dimension = 20;
  double fence_factor = 2.58;
  bool screen = true;
  double variance_threshold = 0.95;
  std::size_t holdout = 10;
  int p_max = 10;
  bool prune = true;
  double prune_threshold = 1.96;
  double alpha = 0.05;
  std::string approach = "both";  // univariate | multivariate | both
  std::size_t eval_grid = 201;
  std::string forecast_mode = "one_step";
  std::string causality = "residual";  // fixed | aic | residual
  int causality_max_order = 5;
  int diagnostic_lags = 20;
  std::uint64_t seed = 1;
  std::size_t cycles = 200;   // synth
  std::size_t outliers = 0;   // synth
  double noise_sd = 0.01;     // synth
};

/// Sets one field from its textual value. Throws ConfigError for unknown
/// keys and bad values.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// `key = value` lines; blank lines and `#` comments are ignored.
std::vector<std::pair<std::string, std::string>> parse_flat_config(std::istream& in);
void load_config_file(PipelineConfig& config, const std::filesystem::path& path);

/// Every key apply_setting accepts.
const std::vector<std::string_view>& config_keys();

/// Canonical `key = value` rendering of every field.
std::string render_config(const PipelineConfig& config);

}  // namespace vfts
