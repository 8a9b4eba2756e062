#include "vfts/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vfts/error.hpp"

namespace vfts {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  fail(ErrorCode::ConfigError,
       std::string(key) + ": '" + std::string(value) + "' is not " + what);
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "an integer");
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  return parse_integer<std::size_t>(key, value);
}

int parse_int(std::string_view key, std::string_view value, int lo) {
  const int v = parse_integer<int>(key, value);
  if (v < lo) bad_value(key, value, ("at least " + std::to_string(lo)).c_str());
  return v;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "a number");
  return out;
}

double parse_fraction(std::string_view key, std::string_view value) {
  const double v = parse_real(key, value);
  if (!(v > 0.0 && v < 1.0)) bad_value(key, value, "in (0, 1)");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::string parse_choice(std::string_view key, std::string_view value,
                         std::initializer_list<std::string_view> choices) {
  for (auto c : choices)
    if (value == c) return std::string(value);
  bad_value(key, value, "a valid choice");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "input",        "output",          "jump_fraction",   "basis_dimension",
      "fence_factor", "screen",          "variance_threshold", "holdout",
      "p_max",        "prune",           "prune_threshold", "alpha",
      "approach",     "eval_grid",       "forecast_mode",   "causality",
      "causality_max_order", "diagnostic_lags", "seed",     "cycles",
      "outliers",     "noise_sd"};
  return keys;
}

void apply_setting(PipelineConfig& c, std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  if (key == "input") {
    c.inputs.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (!item.empty()) c.inputs.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else if (key == "output") {
    if (value.empty()) bad_value(key, value, "a path");
    c.output = std::string(value);
  } else if (key == "jump_fraction") {
    c.jump_fraction = parse_fraction(key, value);
  } else if (key == "basis_dimension") {
    c.basis_dimension = parse_int(key, value, 4);
  } else if (key == "fence_factor") {
    c.fence_factor = parse_real(key, value);
    if (!(c.fence_factor > 1.0)) bad_value(key, value, "greater than 1");
  } else if (key == "screen") {
    c.screen = parse_bool(key, value);
  } else if (key == "variance_threshold") {
    c.variance_threshold = parse_fraction(key, value);
  } else if (key == "holdout") {
    c.holdout = parse_count(key, value);
  } else if (key == "p_max") {
    c.p_max = parse_int(key, value, 0);
  } else if (key == "prune") {
    c.prune = parse_bool(key, value);
  } else if (key == "prune_threshold") {
    c.prune_threshold = parse_real(key, value);
    if (!(c.prune_threshold >= 0.0)) bad_value(key, value, "nonnegative");
  } else if (key == "alpha") {
    c.alpha = parse_fraction(key, value);
  } else if (key == "approach") {
    c.approach = parse_choice(key, value, {"univariate", "multivariate", "both"});
  } else if (key == "eval_grid") {
    c.eval_grid = parse_count(key, value);
    if (c.eval_grid < 2) bad_value(key, value, "at least 2");
  } else if (key == "forecast_mode") {
    c.forecast_mode = parse_choice(key, value, {"one_step", "iterated"});
  } else if (key == "causality") {
    c.causality = parse_choice(key, value, {"fixed", "aic", "residual"});
  } else if (key == "causality_max_order") {
    c.causality_max_order = parse_int(key, value, 1);
  } else if (key == "diagnostic_lags") {
    c.diagnostic_lags = parse_int(key, value, 1);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "cycles") {
    c.cycles = parse_count(key, value);
  } else if (key == "outliers") {
    c.outliers = parse_count(key, value);
  } else if (key == "noise_sd") {
    c.noise_sd = parse_real(key, value);
    if (!(c.noise_sd >= 0.0)) bad_value(key, value, "nonnegative");
  } else {
    fail(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_flat_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto text = std::string_view(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::ConfigError, "line " + std::to_string(number) + ": expected key = value");
    const auto key = trim(text.substr(0, eq));
    if (key.empty()) fail(ErrorCode::ConfigError, "line " + std::to_string(number) + ": empty key");
    out.emplace_back(std::string(key), std::string(trim(text.substr(eq + 1))));
  }
  return out;
}

void load_config_file(PipelineConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file " + path.string());
  for (const auto& [k, v] : parse_flat_config(in)) apply_setting(config, k, v);
}

std::string render_config(const PipelineConfig& c) {
  std::ostringstream out;
  std::string inputs;
  for (std::size_t i = 0; i < c.inputs.size(); ++i) inputs += (i ? "," : "") + c.inputs[i];
  out << "input = " << inputs << '\n'
      << "output = " << c.output << '\n'
      << "jump_fraction = " << fmt(c.jump_fraction) << '\n'
      << "basis_dimension = " << c.basis_dimension << '\n'
      << "fence_factor = " << fmt(c.fence_factor) << '\n'
      << "screen = " << (c.screen ? "true" : "false") << '\n'
      << "variance_threshold = " << fmt(c.variance_threshold) << '\n'
      << "holdout = " << c.holdout << '\n'
      << "p_max = " << c.p_max << '\n'
      << "prune = " << (c.prune ? "true" : "false") << '\n'
      << "prune_threshold = " << fmt(c.prune_threshold) << '\n'
      << "alpha = " << fmt(c.alpha) << '\n'
      << "approach = " << c.approach << '\n'
      << "eval_grid = " << c.eval_grid << '\n'
      << "forecast_mode = " << c.forecast_mode << '\n'
      << "causality = " << c.causality << '\n'
      << "causality_max_order = " << c.causality_max_order << '\n'
      << "diagnostic_lags = " << c.diagnostic_lags << '\n'
      << "seed = " << c.seed << '\n'
      << "cycles = " << c.cycles << '\n'
      << "outliers = " << c.outliers << '\n'
      << "noise_sd = " << fmt(c.noise_sd) << '\n';
  return out.str();
}

}  // namespace vfts
