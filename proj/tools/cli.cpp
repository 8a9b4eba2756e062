#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vfts/basis.hpp"
#include "vfts/causality.hpp"
#include "vfts/diagnostics.hpp"
#include "vfts/error.hpp"
#include "vfts/forecast.hpp"
#include "vfts/fpca.hpp"
#include "vfts/ingest.hpp"
#include "vfts/io.hpp"
#include "vfts/screen.hpp"
#include "vfts/synth.hpp"
#include "vfts/var.hpp"

namespace vfts::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stacking order of processes in every multi-process artifact.
constexpr Process kProcessOrder[] = {Process::Reset, Process::Set};

/// Thrown to attach the failing stage to a library error.
struct StageError {
  std::string stage;
  ErrorCode code;
  std::string message;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

fs::path dir_of(const PipelineConfig& c) { return fs::path(c.output); }

fs::path artifact(const PipelineConfig& c, const std::string& stem, std::string_view label,
                  const char* ext) {
  return dir_of(c) / (stem + "_" + std::string(label) + ext);
}

std::vector<Approach> approaches(const PipelineConfig& c) {
  if (c.approach == "univariate") return {Approach::Univariate};
  if (c.approach == "multivariate") return {Approach::Multivariate};
  return {Approach::Univariate, Approach::Multivariate};
}

std::vector<FunctionalSample> load_samples(const PipelineConfig& c, const std::string& stem) {
  std::vector<FunctionalSample> out;
  for (auto p : kProcessOrder) {
    const auto path = artifact(c, stem, to_string(p), ".json");
    if (fs::exists(path)) out.push_back(io::sample_from_json(io::read_json_file(path)));
  }
  if (out.empty())
    fail(ErrorCode::IoError, "no " + stem + "_<process>.json files in " + c.output);
  return out;
}

ForecastBundle load_bundle(const PipelineConfig& c, Approach a) {
  return io::bundle_from_json(io::read_json_file(artifact(c, "bundle", to_string(a), ".json")));
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------- stages

std::string stage_ingest(const PipelineConfig& c) {
  if (c.inputs.empty()) fail(ErrorCode::ConfigError, "ingest needs at least one input file");
  std::map<Process, std::vector<RegisteredCurve>> curves;
  std::set<std::pair<std::size_t, Process>> seen;
  SwitchRule rule;
  rule.jump_fraction = c.jump_fraction;
  for (const auto& path : c.inputs) {
    for (const auto& cycle : io::read_cycles_file(path)) {
      if (!seen.emplace(cycle.cycle_index, cycle.process).second)
        fail(ErrorCode::MalformedRow, "cycle " + std::to_string(cycle.cycle_index) + " " +
                                          std::string(to_string(cycle.process)) +
                                          " appears in more than one input");
      curves[cycle.process].push_back(ingest_cycle(cycle, rule));
    }
  }
  std::string detail;
  for (auto p : kProcessOrder) {
    auto it = curves.find(p);
    if (it == curves.end()) continue;
    std::sort(it->second.begin(), it->second.end(),
              [](const auto& a, const auto& b) { return a.cycle_index < b.cycle_index; });
    io::write_json_file(artifact(c, "curves", to_string(p), ".json"), io::to_json(it->second));
    detail += " " + std::string(to_string(p)) + "=" + std::to_string(it->second.size());
  }
  return "ingest: registered curves" + detail;
}

std::string stage_smooth(const PipelineConfig& c) {
  const auto basis = make_basis(c.basis_dimension);
  std::string detail;
  int found = 0;
  for (auto p : kProcessOrder) {
    const auto path = artifact(c, "curves", to_string(p), ".json");
    if (!fs::exists(path)) continue;
    const auto curves = io::curves_from_json(io::read_json_file(path));
    const auto sample = smooth_curves(curves, basis, std::string(to_string(p)));
    io::write_json_file(artifact(c, "samples", to_string(p), ".json"), io::to_json(sample));
    detail += " " + std::string(to_string(p)) + "=" + std::to_string(sample.size());
    ++found;
  }
  if (!found) fail(ErrorCode::IoError, "no curves_<process>.json files in " + c.output);
  return "smooth: K=" + std::to_string(c.basis_dimension) + detail;
}

std::string stage_screen(const PipelineConfig& c) {
  auto samples = load_samples(c, "samples");
  // Keep only cycles observed in every process.
  std::set<std::size_t> common(samples.front().cycle_indices.begin(),
                               samples.front().cycle_indices.end());
  std::set<std::size_t> all = common;
  for (const auto& s : samples) {
    std::set<std::size_t> here(s.cycle_indices.begin(), s.cycle_indices.end());
    all.insert(here.begin(), here.end());
    std::set<std::size_t> kept;
    std::set_intersection(common.begin(), common.end(), here.begin(), here.end(),
                          std::inserter(kept, kept.begin()));
    common = std::move(kept);
  }
  std::vector<std::size_t> unpaired;
  std::set_difference(all.begin(), all.end(), common.begin(), common.end(),
                      std::back_inserter(unpaired));
  for (auto& s : samples) s = remove_cycles(s, unpaired);

  json reports = json::object();
  std::vector<std::size_t> flagged;
  if (c.screen) {
    std::vector<OutlierReport> per_process;
    flagged = flagged_cycles(samples, c.fence_factor, &per_process);
    for (std::size_t h = 0; h < samples.size(); ++h)
      reports[samples[h].process] = io::to_json(per_process[h]);
  }
  io::write_json_file(dir_of(c) / "outliers.json", {{"screen", c.screen},
                                                    {"fence_factor", c.fence_factor},
                                                    {"flagged_cycles", flagged},
                                                    {"unpaired_cycles", unpaired},
                                                    {"reports", reports}});
  for (const auto& s : samples) {
    const auto kept = remove_cycles(s, flagged);
    io::write_json_file(artifact(c, "screened", s.process, ".json"), io::to_json(kept));
  }
  return "screen: flagged " + std::to_string(flagged.size()) + " cycles, dropped " +
         std::to_string(unpaired.size()) + " unpaired, kept " +
         std::to_string(samples.front().size() - flagged.size());
}

std::string stage_fpca(const PipelineConfig& c, std::ostream& out) {
  const auto samples = load_samples(c, "screened");
  std::vector<std::string> columns;
  std::vector<PcaModel> models;
  for (const auto& s : samples) {
    models.push_back(fpca_univariate(s));
    columns.push_back(s.process);
    io::write_json_file(artifact(c, "fpca", s.process, ".json"), io::to_json(models.back()));
  }
  if (samples.size() > 1) {
    models.push_back(fpca_multivariate(samples));
    columns.push_back("multivariate");
    io::write_json_file(dir_of(c) / "fpca_joint.json", io::to_json(models.back()));
  }

  constexpr std::size_t kRows = 6;
  std::ostringstream table;
  table << "Cumulative variability (%) explained by the first " << kRows << " PCs\n";
  char cell[32];
  std::snprintf(cell, sizeof cell, "%-8s", "PCs");
  table << cell;
  for (const auto& col : columns) {
    std::snprintf(cell, sizeof cell, "%14s", col.c_str());
    table << cell;
  }
  table << '\n';
  std::vector<std::vector<double>> shares;
  for (const auto& m : models) shares.push_back(cumulative_share(m, kRows));
  for (std::size_t r = 0; r < kRows; ++r) {
    char head[16];
    std::snprintf(head, sizeof head, "%-8zu", r + 1);
    table << head;
    for (const auto& s : shares) {
      if (r < s.size())
        std::snprintf(cell, sizeof cell, "%14.2f", 100.0 * s[r]);
      else
        std::snprintf(cell, sizeof cell, "%14s", "-");
      table << cell;
    }
    table << '\n';
  }
  table << "q at " << fmt(100.0 * c.variance_threshold, "%.4g") << "%:";
  std::string summary = "fpca: q =";
  for (std::size_t m = 0; m < models.size(); ++m) {
    const int q = choose_q(models[m].eigenvalues, c.variance_threshold);
    table << ' ' << columns[m] << '=' << q;
    summary += " " + columns[m] + "=" + std::to_string(q);
  }
  table << '\n';
  out << table.str();
  io::write_text_file(dir_of(c) / "fpca_table.txt", table.str());
  return summary;
}

std::string stage_fit(const PipelineConfig& c) {
  const auto samples = load_samples(c, "screened");
  const auto split = split_train_test(samples, c.holdout);
  for (const auto& s : split.train)
    io::write_json_file(artifact(c, "train", s.process, ".json"), io::to_json(s));
  for (const auto& s : split.test)
    io::write_json_file(artifact(c, "test", s.process, ".json"), io::to_json(s));
  FitConfig fit;
  fit.variance_threshold = c.variance_threshold;
  fit.max_order = c.p_max;
  fit.prune = c.prune;
  fit.prune_threshold = c.prune_threshold;
  std::string summary = "fit: train=" + std::to_string(split.train.front().size()) +
                        " test=" + std::to_string(split.test.front().size());
  for (auto a : approaches(c)) {
    const auto bundle = fit_pipeline(split.train, a, fit);
    io::write_json_file(artifact(c, "bundle", to_string(a), ".json"), io::to_json(bundle));
    summary += " " + std::string(to_string(a)) + ":dim=" +
               std::to_string(bundle.score_dimension()) + ",p=" + std::to_string(bundle.var.order);
  }
  return summary;
}

std::string stage_causality(const PipelineConfig& c) {
  std::string summary = "causality:";
  for (auto a : approaches(c)) {
    const auto bundle = load_bundle(c, a);
    const auto label = to_string(a);
    if (bundle.score_dimension() < 2) {
      io::write_json_file(artifact(c, "causality", label, ".json"),
                          {{"labels", bundle.scores.labels}, {"skipped", "fewer than two series"}});
      io::write_text_file(artifact(c, "causality", label, ".txt"), "fewer than two series\n");
      summary += " " + std::string(label) + "=skipped";
      continue;
    }
    LagSelector selector;
    if (c.causality == "fixed") {
      const int lags = std::max(1, bundle.var.order);
      selector = LagSelector::fixed(lags, lags);
    } else if (c.causality == "aic") {
      selector = LagSelector::aic(c.causality_max_order, 1);
    } else {
      selector = LagSelector::residual(c.causality_max_order, 1);
    }
    const auto report = causality_matrix(bundle.scores, selector, c.alpha);

    // Transfer-function model of every effect on its significant causes.
    json transfer = json::array();
    const auto q = bundle.score_dimension();
    for (Eigen::Index e = 0; e < q; ++e) {
      std::vector<TransferInput> inputs;
      for (Eigen::Index k = 0; k < q; ++k) {
        if (k == e || !report.decisions(e, k)) continue;
        const Eigen::VectorXd col = bundle.scores.values.col(k);
        inputs.push_back({bundle.scores.labels[static_cast<std::size_t>(k)],
                          std::vector<double>(col.data(), col.data() + col.size()),
                          {1}});
      }
      if (inputs.empty()) continue;
      const Eigen::VectorXd y = bundle.scores.values.col(e);
      const auto& name = bundle.scores.labels[static_cast<std::size_t>(e)];
      try {
        transfer.push_back(io::to_json(fit_transfer_function(
            name, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), inputs,
            1)));
      } catch (const Error& err) {
        transfer.push_back({{"output", name}, {"error", to_string(err.code())}, {"message", err.what()}});
      }
    }
    auto j = io::to_json(report);
    j["mode"] = c.causality;
    j["transfer_functions"] = transfer;
    io::write_json_file(artifact(c, "causality", label, ".json"), j);
    io::write_text_file(artifact(c, "causality", label, ".txt"), render_arrow_table(report));
    summary += " " + std::string(label) + "=" + std::to_string(report.arrow_count()) + " arrows";
  }
  return summary;
}

std::string stage_diagnose(const PipelineConfig& c) {
  std::string summary = "diagnose:";
  for (auto a : approaches(c)) {
    const auto bundle = load_bundle(c, a);
    const auto label = to_string(a);
    const Eigen::MatrixXd res = residuals(bundle.var, bundle.scores);
    const int lags = std::min<int>(c.diagnostic_lags,
                                   static_cast<int>(res.rows() - res.cols()) - 1);
    if (lags <= bundle.var.order)
      fail(ErrorCode::InsufficientData, "too few residuals for the diagnostic lags");
    const auto report = whiteness_report(res, lags, bundle.var.order, c.alpha);
    io::write_json_file(artifact(c, "whiteness", label, ".json"), io::to_json(report));
    std::ostringstream csv;
    write_whiteness_csv(csv, report);
    io::write_text_file(artifact(c, "whiteness", label, ".csv"), csv.str());
    summary += " " + std::string(label) + "=" + (report.adequate_first_5 ? "white" : "not-white");
  }
  return summary;
}

std::optional<ForecastMode> mode_of(const PipelineConfig& c) {
  return parse_forecast_mode(c.forecast_mode);
}

std::string stage_forecast(const PipelineConfig& c) {
  const auto grid = uniform_grid(c.eval_grid);
  const auto test = load_samples(c, "test");
  std::string summary = "forecast (" + c.forecast_mode + "):";
  for (auto a : approaches(c)) {
    const auto bundle = load_bundle(c, a);
    const auto result = test.front().size() > 0 ? forecast_test(bundle, test, grid, *mode_of(c))
                                                : forecast_curves(bundle, 1, grid);
    for (const auto& p : result.processes) {
      std::ostringstream csv;
      io::write_forecast_csv(csv, p, grid);
      io::write_text_file(dir_of(c) / ("forecast_" + std::string(to_string(a)) + "_" + p.label + ".csv"),
                          csv.str());
      std::ostringstream band;
      band << "t,variance\n";
      for (std::size_t g = 0; g < grid.size(); ++g)
        band << fmt(grid[g], "%.12g") << ',' << fmt(p.variance_band(static_cast<Eigen::Index>(g)), "%.12g") << '\n';
      io::write_text_file(dir_of(c) / ("band_" + std::string(to_string(a)) + "_" + p.label + ".csv"),
                          band.str());
    }
    summary += " " + std::string(to_string(a)) + "=" +
               std::to_string(result.processes.front().predicted.rows()) + " cycles";
  }
  return summary;
}

std::string stage_evaluate(const PipelineConfig& c) {
  const auto grid = uniform_grid(c.eval_grid);
  const auto test = load_samples(c, "test");
  if (test.front().size() == 0) {
    io::write_text_file(dir_of(c) / "imse_summary.csv", "cycle,process,method,imse\n");
    return "evaluate: empty test set";
  }
  std::vector<ForecastResult> results;
  std::vector<std::string> methods;
  std::optional<ForecastBundle> first;
  for (auto a : approaches(c)) {
    auto bundle = load_bundle(c, a);
    results.push_back(forecast_test(bundle, test, grid, *mode_of(c)));
    methods.emplace_back(to_string(a));
    if (!first) first = std::move(bundle);
  }
  results.push_back(mean_baseline(*first, test, grid));
  methods.emplace_back("mean");

  std::ostringstream summary_csv;
  io::write_imse_summary(summary_csv, results, methods);
  io::write_text_file(dir_of(c) / "imse_summary.csv", summary_csv.str());

  std::ostringstream box;
  box << "method,process,n,min,q1,median,q3,max\n";
  std::string summary = "evaluate: median IMSE";
  for (std::size_t r = 0; r < results.size(); ++r) {
    for (const auto& p : results[r].processes) {
      box << methods[r] << ',' << p.label << ',' << p.imse.size() << ','
          << fmt(quantile(p.imse, 0.0), "%.12g") << ',' << fmt(quantile(p.imse, 0.25), "%.12g") << ','
          << fmt(quantile(p.imse, 0.5), "%.12g") << ',' << fmt(quantile(p.imse, 0.75), "%.12g") << ','
          << fmt(quantile(p.imse, 1.0), "%.12g") << '\n';
    }
    summary += " " + methods[r] + "=" + fmt(median_imse(results[r]), "%.4g");
  }
  io::write_text_file(dir_of(c) / "imse_boxplot.csv", box.str());
  return summary;
}

std::string stage_synth(const PipelineConfig& c) {
  const auto output = generate(default_synth_config(c));
  for (std::size_t h = 0; h < output.cycles.size(); ++h) {
    const auto label = to_string(output.truth.processes[h].process);
    io::write_cycles_file(artifact(c, "cycles", label, ".csv"), output.cycles[h]);
  }
  io::write_json_file(dir_of(c) / "ground_truth.json", io::to_json(output.truth));
  return "synth: " + std::to_string(c.cycles) + " cycles, " +
         std::to_string(output.truth.outlier_cycles.size()) + " outliers, seed " +
         std::to_string(c.seed) + " -> " + c.output;
}

// ---------------------------------------------------------------- driver

struct Parsed {
  PipelineConfig config;
  bool help = false;
  std::string help_text;
};

void add_alias(std::map<std::string, std::string>& aliases, const std::string& alias,
               const std::string& key) {
  aliases.emplace(alias, key);
}

Parsed parse_arguments(std::string_view name, const std::vector<std::string>& args) {
  CLI::App app{"vfts " + std::string(name), "vfts " + std::string(name)};
  app.set_help_flag("-h,--help", "Show this help");
  std::string config_path;
  app.add_option("-c,--config", config_path, "Flat key = value config file");

  // Every config key is also a flag; flags override the file.
  std::map<std::string, std::string> values;
  std::vector<std::string> inputs;
  app.add_option("-i,--input", inputs, "Cycle CSV file(s)")->expected(1, -1);
  app.add_option("-o,--output", values["output"], "Output directory");
  std::map<std::string, std::string> aliases;
  add_alias(aliases, "threshold", "variance_threshold");
  add_alias(aliases, "basis", "basis_dimension");
  add_alias(aliases, "fence", "fence_factor");
  add_alias(aliases, "mode", "forecast_mode");
  for (auto key : config_keys()) {
    const std::string k(key);
    if (k == "input" || k == "output") continue;
    std::string names = "--" + k;
    std::string dashed = k;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (dashed != k) names += ",--" + dashed;
    for (const auto& [alias, target] : aliases)
      if (target == k) names += ",--" + alias;
    app.add_option(names, values[k], k);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  Parsed parsed;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    parsed.help = true;
    parsed.help_text = app.help();
    return parsed;
  } catch (const CLI::ParseError& e) {
    fail(ErrorCode::ConfigError, e.what());
  }

  if (!config_path.empty()) load_config_file(parsed.config, config_path);
  if (!inputs.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < inputs.size(); ++i) joined += (i ? "," : "") + inputs[i];
    apply_setting(parsed.config, "input", joined);
  }
  for (auto key : config_keys()) {
    const std::string k(key);
    if (k == "input") continue;
    if (auto* opt = app.get_option_no_throw("--" + k); opt && opt->count() > 0)
      apply_setting(parsed.config, k, values[k]);
  }
  if (app.get_option("--output")->count() > 0) apply_setting(parsed.config, "output", values["output"]);
  return parsed;
}

std::string run_stage(std::string_view name, const PipelineConfig& c, std::ostream& out) {
  if (name == "ingest") return stage_ingest(c);
  if (name == "smooth") return stage_smooth(c);
  if (name == "screen") return stage_screen(c);
  if (name == "fpca") return stage_fpca(c, out);
  if (name == "fit") return stage_fit(c);
  if (name == "causality") return stage_causality(c);
  if (name == "diagnose") return stage_diagnose(c);
  if (name == "forecast") return stage_forecast(c);
  if (name == "evaluate") return stage_evaluate(c);
  if (name == "synth") return stage_synth(c);
  fail(ErrorCode::UnknownSubcommand, "unknown subcommand '" + std::string(name) + "'");
}

std::string guarded_stage(std::string_view name, const PipelineConfig& c, std::ostream& out) {
  try {
    return run_stage(name, c, out);
  } catch (const Error& e) {
    throw StageError{std::string(name), e.code(), e.what()};
  } catch (const std::exception& e) {
    throw StageError{std::string(name), ErrorCode::InvalidArgument, e.what()};
  }
}

void report(std::ostream& err, const std::string& stage, ErrorCode code, const std::string& message) {
  err << json{{"error", to_string(code)}, {"stage", stage}, {"message", message}}.dump() << '\n';
}

}  // namespace

const std::vector<std::string_view>& subcommands() {
  static const std::vector<std::string_view> names = {
      "ingest", "smooth", "screen", "fpca", "fit", "causality",
      "diagnose", "forecast", "evaluate", "synth", "pipeline"};
  return names;
}

SynthConfig default_synth_config(const PipelineConfig& config) {
  SynthConfig s;
  s.n_cycles = config.cycles;
  s.seed = config.seed;
  s.outliers = config.outliers;

  SynthProcess reset;
  reset.process = Process::Reset;
  reset.eigenvalues = {0.08, 0.03, 0.01};
  reset.mean_level = -9.0;
  reset.mean_amplitude = 1.5;
  reset.noise_sd = config.noise_sd;
  reset.switch_voltage = 0.6;
  reset.switch_voltage_sd = 0.05;

  SynthProcess set;
  set.process = Process::Set;
  set.eigenvalues = {0.05, 0.02};
  set.mean_level = -12.0;
  set.mean_amplitude = 3.0;
  set.noise_sd = config.noise_sd;
  set.switch_voltage = 1.2;
  set.switch_voltage_sd = 0.05;

  s.processes = {reset, set};
  Eigen::MatrixXd omega(5, 5);
  omega << 0.6, 0.0, 0.0, 0.2, 0.0,
           0.0, 0.5, 0.0, 0.0, 0.0,
           0.0, 0.0, 0.3, 0.0, 0.0,
           0.3, 0.0, 0.0, 0.5, 0.0,
           0.0, 0.0, 0.0, 0.0, 0.4;
  s.omega = {omega};
  return s;
}

int run_subcommand(std::string_view name, const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    report(err, "cli", ErrorCode::UnknownSubcommand,
           "unknown subcommand '" + std::string(name) + "'");
    return 2;
  }
  Parsed parsed;
  try {
    parsed = parse_arguments(name, args);
  } catch (const Error& e) {
    report(err, "cli", e.code(), e.what());
    return 2;
  }
  if (parsed.help) {
    out << parsed.help_text;
    return 0;
  }
  const auto& config = parsed.config;
  try {
    if (name == "pipeline") {
      for (auto stage : {"ingest", "smooth", "screen", "fpca", "fit", "causality", "diagnose",
                         "forecast", "evaluate"})
        out << guarded_stage(stage, config, out) << '\n';
      io::write_text_file(dir_of(config) / "config_used.txt", render_config(config));
      out << "pipeline: done -> " << config.output << '\n';
    } else {
      out << guarded_stage(name, config, out) << '\n';
    }
  } catch (const StageError& e) {
    report(err, e.stage, e.code, e.stage + ": " + e.message);
    return 1;
  }
  return 0;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args.front() == "-h" || args.front() == "--help") {
    std::ostream& out = args.empty() ? std::cerr : std::cout;
    out << "usage: vfts <subcommand> [flags]\nsubcommands:";
    for (auto n : subcommands()) out << ' ' << n;
    out << "\nrun `vfts <subcommand> --help` for flags\n";
    return args.empty() ? 2 : 0;
  }
  const std::string name = args.front();
  args.erase(args.begin());
  return run_subcommand(name, args, std::cout, std::cerr);
}

}  // namespace vfts::cli
