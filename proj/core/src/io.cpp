#include "vfts/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "vfts/error.hpp"

namespace vfts::io {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

const json& at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorCode::IoError, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json matrices_to_json(const std::vector<Eigen::MatrixXd>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(matrix_to_json(m));
  return a;
}

std::vector<Eigen::MatrixXd> matrices_from_json(const json& j) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

json synth_process_to_json(const SynthProcess& p) {
  return {{"process", to_string(p.process)},
          {"eigenvalues", p.eigenvalues},
          {"functions", p.functions},
          {"mean_level", p.mean_level},
          {"mean_amplitude", p.mean_amplitude},
          {"grid_points", p.grid_points},
          {"jitter", p.jitter},
          {"noise_sd", p.noise_sd},
          {"switch_voltage", p.switch_voltage},
          {"switch_voltage_sd", p.switch_voltage_sd}};
}

SynthProcess synth_process_from_json(const json& j) {
  SynthProcess p;
  const auto proc = parse_process(at(j, "process").get<std::string>());
  if (!proc) fail(ErrorCode::IoError, "unknown process label");
  p.process = *proc;
  p.eigenvalues = at(j, "eigenvalues").get<std::vector<double>>();
  p.functions = at(j, "functions").get<std::vector<int>>();
  p.mean_level = at(j, "mean_level").get<double>();
  p.mean_amplitude = at(j, "mean_amplitude").get<double>();
  p.grid_points = at(j, "grid_points").get<std::size_t>();
  p.jitter = at(j, "jitter").get<double>();
  p.noise_sd = at(j, "noise_sd").get<double>();
  p.switch_voltage = at(j, "switch_voltage").get<double>();
  p.switch_voltage_sd = at(j, "switch_voltage_sd").get<double>();
  return p;
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::IoError, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(ErrorCode::IoError, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = number_from(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::IoError, "vector must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from(j[i]);
  return v;
}

json bool_matrix_to_json(const BoolMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(static_cast<bool>(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

BoolMatrix bool_matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  BoolMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<bool>();
  return m;
}

json to_json(const BasisSpec& basis) {
  return {{"K", basis.dimension}, {"order", basis.order}, {"knots", basis.knots}};
}

BasisSpec basis_from_json(const json& j) {
  BasisSpec b;
  b.dimension = at(j, "K").get<int>();
  b.order = j.value("order", 4);
  b.knots = at(j, "knots").get<std::vector<double>>();
  return b;
}

json to_json(const FunctionalSample& sample) {
  return {{"basis", to_json(sample.basis)},
          {"process", sample.process},
          {"cycle_indices", sample.cycle_indices},
          {"coefficients", matrix_to_json(sample.coefficients)}};
}

FunctionalSample sample_from_json(const json& j) {
  FunctionalSample s;
  s.basis = basis_from_json(at(j, "basis"));
  s.process = at(j, "process").get<std::string>();
  s.cycle_indices = at(j, "cycle_indices").get<std::vector<std::size_t>>();
  s.coefficients = matrix_from_json(at(j, "coefficients"));
  if (s.coefficients.rows() != static_cast<Eigen::Index>(s.cycle_indices.size()))
    fail(ErrorCode::IoError, "coefficient rows differ from the cycle count");
  if (s.coefficients.rows() > 0 && s.coefficients.cols() != s.basis.dimension)
    fail(ErrorCode::IoError, "coefficient columns differ from the basis dimension");
  return s;
}

json to_json(const std::vector<RegisteredCurve>& curves) {
  json a = json::array();
  for (const auto& c : curves)
    a.push_back({{"cycle", c.cycle_index},
                 {"process", to_string(c.process)},
                 {"switch_voltage", c.switch_voltage},
                 {"grid", c.grid},
                 {"values", c.values}});
  return a;
}

std::vector<RegisteredCurve> curves_from_json(const json& j) {
  std::vector<RegisteredCurve> out;
  for (const auto& c : j) {
    RegisteredCurve r;
    r.cycle_index = at(c, "cycle").get<std::size_t>();
    const auto p = parse_process(at(c, "process").get<std::string>());
    if (!p) fail(ErrorCode::IoError, "unknown process label");
    r.process = *p;
    r.switch_voltage = at(c, "switch_voltage").get<double>();
    r.grid = at(c, "grid").get<std::vector<double>>();
    r.values = at(c, "values").get<std::vector<double>>();
    out.push_back(std::move(r));
  }
  return out;
}

json to_json(const PcaModel& model) {
  json blocks = json::array();
  for (const auto& b : model.blocks)
    blocks.push_back({{"label", b.label}, {"basis", to_json(b.basis)}, {"offset", b.offset}});
  return {{"kind", model.kind == PcaKind::Univariate ? "univariate" : "multivariate"},
          {"blocks", blocks},
          {"mean_coefficients", vector_to_json(model.mean)},
          {"eigenvalues", vector_to_json(model.eigenvalues)},
          // one array per component
          {"eigenfunction_coefficients", matrix_to_json(model.eigenfunctions.transpose())},
          {"scores", matrix_to_json(model.scores)},
          {"total_variance", model.total_variance},
          {"cycle_indices", model.cycle_indices}};
}

PcaModel pca_from_json(const json& j) {
  PcaModel m;
  m.kind = at(j, "kind").get<std::string>() == "univariate" ? PcaKind::Univariate
                                                            : PcaKind::Multivariate;
  for (const auto& b : at(j, "blocks"))
    m.blocks.push_back({at(b, "label").get<std::string>(), basis_from_json(at(b, "basis")),
                        at(b, "offset").get<Eigen::Index>()});
  m.mean = vector_from_json(at(j, "mean_coefficients"));
  m.eigenvalues = vector_from_json(at(j, "eigenvalues"));
  m.eigenfunctions = matrix_from_json(at(j, "eigenfunction_coefficients")).transpose();
  m.scores = matrix_from_json(at(j, "scores"));
  m.total_variance = at(j, "total_variance").get<double>();
  m.cycle_indices = at(j, "cycle_indices").get<std::vector<std::size_t>>();
  return m;
}

json to_json(const ScoreSeries& series) {
  return {{"labels", series.labels},
          {"origin", series.origin},
          {"values", matrix_to_json(series.values)}};
}

ScoreSeries series_from_json(const json& j) {
  ScoreSeries s;
  s.labels = at(j, "labels").get<std::vector<std::string>>();
  s.origin = j.value("origin", std::string{});
  s.values = matrix_from_json(at(j, "values"));
  if (s.values.rows() > 0 && s.values.cols() != static_cast<Eigen::Index>(s.labels.size()))
    fail(ErrorCode::IoError, "score columns differ from the label count");
  return s;
}

json to_json(const VarModel& model) {
  json masks = json::array();
  for (const auto& m : model.mask) masks.push_back(bool_matrix_to_json(m));
  return {{"p", model.order},
          {"labels", model.labels},
          {"omega", matrices_to_json(model.omega)},
          {"mask", masks},
          {"std_errors", matrices_to_json(model.std_errors)},
          {"sigma", matrix_to_json(model.sigma)},
          {"n_effective", model.n_effective},
          {"has_intercept", model.has_intercept},
          {"intercept", vector_to_json(model.intercept)}};
}

VarModel var_from_json(const json& j) {
  VarModel m;
  m.order = at(j, "p").get<int>();
  m.labels = at(j, "labels").get<std::vector<std::string>>();
  m.omega = matrices_from_json(at(j, "omega"));
  for (const auto& b : at(j, "mask")) m.mask.push_back(bool_matrix_from_json(b));
  m.std_errors = matrices_from_json(at(j, "std_errors"));
  m.sigma = matrix_from_json(at(j, "sigma"));
  m.n_effective = at(j, "n_effective").get<Eigen::Index>();
  m.has_intercept = at(j, "has_intercept").get<bool>();
  m.intercept = vector_from_json(at(j, "intercept"));
  if (static_cast<int>(m.omega.size()) != m.order) fail(ErrorCode::IoError, "omega count differs from the order");
  return m;
}

json to_json(const ForecastBundle& bundle) {
  json pca = json::array();
  for (const auto& m : bundle.pca) pca.push_back(to_json(m));
  return {{"approach", to_string(bundle.approach)},
          {"processes", bundle.processes},
          {"q", bundle.q},
          {"train_range", {bundle.train_first, bundle.train_last}},
          {"max_order_used", bundle.max_order_used},
          {"pca", pca},
          {"scores", to_json(bundle.scores)},
          {"var", to_json(bundle.var)}};
}

ForecastBundle bundle_from_json(const json& j) {
  ForecastBundle b;
  const auto approach = parse_approach(at(j, "approach").get<std::string>());
  if (!approach) fail(ErrorCode::IoError, "unknown approach");
  b.approach = *approach;
  b.processes = at(j, "processes").get<std::vector<std::string>>();
  b.q = at(j, "q").get<std::vector<int>>();
  const auto range = at(j, "train_range").get<std::vector<std::size_t>>();
  if (range.size() != 2) fail(ErrorCode::IoError, "train_range must have two entries");
  b.train_first = range[0];
  b.train_last = range[1];
  b.max_order_used = at(j, "max_order_used").get<int>();
  for (const auto& m : at(j, "pca")) b.pca.push_back(pca_from_json(m));
  b.scores = series_from_json(at(j, "scores"));
  b.var = var_from_json(at(j, "var"));
  return b;
}

json to_json(const OutlierReport& report) {
  json flagged = json::array();
  for (std::size_t i = 0; i < report.flags.size(); ++i)
    if (report.flags[i]) flagged.push_back(i);
  return {{"fence_factor", report.fence_factor},
          {"degenerate", report.degenerate},
          {"median_index", report.median_index},
          {"flagged_rows", flagged},
          {"depths", vector_to_json(report.depths)},
          {"scores", matrix_to_json(report.scores2d)}};
}

json to_json(const CausalityReport& report) {
  return {{"labels", report.labels},
          {"alpha", report.alpha},
          {"own_lags", report.own_lags},
          {"cause_lags", report.cause_lags},
          {"prewhitening_orders", report.prewhitening_orders},
          {"p_values", matrix_to_json(report.p_values)},
          {"decisions", bool_matrix_to_json(report.decisions)},
          {"arrows", report.arrow_count()}};
}

json to_json(const TransferFunctionModel& model) {
  return {{"output", model.output_label},
          {"inputs", model.input_labels},
          {"input_lags", model.input_lags},
          {"input_coefficients", model.input_coefficients},
          {"input_std_errors", model.input_std_errors},
          {"intercept", model.intercept},
          {"noise_ar_order", model.noise_ar_order},
          {"noise_ar_coefficients", model.noise_ar_coefficients},
          {"residual_variance", model.residual_variance},
          {"iterations", model.iterations}};
}

json to_json(const WhitenessReport& report) {
  auto numbers = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  return {{"max_lag", report.max_lag},
          {"fitted_order", report.fitted_order},
          {"dimension", report.dimension},
          {"alpha", report.alpha},
          {"ccm_statistics", numbers(report.ccm_statistics)},
          {"ccm_p_values", numbers(report.ccm_p_values)},
          {"portmanteau_statistics", numbers(report.portmanteau_statistics)},
          {"portmanteau_p_values", numbers(report.portmanteau_p_values)},
          {"adequate_first_5", report.adequate_first_5}};
}

json to_json(const GroundTruth& truth) {
  json processes = json::array();
  for (const auto& p : truth.processes) processes.push_back(synth_process_to_json(p));
  return {{"seed", truth.seed},
          {"burn_in", truth.burn_in},
          {"processes", processes},
          {"cycle_indices", truth.cycle_indices},
          {"switch_voltages", truth.switch_voltages},
          {"outlier_cycles", truth.outlier_cycles},
          {"omega", matrices_to_json(truth.omega)},
          {"innovation_cov", matrix_to_json(truth.innovation_cov)},
          {"scores", matrix_to_json(truth.scores)}};
}

GroundTruth truth_from_json(const json& j) {
  GroundTruth t;
  t.seed = at(j, "seed").get<std::uint64_t>();
  t.burn_in = at(j, "burn_in").get<int>();
  for (const auto& p : at(j, "processes")) t.processes.push_back(synth_process_from_json(p));
  t.cycle_indices = at(j, "cycle_indices").get<std::vector<std::size_t>>();
  t.switch_voltages = at(j, "switch_voltages").get<std::vector<double>>();
  t.outlier_cycles = at(j, "outlier_cycles").get<std::vector<std::size_t>>();
  t.omega = matrices_from_json(at(j, "omega"));
  t.innovation_cov = matrix_from_json(at(j, "innovation_cov"));
  t.scores = matrix_from_json(at(j, "scores"));
  return t;
}

void write_forecast_csv(std::ostream& out, const ProcessForecast& forecast,
                        std::span<const double> grid) {
  out << "cycle,t,predicted,actual\n";
  for (Eigen::Index i = 0; i < forecast.predicted.rows(); ++i) {
    const auto cycle = static_cast<std::size_t>(i) < forecast.cycle_indices.size()
                           ? std::to_string(forecast.cycle_indices[static_cast<std::size_t>(i)])
                           : "h" + std::to_string(i + 1);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto gi = static_cast<Eigen::Index>(g);
      out << cycle << ',' << fmt(grid[g]) << ',' << fmt(forecast.predicted(i, gi)) << ','
          << (forecast.actual.size() ? fmt(forecast.actual(i, gi)) : std::string("NA")) << '\n';
    }
  }
}

void write_imse_summary(std::ostream& out, std::span<const ForecastResult> results,
                        std::span<const std::string> methods) {
  if (results.size() != methods.size())
    fail(ErrorCode::InvalidArgument, "one method name per result");
  out << "cycle,process,method,imse\n";
  for (std::size_t r = 0; r < results.size(); ++r)
    for (const auto& p : results[r].processes)
      for (std::size_t i = 0; i < p.imse.size(); ++i)
        out << p.cycle_indices[i] << ',' << p.label << ',' << methods[r] << ',' << fmt(p.imse[i])
            << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::IoError, "cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::IoError, path.string() + ": " + e.what());
  }
}

std::vector<RawCycle> read_cycles_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return parse_cycles(in);
}

void write_cycles_file(const std::filesystem::path& path, const std::vector<RawCycle>& cycles) {
  std::ostringstream out;
  write_cycles(out, cycles);
  write_text_file(path, out.str());
}

}  // namespace vfts::io
