#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "vfts/basis.hpp"
#include "vfts/causality.hpp"
#include "vfts/diagnostics.hpp"
#include "vfts/forecast.hpp"
#include "vfts/fpca.hpp"
#include "vfts/ingest.hpp"
#include "vfts/screen.hpp"
#include "vfts/synth.hpp"
#include "vfts/var.hpp"

namespace vfts::io {

using nlohmann::json;

// Matrices are arrays of rows; NaN is written as null and read back as NaN.
json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);
json bool_matrix_to_json(const BoolMatrix& m);
BoolMatrix bool_matrix_from_json(const json& j);

json to_json(const BasisSpec& basis);
BasisSpec basis_from_json(const json& j);

json to_json(const FunctionalSample& sample);
FunctionalSample sample_from_json(const json& j);

json to_json(const std::vector<RegisteredCurve>& curves);
std::vector<RegisteredCurve> curves_from_json(const json& j);

json to_json(const PcaModel& model);
PcaModel pca_from_json(const json& j);

json to_json(const ScoreSeries& series);
ScoreSeries series_from_json(const json& j);

json to_json(const VarModel& model);
VarModel var_from_json(const json& j);

json to_json(const ForecastBundle& bundle);
ForecastBundle bundle_from_json(const json& j);

json to_json(const OutlierReport& report);
json to_json(const CausalityReport& report);
json to_json(const TransferFunctionModel& model);
json to_json(const WhitenessReport& report);
json to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const json& j);

/// One CSV per process: cycle,t,predicted,actual.
void write_forecast_csv(std::ostream& out, const ProcessForecast& forecast,
                        std::span<const double> grid);
/// cycle,process,method,imse rows for every result, in order.
void write_imse_summary(std::ostream& out, std::span<const ForecastResult> results,
                        std::span<const std::string> methods);

/// Writes `dump(2)` plus a trailing newline. Throws IoError.
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);
std::vector<RawCycle> read_cycles_file(const std::filesystem::path& path);
void write_cycles_file(const std::filesystem::path& path, const std::vector<RawCycle>& cycles);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vfts::io
