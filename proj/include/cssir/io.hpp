#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cssir/benchmark.hpp"
#include "cssir/covariance.hpp"
#include "cssir/sdr.hpp"
#include "cssir/simulate.hpp"

namespace cssir::io {

using Json = nlohmann::ordered_json;

/// Decimal text with 17 significant digits; parses back to the same double.
std::string format_double(double v);

/// CSV with header `y,x1,...,xd` and one observation per row.
std::string dataset_to_csv(const Dataset& data);
Dataset parse_dataset_csv(std::string_view text, std::string_view source = "<memory>");
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Indices in JSON are 1-based covariate numbers, matching the CSV header.
Json truth_to_json(const GroundTruth& truth, const SimSpec& spec);
Json fit_to_json(const FitResult& fit);
Json cv_to_json(const CvReport& report);
Json solver_config_to_json(const SolverConfig& cfg);

/// Pi_hat as raw binary: 8-byte magic "CSSIRPI1", uint64 d, then d*d float64
/// in row-major order, all little-endian.
void write_pi_binary(const std::filesystem::path& path, const SymMatrix& pi);
SymMatrix read_pi_binary(const std::filesystem::path& path);

/// Per-replicate rows: replicate,seed,status,<metric columns sorted by name>.
std::string replicate_table_csv(const ReplicateTable& table);
/// metric,mean,se,count; se is empty when undefined.
std::string summary_csv(const ReplicateTable& table);
/// d,n,x,mean_distance,se,replicates
std::string scaling_csv(const std::vector<ScalingPoint>& points);

}  // namespace cssir::io
