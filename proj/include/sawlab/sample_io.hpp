// sample_io.hpp
// File formats: sample CSV streams, prediction tables, comparison reports,
// all UTF-8/LF with full-precision decimals, each with a JSON metadata
// sidecar (<path>.meta.json) carrying a schema-version field. Writes go
// through a temp file and rename, so an interrupted run never leaves a
// partial file at the final path.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sawlab/predictions.hpp"
#include "sawlab/sample.hpp"
#include "sawlab/stats.hpp"

namespace saw {

std::string format_double(double v);  // shortest round-trip decimal

void atomic_write_text(const std::filesystem::path& path, const std::string& text);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

// sample CSV: header "ensemble,theta_deg,weight,flagged,chain_id,attempt"
void write_samples_csv(const std::filesystem::path& path, EnsembleKind kind,
                       const std::vector<SampleRecord>& records);
std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path, EnsembleKind* kind);

// prediction CSV: header "theta_deg,cdf"
void write_prediction_csv(const std::filesystem::path& path, const PredictedCdf& pred);
PredictedCdf read_prediction_csv(const std::filesystem::path& path);

// comparison CSV: header "theta_deg,cdf_pred,cdf_sim,delta,stderr"
void write_comparison_csv(const std::filesystem::path& path, const ComparisonReport& report);

void write_text_sidecar(const std::filesystem::path& data_path, const std::string& json_text);
std::string read_text_sidecar(const std::filesystem::path& data_path);

}  // namespace saw
