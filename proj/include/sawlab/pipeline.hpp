// pipeline.hpp
// Orchestration used by both the CLI and the acceptance suite: spawn
// independent chains, extract ensemble samples, merge deterministically,
// build predictions, compare, and run the random-walk validation pipeline.
//
// Determinism contract: (config, seed) fixes every emitted byte. Chains own
// disjoint RNG streams derived from (seed, chain_id); the merged stream is
// ordered by (chain_id, attempt), so the thread count never changes output.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sawlab/ensembles.hpp"
#include "sawlab/predictions.hpp"
#include "sawlab/sample.hpp"
#include "sawlab/stats.hpp"

namespace saw {

inline constexpr const char* kVersion = "sawlab 1.0.0";
inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    EnsembleKind ensemble = EnsembleKind::half;
    std::int64_t n_steps = 2000;
    std::int64_t budget = 1'000'000;  // total attempted pivots post burn-in, all chains
    int chains = 8;
    int threads = 0;  // 0 = min(chains, hardware)
    std::uint64_t seed = 1;
    bool rw_mode = false;  // self-avoidance off, RW exponent preset
    std::optional<ExponentSet> exponents;
    double sphere_a = 0.75;
    double cutoff_deg = kDefaultCutoffDeg;
    std::optional<double> sphere_weight_exponent;
    std::int64_t burn_in = -1;  // -1 = 10 * N
    std::string checkpoint_dir;  // when set, final chain states are saved here

    ExponentSet resolved_exponents() const;
    void validate() const;
};

struct ChainSummary {
    std::uint32_t chain_id = 0;
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
    std::uint64_t emitted = 0;
    std::uint64_t skipped = 0;  // degenerate draws (zero endpoint / sphere rejections)
};

struct SimResult {
    RunConfig cfg;
    ExponentSet exps;
    std::vector<SampleRecord> records;  // ordered by (chain_id, attempt)
    std::vector<ChainSummary> chains;
    double wall_seconds = 0.0;
};

SimResult run_simulation(const RunConfig& cfg);

// Sample CSV plus metadata sidecar sufficient to re-run the command.
void write_simulation_outputs(const SimResult& result, const std::filesystem::path& out_csv);

struct PredictConfig {
    EnsembleKind ensemble = EnsembleKind::half;
    bool rw_mode = false;
    std::optional<ExponentSet> exponents;
    std::optional<double> b_override;  // e.g. a deliberately wrong b as a negative control
    double a = 0.75;
    double cutoff_deg = kDefaultCutoffDeg;
    double step_deg = 1.0;

    ExponentSet resolved_exponents() const;
    double resolved_b() const;
};

PredictedCdf make_prediction(const PredictConfig& cfg);
void write_prediction_outputs(const PredictConfig& cfg, const PredictedCdf& pred,
                              const std::filesystem::path& out_csv);

struct CompareConfig {
    std::filesystem::path samples_csv;
    std::filesystem::path prediction_csv;
    std::filesystem::path out_csv;
    double tolerance = 0.01;
    int batches_per_chain = 32;
    // Sphere only: RW sphere samples whose density ratio against the exact
    // b=3/2 law is divided out of the empirical density first.
    std::optional<std::filesystem::path> rw_calibration_csv;
};

struct CompareOutcome {
    EnsembleKind ensemble = EnsembleKind::half;
    ComparisonReport report;
    std::size_t unusable_bins = 0;
};

CompareOutcome compare_files(const CompareConfig& cfg);

// In-memory comparison helpers (no files), used by validate-rw and tests.
ComparisonReport compare_samples(const std::vector<SampleRecord>& records,
                                 const PredictedCdf& pred, std::optional<double> cutoff_deg,
                                 double tolerance, int batches_per_chain = 32);
ComparisonReport compare_sphere_corrected(const std::vector<SampleRecord>& saw_records,
                                          const std::vector<SampleRecord>& rw_records,
                                          const SphereSpec& spec, const PredictedCdf& pred,
                                          double tolerance, int batches_per_chain = 32);

struct ValidateRwConfig {
    std::int64_t n_steps = 2000;
    std::int64_t budget = 1'000'000;  // per ensemble
    int chains = 8;
    int threads = 0;
    std::uint64_t seed = 1;
    double sphere_a = 0.75;
    double cutoff_deg = kDefaultCutoffDeg;
    double tolerance = 0.01;
    double negative_control_b = 1.2;
    int batches_per_chain = 32;
    std::filesystem::path out_dir;
};

struct ValidateRwOutcome {
    ComparisonReport half;
    ComparisonReport full;
    ComparisonReport sphere;          // corrected by a profile from held-out chains
    ComparisonReport negative_control;  // half-space data vs a wrong b; must fail
    bool pass = false;
};

// Runs all three ensembles in RW-oracle mode against the b = 3/2 laws and a
// negative control, and writes per-ensemble comparisons plus a combined
// report under out_dir. Deterministic given (config, seed).
ValidateRwOutcome validate_rw(const ValidateRwConfig& cfg);

}  // namespace saw
