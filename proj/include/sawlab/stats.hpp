// stats.hpp
// Weighted empirical CDFs with batch-means error bars, weighted histograms,
// the lattice-correction application, and prediction-vs-simulation
// comparison reports.
//
// Sample spans are expected ordered by (chain_id, attempt); batch means use
// contiguous equal-count batches within each chain and pool across chains.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sawlab/predictions.hpp"
#include "sawlab/sample.hpp"

namespace saw {

struct EmpiricalCdf {
    std::vector<double> grid_deg;
    std::vector<double> F;
    std::vector<double> stderr_F;  // empty if errors were not requested
    double total_weight = 0.0;
    double effective_n = 0.0;  // Kish: (sum w)^2 / sum w^2
    std::size_t n_samples = 0;
};

// F(g) = sum_i w_i [theta_i <= g] / sum_i w_i. With a cutoff, samples above
// it are dropped and the remaining weights renormalize automatically.
EmpiricalCdf weighted_cdf(std::span<const SampleRecord> samples, const std::vector<double>& grid_deg,
                          std::optional<double> cutoff_deg);

// Batch-means standard error per grid point: per chain, the sample standard
// deviation of per-batch CDF values over M contiguous batches divided by
// sqrt(M); pooled across chains with total-weight weights. Refuses M < 8 or
// chains too short to fill M batches.
std::vector<double> batch_errors(std::span<const SampleRecord> samples,
                                 const std::vector<double>& grid_deg,
                                 std::optional<double> cutoff_deg, int batches_per_chain);

// weighted_cdf plus batch_errors in one pass over the same filtered stream.
EmpiricalCdf empirical_cdf_with_errors(std::span<const SampleRecord> samples,
                                       const std::vector<double>& grid_deg,
                                       std::optional<double> cutoff_deg,
                                       int batches_per_chain = 32);

// Per-bin weighted masses (normalized to sum 1) with batch-means errors.
struct WeightedHistogram {
    std::vector<double> edges_deg;  // n_bins + 1 edges
    std::vector<double> mass;       // normalized bin masses
    std::vector<double> stderr_mass;
    double total_weight = 0.0;
    std::size_t n_samples = 0;
};

WeightedHistogram weighted_histogram(std::span<const SampleRecord> samples,
                                     const std::vector<double>& edges_deg,
                                     int batches_per_chain = 32);

// Multiplicative per-bin correction (empirical / predicted), from the
// random-walk calibration of the sphere ensemble.
struct CorrectionProfile {
    std::vector<double> edges_deg;
    std::vector<double> factor;
    std::vector<double> stderr_factor;
    std::vector<bool> usable;  // false: empty bin or relative error > 50%
};

// Divides per-bin masses by the profile, renormalizes, and re-accumulates
// into a CDF on the bin-edge grid; errors propagate in quadrature.
EmpiricalCdf apply_correction(const WeightedHistogram& hist, const CorrectionProfile& profile);

struct ComparisonReport {
    std::vector<double> grid_deg;
    std::vector<double> F_pred;
    std::vector<double> F_sim;
    std::vector<double> delta;    // F_sim - F_pred
    std::vector<double> stderr_F;
    double max_abs_delta = 0.0;
    double ks_stat = 0.0;  // sup |delta| over the grid
    std::size_t n_beyond_3sigma = 0;
    double frac_beyond_3sigma = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Pass iff max|delta| <= tolerance and at most 5% of grid points exceed
// 3 * stderr. Grids must match exactly.
ComparisonReport compare(const EmpiricalCdf& emp, const PredictedCdf& pred, double tolerance);

}  // namespace saw
