#include "sawlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace saw {

namespace {

// Indices of each chain's contiguous run, in stream order.
struct ChainRun {
    std::size_t begin = 0, end = 0;
};

std::vector<ChainRun> chain_runs(std::span<const SampleRecord> s) {
    std::vector<ChainRun> runs;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i + 1;
        while (j < s.size() && s[j].chain_id == s[i].chain_id) ++j;
        runs.push_back({i, j});
        i = j;
    }
    return runs;
}

// Smallest grid index k with theta <= grid[k]; theta beyond the grid maps to
// grid.size(). Samples exactly on a grid point count at that point.
std::size_t grid_slot(const std::vector<double>& grid, double theta) {
    return static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), theta) - grid.begin());
}

void check_weight(const SampleRecord& r) {
    if (!(r.weight > 0.0) || !std::isfinite(r.weight))
        throw std::invalid_argument("stats: sample weight must be finite and > 0");
}

}  // namespace

EmpiricalCdf weighted_cdf(std::span<const SampleRecord> samples,
                          const std::vector<double>& grid_deg,
                          std::optional<double> cutoff_deg) {
    if (grid_deg.empty()) throw std::invalid_argument("weighted_cdf: empty grid");
    // mass[k] = weight of samples in (grid[k-1], grid[k]]; mass[0] covers <= grid[0]
    std::vector<double> mass(grid_deg.size() + 1, 0.0);
    double total = 0.0, total_sq = 0.0;
    std::size_t n = 0;
    for (const auto& r : samples) {
        if (cutoff_deg && r.theta_deg > *cutoff_deg) continue;
        check_weight(r);
        mass[grid_slot(grid_deg, r.theta_deg)] += r.weight;
        total += r.weight;
        total_sq += r.weight * r.weight;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("weighted_cdf: no samples (after cutoff)");

    EmpiricalCdf out;
    out.grid_deg = grid_deg;
    out.F.resize(grid_deg.size());
    double cum = 0.0;
    for (std::size_t k = 0; k < grid_deg.size(); ++k) {
        cum += mass[k];
        out.F[k] = cum / total;
    }
    out.total_weight = total;
    out.effective_n = total * total / total_sq;
    out.n_samples = n;
    return out;
}

std::vector<double> batch_errors(std::span<const SampleRecord> samples,
                                 const std::vector<double>& grid_deg,
                                 std::optional<double> cutoff_deg, int batches_per_chain) {
    if (batches_per_chain < 8)
        throw std::invalid_argument("batch_errors: fewer than 8 batches is unreliable");
    if (grid_deg.empty()) throw std::invalid_argument("batch_errors: empty grid");
    const auto m = static_cast<std::size_t>(batches_per_chain);

    struct ChainStat {
        std::vector<double> var_of_mean;  // s^2/M per grid point
        double weight = 0.0;
    };
    std::vector<ChainStat> per_chain;

    for (const auto& run : chain_runs(samples)) {
        // filtered indices for this chain
        std::vector<std::size_t> kept;
        kept.reserve(run.end - run.begin);
        for (std::size_t i = run.begin; i < run.end; ++i) {
            if (cutoff_deg && samples[i].theta_deg > *cutoff_deg) continue;
            check_weight(samples[i]);
            kept.push_back(i);
        }
        if (kept.size() < m)
            throw std::invalid_argument("batch_errors: a chain is too short to fill the batches");

        // per-batch CDF values at every grid point
        std::vector<double> fsum(grid_deg.size(), 0.0), fsq(grid_deg.size(), 0.0);
        double chain_weight = 0.0;
        for (std::size_t bi = 0; bi < m; ++bi) {
            const std::size_t lo = kept.size() * bi / m;
            const std::size_t hi = kept.size() * (bi + 1) / m;
            std::vector<double> mass(grid_deg.size() + 1, 0.0);
            double w = 0.0;
            for (std::size_t t = lo; t < hi; ++t) {
                const auto& r = samples[kept[t]];
                mass[grid_slot(grid_deg, r.theta_deg)] += r.weight;
                w += r.weight;
            }
            if (w <= 0.0) throw std::invalid_argument("batch_errors: zero-weight batch");
            chain_weight += w;
            double cum = 0.0;
            for (std::size_t k = 0; k < grid_deg.size(); ++k) {
                cum += mass[k];
                const double f = cum / w;
                fsum[k] += f;
                fsq[k] += f * f;
            }
        }
        ChainStat cs;
        cs.weight = chain_weight;
        cs.var_of_mean.resize(grid_deg.size());
        const double dm = static_cast<double>(m);
        for (std::size_t k = 0; k < grid_deg.size(); ++k) {
            const double mean = fsum[k] / dm;
            double var = (fsq[k] - dm * mean * mean) / (dm - 1.0);
            if (var < 0.0) var = 0.0;  // rounding
            cs.var_of_mean[k] = var / dm;
        }
        per_chain.push_back(std::move(cs));
    }
    if (per_chain.empty()) throw std::invalid_argument("batch_errors: no samples");

    double total_weight = 0.0;
    for (const auto& cs : per_chain) total_weight += cs.weight;
    std::vector<double> err(grid_deg.size(), 0.0);
    for (const auto& cs : per_chain) {
        const double share = cs.weight / total_weight;
        for (std::size_t k = 0; k < grid_deg.size(); ++k)
            err[k] += share * share * cs.var_of_mean[k];
    }
    for (auto& e : err) e = std::sqrt(e);
    return err;
}

EmpiricalCdf empirical_cdf_with_errors(std::span<const SampleRecord> samples,
                                       const std::vector<double>& grid_deg,
                                       std::optional<double> cutoff_deg, int batches_per_chain) {
    EmpiricalCdf out = weighted_cdf(samples, grid_deg, cutoff_deg);
    out.stderr_F = batch_errors(samples, grid_deg, cutoff_deg, batches_per_chain);
    return out;
}

WeightedHistogram weighted_histogram(std::span<const SampleRecord> samples,
                                     const std::vector<double>& edges_deg,
                                     int batches_per_chain) {
    if (edges_deg.size() < 2) throw std::invalid_argument("weighted_histogram: need >= 2 edges");
    if (batches_per_chain < 8)
        throw std::invalid_argument("weighted_histogram: fewer than 8 batches is unreliable");
    const std::size_t n_bins = edges_deg.size() - 1;
    const auto m = static_cast<std::size_t>(batches_per_chain);

    // bin index: samples exactly on an interior edge go to the lower bin,
    // matching the CDF convention theta <= edge.
    auto bin_of = [&](double theta) -> std::size_t {
        if (theta < edges_deg.front() || theta > edges_deg.back())
            throw std::invalid_argument("weighted_histogram: sample outside the bin range");
        const std::size_t s =
            static_cast<std::size_t>(std::lower_bound(edges_deg.begin(), edges_deg.end(), theta) -
                                     edges_deg.begin());
        return s == 0 ? 0 : s - 1;
    };

    std::vector<double> mass(n_bins, 0.0);
    double total = 0.0;
    std::size_t n = 0;

    struct ChainStat {
        std::vector<double> var_of_mean;
        double weight = 0.0;
    };
    std::vector<ChainStat> per_chain;

    for (const auto& run : chain_runs(samples)) {
        const std::size_t count = run.end - run.begin;
        if (count < m)
            throw std::invalid_argument("weighted_histogram: a chain is too short for the batches");
        std::vector<double> psum(n_bins, 0.0), psq(n_bins, 0.0);
        double chain_weight = 0.0;
        for (std::size_t bi = 0; bi < m; ++bi) {
            const std::size_t lo = run.begin + count * bi / m;
            const std::size_t hi = run.begin + count * (bi + 1) / m;
            std::vector<double> bmass(n_bins, 0.0);
            double w = 0.0;
            for (std::size_t t = lo; t < hi; ++t) {
                const auto& r = samples[t];
                check_weight(r);
                const std::size_t k = bin_of(r.theta_deg);
                bmass[k] += r.weight;
                w += r.weight;
                mass[k] += r.weight;
                total += r.weight;
                ++n;
            }
            if (w <= 0.0) throw std::invalid_argument("weighted_histogram: zero-weight batch");
            chain_weight += w;
            for (std::size_t k = 0; k < n_bins; ++k) {
                const double p = bmass[k] / w;
                psum[k] += p;
                psq[k] += p * p;
            }
        }
        ChainStat cs;
        cs.weight = chain_weight;
        cs.var_of_mean.resize(n_bins);
        const double dm = static_cast<double>(m);
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double mean = psum[k] / dm;
            double var = (psq[k] - dm * mean * mean) / (dm - 1.0);
            if (var < 0.0) var = 0.0;
            cs.var_of_mean[k] = var / dm;
        }
        per_chain.push_back(std::move(cs));
    }
    if (n == 0) throw std::invalid_argument("weighted_histogram: no samples");

    WeightedHistogram out;
    out.edges_deg = edges_deg;
    out.mass.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) out.mass[k] = mass[k] / total;
    out.stderr_mass.assign(n_bins, 0.0);
    for (const auto& cs : per_chain) {
        const double share = cs.weight / total;
        for (std::size_t k = 0; k < n_bins; ++k)
            out.stderr_mass[k] += share * share * cs.var_of_mean[k];
    }
    for (auto& e : out.stderr_mass) e = std::sqrt(e);
    out.total_weight = total;
    out.n_samples = n;
    return out;
}

EmpiricalCdf apply_correction(const WeightedHistogram& hist, const CorrectionProfile& profile) {
    if (hist.edges_deg.size() != profile.edges_deg.size())
        throw std::invalid_argument("apply_correction: bin layouts differ");
    for (std::size_t k = 0; k < hist.edges_deg.size(); ++k)
        if (std::abs(hist.edges_deg[k] - profile.edges_deg[k]) > 1e-9)
            throw std::invalid_argument("apply_correction: bin edges differ");

    const std::size_t n_bins = hist.mass.size();
    std::vector<double> corrected(n_bins, 0.0), cvar(n_bins, 0.0);
    for (std::size_t k = 0; k < n_bins; ++k) {
        // unusable profile bins pass through uncorrected
        const double f = profile.usable[k] ? profile.factor[k] : 1.0;
        const double rel_p = profile.usable[k] && profile.factor[k] != 0.0
                                 ? profile.stderr_factor[k] / profile.factor[k]
                                 : 0.0;
        corrected[k] = hist.mass[k] / f;
        const double var_from_mass = hist.stderr_mass[k] / f * hist.stderr_mass[k] / f;
        const double var_from_prof = corrected[k] * rel_p * corrected[k] * rel_p;
        cvar[k] = var_from_mass + var_from_prof;
    }
    double total = 0.0;
    for (const double c : corrected) total += c;
    if (total <= 0.0) throw std::invalid_argument("apply_correction: no corrected mass");

    EmpiricalCdf out;
    out.grid_deg = hist.edges_deg;
    out.F.resize(hist.edges_deg.size());
    out.stderr_F.resize(hist.edges_deg.size());
    out.total_weight = hist.total_weight;
    out.n_samples = hist.n_samples;
    out.effective_n = 0.0;

    double cum = 0.0, cumvar = 0.0, allvar = 0.0;
    for (const double v : cvar) allvar += v;
    out.F[0] = 0.0;
    out.stderr_F[0] = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        cum += corrected[k];
        cumvar += cvar[k];
        const double f = cum / total;
        out.F[k + 1] = f;
        // var(F) = [(1-F)^2 * var(below) + F^2 * var(above)] / total^2
        const double var =
            ((1.0 - f) * (1.0 - f) * cumvar + f * f * (allvar - cumvar)) / (total * total);
        out.stderr_F[k + 1] = std::sqrt(std::max(var, 0.0));
    }
    return out;
}

ComparisonReport compare(const EmpiricalCdf& emp, const PredictedCdf& pred, double tolerance) {
    if (emp.grid_deg.size() != pred.grid_deg.size())
        throw std::invalid_argument("compare: grid sizes differ");
    for (std::size_t k = 0; k < emp.grid_deg.size(); ++k)
        if (std::abs(emp.grid_deg[k] - pred.grid_deg[k]) > 1e-9)
            throw std::invalid_argument("compare: grids differ");
    if (emp.stderr_F.size() != emp.F.size())
        throw std::invalid_argument("compare: empirical cdf lacks error bars");

    ComparisonReport r;
    r.grid_deg = emp.grid_deg;
    r.F_pred = pred.F;
    r.F_sim = emp.F;
    r.stderr_F = emp.stderr_F;
    r.tolerance = tolerance;
    r.delta.resize(emp.F.size());
    for (std::size_t k = 0; k < emp.F.size(); ++k) {
        const double d = emp.F[k] - pred.F[k];
        r.delta[k] = d;
        r.max_abs_delta = std::max(r.max_abs_delta, std::abs(d));
        // 1e-12 floor: summation-order noise must not count as a 3-sigma
        // exceedance when the error bar is exactly zero.
        if (std::abs(d) > 3.0 * emp.stderr_F[k] + 1e-12) ++r.n_beyond_3sigma;
    }
    r.ks_stat = r.max_abs_delta;
    r.frac_beyond_3sigma =
        static_cast<double>(r.n_beyond_3sigma) / static_cast<double>(emp.F.size());
    r.pass = r.max_abs_delta <= tolerance && r.frac_beyond_3sigma <= 0.05;
    return r;
}

}  // namespace saw
