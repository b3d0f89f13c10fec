#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sawlab/rng.hpp"
#include "sawlab/stats.hpp"

using namespace saw;
using doctest::Approx;

namespace {

SampleRecord rec(double theta, double w, std::uint32_t chain = 0, std::uint64_t attempt = 0) {
    return {theta, w, false, chain, attempt};
}

std::vector<SampleRecord> iid_uniform_stream(std::uint64_t seed, std::uint32_t chains,
                                             std::size_t per_chain, double lo, double hi) {
    std::vector<SampleRecord> out;
    Xoshiro256pp rng(seed);
    for (std::uint32_t c = 0; c < chains; ++c)
        for (std::size_t t = 0; t < per_chain; ++t)
            out.push_back(rec(lo + (hi - lo) * rng.next_double(), 1.0, c, t));
    return out;
}

}  // namespace

TEST_CASE("weighted cdf on tiny streams") {
    const std::vector<double> grid{0.0, 45.0, 90.0};

    const std::vector<SampleRecord> one{rec(30, 1)};
    const EmpiricalCdf a = weighted_cdf(one, grid, std::nullopt);
    CHECK(a.F[0] == 0.0);
    CHECK(a.F[1] == 1.0);
    CHECK(a.F[2] == 1.0);

    const std::vector<SampleRecord> two{rec(30, 1), rec(60, 1)};
    CHECK(weighted_cdf(two, grid, std::nullopt).F[1] == Approx(0.5));

    const std::vector<SampleRecord> weighted{rec(30, 1), rec(60, 3)};
    CHECK(weighted_cdf(weighted, grid, std::nullopt).F[1] == Approx(0.25));
}

TEST_CASE("weighted cdf refuses empty input and applies the cutoff") {
    const std::vector<double> grid{0.0, 45.0, 90.0};
    CHECK_THROWS_AS((void)weighted_cdf({}, grid, std::nullopt), std::invalid_argument);

    const std::vector<SampleRecord> all_above{rec(88, 1), rec(89, 1)};
    CHECK_THROWS_AS((void)weighted_cdf(all_above, grid, 85.0), std::invalid_argument);

    // cutoff drops the sample at 88 and renormalizes over the rest
    const std::vector<SampleRecord> mixed{rec(30, 1), rec(88, 5)};
    const EmpiricalCdf c = weighted_cdf(mixed, grid, 85.0);
    CHECK(c.F[1] == 1.0);
    CHECK(c.total_weight == Approx(1.0));

    const std::vector<SampleRecord> bad{rec(30, -1)};
    CHECK_THROWS_AS((void)weighted_cdf(bad, grid, std::nullopt), std::invalid_argument);
}

TEST_CASE("weight rescaling leaves the cdf unchanged to machine precision") {
    const std::vector<double> grid{10, 20, 30, 40, 50, 60, 70, 80};
    Xoshiro256pp rng(17);
    std::vector<SampleRecord> s, scaled;
    for (int t = 0; t < 5000; ++t) {
        const double theta = 90.0 * rng.next_double();
        const double w = 0.1 + rng.next_double();
        s.push_back(rec(theta, w));
        scaled.push_back(rec(theta, 37.5 * w));
    }
    const EmpiricalCdf a = weighted_cdf(s, grid, std::nullopt);
    const EmpiricalCdf b = weighted_cdf(scaled, grid, std::nullopt);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(a.F[k] == Approx(b.F[k]).epsilon(1e-14));
}

TEST_CASE("cdf is permutation-invariant over the stream") {
    const std::vector<double> grid{15, 30, 45, 60, 75};
    auto s = iid_uniform_stream(23, 1, 4000, 0.0, 90.0);
    const EmpiricalCdf a = weighted_cdf(s, grid, std::nullopt);
    std::reverse(s.begin(), s.end());
    const EmpiricalCdf b = weighted_cdf(s, grid, std::nullopt);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(a.F[k] - b.F[k]) <= 1e-12);
}

TEST_CASE("merging streams equals weight-averaging their cdfs") {
    const std::vector<double> grid{10, 30, 50, 70};
    const auto s1 = iid_uniform_stream(31, 1, 3000, 0.0, 90.0);
    auto s2 = iid_uniform_stream(32, 1, 2000, 10.0, 80.0);
    for (auto& r : s2) r.weight = 2.5;

    std::vector<SampleRecord> merged = s1;
    merged.insert(merged.end(), s2.begin(), s2.end());

    const EmpiricalCdf a = weighted_cdf(s1, grid, std::nullopt);
    const EmpiricalCdf b = weighted_cdf(s2, grid, std::nullopt);
    const EmpiricalCdf m = weighted_cdf(merged, grid, std::nullopt);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double expect =
            (a.total_weight * a.F[k] + b.total_weight * b.F[k]) / (a.total_weight + b.total_weight);
        CHECK(m.F[k] == Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("batch errors: identical batches give zero, M < 8 refused") {
    const std::vector<double> grid{20, 40, 60};
    std::vector<SampleRecord> s;
    for (int b = 0; b < 16; ++b) {  // 16 identical blocks
        s.push_back(rec(15, 1, 0, static_cast<std::uint64_t>(3 * b)));
        s.push_back(rec(35, 2, 0, static_cast<std::uint64_t>(3 * b + 1)));
        s.push_back(rec(55, 1, 0, static_cast<std::uint64_t>(3 * b + 2)));
    }
    const auto err = batch_errors(s, grid, std::nullopt, 16);
    for (const double e : err) CHECK(e == Approx(0.0).epsilon(1e-14));

    CHECK_THROWS_AS((void)batch_errors(s, grid, std::nullopt, 2), std::invalid_argument);
    const std::vector<SampleRecord> tiny{rec(15, 1), rec(25, 1)};
    CHECK_THROWS_AS((void)batch_errors(tiny, grid, std::nullopt, 8), std::invalid_argument);
}

TEST_CASE("batch errors track the binomial width on iid data") {
    const std::vector<double> grid{30, 45, 60};
    const std::uint32_t chains = 4;
    const std::size_t per_chain = 8192;
    const auto s = iid_uniform_stream(57, chains, per_chain, 0.0, 90.0);
    const auto err = batch_errors(s, grid, std::nullopt, 32);
    const double n = static_cast<double>(chains * per_chain);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double f = grid[k] / 90.0;
        const double binomial = std::sqrt(f * (1.0 - f) / n);
        CHECK(err[k] > 0.5 * binomial);
        CHECK(err[k] < 2.0 * binomial);
    }
}

TEST_CASE("comparison report bookkeeping") {
    const std::vector<double> grid{10, 20, 30, 40};
    PredictedCdf pred;
    pred.grid_deg = grid;
    pred.F = {0.1, 0.4, 0.7, 1.0};

    EmpiricalCdf emp;
    emp.grid_deg = grid;
    emp.F = pred.F;
    emp.stderr_F = {0.01, 0.01, 0.01, 0.01};

    SUBCASE("identical inputs pass with zero delta") {
        const ComparisonReport r = compare(emp, pred, 0.01);
        CHECK(r.max_abs_delta == 0.0);
        CHECK(r.ks_stat == 0.0);
        CHECK(r.n_beyond_3sigma == 0);
        CHECK(r.pass);
    }
    SUBCASE("a constant offset of twice the tolerance fails") {
        for (auto& f : emp.F) f += 0.02;
        const ComparisonReport r = compare(emp, pred, 0.01);
        CHECK(r.max_abs_delta == Approx(0.02));
        CHECK_FALSE(r.pass);
    }
    SUBCASE("delta is antisymmetric under swapping the two inputs") {
        emp.F = {0.15, 0.38, 0.72, 0.99};
        const ComparisonReport fwd = compare(emp, pred, 0.1);
        PredictedCdf pred_swapped;
        pred_swapped.grid_deg = grid;
        pred_swapped.F = {0.15, 0.38, 0.72, 0.99};
        EmpiricalCdf emp_swapped;
        emp_swapped.grid_deg = grid;
        emp_swapped.F = pred.F;
        emp_swapped.stderr_F = emp.stderr_F;
        const ComparisonReport bwd = compare(emp_swapped, pred_swapped, 0.1);
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(fwd.delta[k] == Approx(-bwd.delta[k]).epsilon(1e-15));
    }
    SUBCASE("grid mismatch is refused") {
        EmpiricalCdf other = emp;
        other.grid_deg = {10, 20, 30, 41};
        CHECK_THROWS_AS((void)compare(other, pred, 0.01), std::invalid_argument);
    }
}

TEST_CASE("histogram + correction: flat profile is the identity") {
    const std::vector<double> edges{0, 30, 60, 90, 120, 150, 180};
    const auto s = iid_uniform_stream(71, 2, 4096, 0.0, 180.0);
    const WeightedHistogram h = weighted_histogram(s, edges, 16);

    double total = 0.0;
    for (const double m : h.mass) total += m;
    CHECK(total == Approx(1.0).epsilon(1e-12));

    CorrectionProfile flat;
    flat.edges_deg = edges;
    flat.factor.assign(6, 1.0);
    flat.stderr_factor.assign(6, 0.0);
    flat.usable.assign(6, true);
    const EmpiricalCdf corrected = apply_correction(h, flat);

    const EmpiricalCdf plain = weighted_cdf(s, edges, std::nullopt);
    for (std::size_t k = 0; k < edges.size(); ++k)
        CHECK(corrected.F[k] == Approx(plain.F[k]).epsilon(1e-12));

    // a constant profile cancels in the normalization
    CorrectionProfile doubled = flat;
    doubled.factor.assign(6, 2.0);
    const EmpiricalCdf half_mass = apply_correction(h, doubled);
    for (std::size_t k = 0; k < edges.size(); ++k)
        CHECK(half_mass.F[k] == Approx(plain.F[k]).epsilon(1e-12));
}

TEST_CASE("correction errors propagate in quadrature") {
    WeightedHistogram h;
    h.edges_deg = {0, 90, 180};
    h.mass = {0.5, 0.5};
    h.stderr_mass = {0.01, 0.02};
    h.total_weight = 1.0;
    h.n_samples = 100;

    CorrectionProfile p;
    p.edges_deg = h.edges_deg;
    p.factor = {1.25, 0.8};
    p.stderr_factor = {0.05, 0.6};  // second bin: 75% relative error -> unusable
    p.usable = {true, false};

    const EmpiricalCdf c = apply_correction(h, p);
    // bin 0 corrected by 1.25, bin 1 passes through untouched
    const double m0 = 0.5 / 1.25, m1 = 0.5;
    CHECK(c.F[1] == Approx(m0 / (m0 + m1)).epsilon(1e-12));
    CHECK(c.F[2] == 1.0);
    CHECK(c.stderr_F[1] > 0.0);
}
