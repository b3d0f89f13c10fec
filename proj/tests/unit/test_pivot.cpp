#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sawlab/pivot.hpp"
#include "sawlab/rng.hpp"

using namespace saw;

namespace {

ChainConfig make_cfg(std::int64_t n, bool saw_mode = true,
                     Constraint constraint = Constraint::none, std::uint64_t seed = 42) {
    ChainConfig cfg;
    cfg.n_steps = n;
    cfg.self_avoiding = saw_mode;
    cfg.constraint = constraint;
    cfg.seed = seed;
    return cfg;
}

// Reference acceptance test: build the candidate and check it directly.
bool reference_acceptable(const Walk& w, std::int64_t i, const Symmetry& g, bool saw_mode,
                          Constraint constraint) {
    const auto cand = w.pivot_candidate(i, g);
    if (saw_mode && !is_self_avoiding(cand)) return false;
    if (constraint == Constraint::half_space)
        for (std::size_t j = 1; j < cand.size(); ++j)
            if (cand[j].z < 1) return false;
    return true;
}

}  // namespace

TEST_CASE("init builds the +z rod and seeds deterministically") {
    PivotChain a(make_cfg(3));
    CHECK(a.walk().n_steps() == 3);
    for (std::int64_t j = 0; j <= 3; ++j) CHECK(a.walk().site(j) == Point3i{0, 0, j});
    CHECK(a.walk().satisfies_half_space());
    CHECK(a.attempted() == 0);

    PivotChain b(make_cfg(3));
    for (int t = 0; t < 200; ++t) {
        a.step();
        b.step();
        CHECK(a.walk().sites()[3] == b.walk().sites()[3]);
    }
    CHECK(a.accepted() == b.accepted());
}

TEST_CASE("chain config validation") {
    CHECK_THROWS_AS(PivotChain{make_cfg(1)}, std::invalid_argument);
    ChainConfig bad = make_cfg(5);
    bad.burn_in = -7;
    CHECK_THROWS_AS(PivotChain{bad}, std::invalid_argument);
    CHECK(make_cfg(5).effective_burn_in() == 50);
}

TEST_CASE("pivot_candidate matches the definition") {
    const Walk rod = Walk::rod(4);

    SUBCASE("identity keeps the walk") {
        const auto cand = rod.pivot_candidate(2, octahedral_group()[0]);
        for (std::int64_t j = 0; j <= 4; ++j) CHECK(cand[static_cast<std::size_t>(j)] == rod.site(j));
    }
    SUBCASE("rotation about site 2 turns the rod into an L") {
        // (x,y,z) -> (z,y,-x): sends +z steps into +x after the pivot site
        const Symmetry g{{2, 1, 0}, {1, 1, -1}};
        const auto cand = rod.pivot_candidate(2, g);
        CHECK(cand[2] == Point3i{0, 0, 2});
        CHECK(cand[3] == Point3i{1, 0, 2});
        CHECK(cand[4] == Point3i{2, 0, 2});
        CHECK(is_self_avoiding(cand));
    }
    SUBCASE("point reflection folds the rod onto itself") {
        const Symmetry neg{{0, 1, 2}, {-1, -1, -1}};
        const auto cand = rod.pivot_candidate(2, neg);
        CHECK(cand[3] == Point3i{0, 0, 1});
        CHECK(cand[4] == Point3i{0, 0, 0});
        CHECK_FALSE(is_self_avoiding(cand));
        CHECK_FALSE(rod.pivot_self_avoiding(2, neg));
    }
}

TEST_CASE("fast pivot acceptance agrees with the reference on random states") {
    const auto& group = octahedral_group();
    for (const Constraint constraint : {Constraint::none, Constraint::half_space}) {
        ChainConfig cfg = make_cfg(24, true, constraint, 99);
        PivotChain chain(cfg);
        Xoshiro256pp rng(5);
        for (int t = 0; t < 3000; ++t) {
            chain.step();
            const auto i = static_cast<std::int64_t>(rng.bounded(24));
            const auto& g = group[1 + rng.bounded(47)];
            const bool fast = chain.walk().pivot_self_avoiding(i, g) &&
                              (constraint == Constraint::none ||
                               chain.walk().pivot_keeps_half_space(i, g));
            CHECK(fast == reference_acceptable(chain.walk(), i, g, true, constraint));
        }
    }
}

TEST_CASE("walk invariants hold along a SAW half-space chain") {
    PivotChain chain(make_cfg(50, true, Constraint::half_space, 3));
    for (int t = 0; t < 2000; ++t) {
        chain.step();
        const auto& w = chain.walk();
        REQUIRE(w.site(0) == Point3i{0, 0, 0});
        if (t % 100 == 0) {
            CHECK(is_self_avoiding(w.sites()));
            CHECK(w.satisfies_half_space());
            for (std::int64_t j = 1; j <= w.n_steps(); ++j)
                CHECK((w.site(j) - w.site(j - 1)).norm2() == 1);
        }
    }
    CHECK(chain.accepted() > 0);
}

TEST_CASE("RW mode with no constraint accepts every proposal") {
    PivotChain chain(make_cfg(20, false, Constraint::none, 17));
    for (int t = 0; t < 500; ++t) CHECK(chain.step());
    CHECK(chain.accepted() == chain.attempted());
}

TEST_CASE("half-space proposals that dip below z=1 are rejected") {
    // rod pivoted at its base by the point reflection heads straight down
    const Walk rod = Walk::rod(6);
    const Symmetry neg{{0, 1, 2}, {-1, -1, -1}};
    CHECK_FALSE(rod.pivot_keeps_half_space(0, neg));
    const auto cand = rod.pivot_candidate(0, neg);
    CHECK(cand[6] == Point3i{0, 0, -6});
}

TEST_CASE("acceptance fraction at N=1000 sits in the sanity band") {
    PivotChain chain(make_cfg(1000, true, Constraint::none, 1));
    for (int t = 0; t < 20000; ++t) chain.step();
    CHECK(chain.acceptance_fraction() > 0.05);
    CHECK(chain.acceptance_fraction() < 0.9);
}

TEST_CASE("uniformity check at N=2 visits all 30 walks uniformly") {
    PivotChain chain(make_cfg(2, true, Constraint::none, 2024));
    const UniformityResult r = uniformity_check(chain, 400000, 16);
    CHECK(r.n_states == 30);
    CHECK(r.within_sigma(4.0));
}

TEST_CASE("uniformity check refuses degenerate runs") {
    PivotChain chain(make_cfg(2));
    CHECK_THROWS(uniformity_check(chain, 0, 16));
    PivotChain big(make_cfg(5));
    CHECK_THROWS_AS(uniformity_check(big, 100, 16), std::invalid_argument);
}

TEST_CASE("RW endpoint distribution matches direct sampling (two-sample KS)") {
    // pivot chain in RW mode vs i.i.d. random walks, compared on |w(N)|^2
    constexpr std::int64_t n = 64;
    constexpr int m = 4000;
    PivotChain chain(make_cfg(n, false, Constraint::none, 77));
    chain.run_burn_in();
    std::vector<double> via_chain;
    for (int t = 0; t < m; ++t) {
        for (int s = 0; s < 64; ++s) chain.step();  // thin until endpoint samples decorrelate
        via_chain.push_back(static_cast<double>(chain.walk().endpoint().norm2()));
    }

    Xoshiro256pp rng(123);
    constexpr Point3i steps[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                  {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    std::vector<double> direct;
    for (int t = 0; t < m; ++t) {
        Point3i p{0, 0, 0};
        for (std::int64_t j = 0; j < n; ++j) p = p + steps[rng.bounded(6)];
        direct.push_back(static_cast<double>(p.norm2()));
    }

    std::sort(via_chain.begin(), via_chain.end());
    std::sort(direct.begin(), direct.end());
    // tie-aware two-sample KS: |e|^2 is integer-valued, so both CDFs must
    // step past a tied value together before the gap is measured
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < via_chain.size() || ib < direct.size()) {
        double v;
        if (ib == direct.size() || (ia < via_chain.size() && via_chain[ia] <= direct[ib]))
            v = via_chain[ia];
        else
            v = direct[ib];
        while (ia < via_chain.size() && via_chain[ia] == v) ++ia;
        while (ib < direct.size() && direct[ib] == v) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / m - static_cast<double>(ib) / m));
    }
    // alpha = 1e-3 critical value for the two-sample statistic
    const double crit = 1.949 * std::sqrt(2.0 / m);
    CHECK(d < crit);
}

TEST_CASE("checkpoint round-trips bit-exactly and resumes the same stream") {
    PivotChain chain(make_cfg(30, true, Constraint::half_space, 55));
    for (int t = 0; t < 500; ++t) chain.step();

    const std::string snapshot = chain.checkpoint_json();
    PivotChain restored = PivotChain::from_checkpoint_json(snapshot);
    CHECK(restored.checkpoint_json() == snapshot);
    CHECK(restored.attempted() == chain.attempted());
    CHECK(restored.accepted() == chain.accepted());

    for (int t = 0; t < 300; ++t) {
        CHECK(chain.step() == restored.step());
        CHECK(chain.walk().endpoint() == restored.walk().endpoint());
    }
}
