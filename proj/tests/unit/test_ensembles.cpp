#include <doctest.h>

#include <cmath>

#include "sawlab/ensembles.hpp"
#include "sawlab/pivot.hpp"
#include "sawlab/rng.hpp"

using namespace saw;
using doctest::Approx;

TEST_CASE("derive_b reproduces the known exponent values") {
    // 2D: nu=3/4, gamma=43/32, rho=25/64 -> exactly 5/8 (all dyadic)
    CHECK(derive_b(0.75, 43.0 / 32.0, 25.0 / 64.0, 2) == 0.625);
    // RW in 3D: b = d/2
    CHECK(derive_b(0.5, 1.0, 0.5, 3) == 1.5);
    // 3D SAW from the quoted exponent estimates
    const double b = derive_b(0.587597, 1.15698, 1.15698 - 0.679, 3);
    CHECK(b == Approx(1.3289474).epsilon(2e-6));
    CHECK(std::abs(b - 1.3289) <= 0.0005);
    CHECK_THROWS_AS((void)derive_b(0.0, 1.0, 0.5, 3), std::invalid_argument);
}

TEST_CASE("exponent sets satisfy their defining relations") {
    for (const ExponentSet& e : {ExponentSet::saw3d(), ExponentSet::rw3d()}) {
        CHECK(std::abs(e.rho - (e.gamma - e.gamma1)) <= 1e-12);
        CHECK(std::abs(2.0 * e.b * e.nu - (2.0 * e.rho - e.gamma + e.d * e.nu)) <= 1e-12);
        CHECK(e.b > 1.0);
    }
    CHECK(ExponentSet::rw3d().b == 1.5);
    CHECK(ExponentSet::rw3d().weight_full() == Approx(2.0));
    CHECK(ExponentSet::rw3d().weight_boundary() == Approx(1.0));
    CHECK(ExponentSet::saw3d().weight_full() == Approx(1.969003).epsilon(1e-5));
    CHECK(ExponentSet::saw3d().weight_boundary() == Approx(1.1555545).epsilon(1e-5));
    // a set with b <= 1 is rejected outright
    CHECK_THROWS_AS((void)ExponentSet::make(0.75, 43.0 / 32.0, 43.0 / 32.0 - 25.0 / 64.0, 2),
                    std::invalid_argument);
}

TEST_CASE("full-space sample: rod geometry") {
    const ExponentSet exps = ExponentSet::saw3d();
    for (std::int64_t n : {5, 8, 101}) {
        const WeightedSample s = full_space_sample(Walk::rod(n), exps);
        CHECK(s.theta_deg == Approx(0.0).epsilon(1e-12));
        CHECK(s.weight ==
              Approx(std::pow(static_cast<double>(n), -exps.weight_full())).epsilon(1e-13));
        CHECK_FALSE(s.beyond_cutoff);
    }
}

TEST_CASE("full-space sample: E,E,N,N crossing by hand") {
    const Walk w = Walk::from_sites(
        {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 1, 0}, {2, 2, 0}}, true);
    const ExponentSet exps = ExponentSet::saw3d();
    const WeightedSample s = full_space_sample(w, exps);
    // e = (2,2,0), crossing of <w, e/|e|> = |e|/2 lands exactly on (2,0,0)
    CHECK(s.theta_deg == Approx(45.0).epsilon(1e-12));
    CHECK(s.weight == Approx(std::pow(2.0 * std::sqrt(2.0), -exps.weight_full())).epsilon(1e-13));
}

TEST_CASE("full-space theta is invariant under a global symmetry of the walk") {
    const ExponentSet exps = ExponentSet::saw3d();
    PivotChain chain([] {
        ChainConfig c;
        c.n_steps = 40;
        c.seed = 8;
        return c;
    }());
    chain.run_burn_in();
    Xoshiro256pp rng(21);
    const auto& group = octahedral_group();
    for (int t = 0; t < 300; ++t) {
        for (int s = 0; s < 5; ++s) chain.step();
        const WeightedSample base = full_space_sample(chain.walk(), exps);
        const auto& g = group[rng.bounded(48)];
        std::vector<Point3i> mapped;
        for (const auto& p : chain.walk().sites()) mapped.push_back(g.apply(p));
        const WeightedSample rot = full_space_sample(Walk::from_sites(mapped, true), exps);
        CHECK(rot.theta_deg == Approx(base.theta_deg).epsilon(1e-11));
        CHECK(rot.weight == Approx(base.weight).epsilon(1e-12));
    }
}

TEST_CASE("full-space sample flags beyond-cutoff angles and rejects a zero endpoint") {
    const ExponentSet exps = ExponentSet::rw3d();
    // closed square in RW mode: endpoint back at the origin
    const Walk loop = Walk::from_sites(
        {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}}, false);
    CHECK_THROWS_AS((void)full_space_sample(loop, exps), std::invalid_argument);

    // endpoint (1,0,0) after a detour: first crossing sits far off-axis
    const Walk skew = Walk::from_sites(
        {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 2, 1}, {0, 2, 0}, {1, 2, 0}, {1, 1, 0}, {1, 0, 0}},
        true);
    const WeightedSample s = full_space_sample(skew, exps, 45.0);
    CHECK(s.theta_deg > 45.0);
    CHECK(s.beyond_cutoff);
}

TEST_CASE("half-space sample uses only the endpoint") {
    const ExponentSet exps = ExponentSet::saw3d();
    const WeightedSample rod = half_space_sample(Walk::rod(9), exps);
    CHECK(rod.theta_deg == Approx(0.0));
    CHECK(rod.weight == Approx(std::pow(9.0, -exps.weight_boundary())).epsilon(1e-13));

    // endpoint (3,4,5): sqrt(9+16) = 5 = z -> 45 degrees
    const Walk w1 = Walk::from_sites({{0, 0, 0},       {0, 0, 1},    {1, 0, 1},    {2, 0, 1},
                                      {3, 0, 1},       {3, 1, 1},    {3, 2, 1},    {3, 3, 1},
                                      {3, 4, 1},       {3, 4, 2},    {3, 4, 3},    {3, 4, 4},
                                      {3, 4, 5}},
                                     true);
    const WeightedSample s1 = half_space_sample(w1, exps);
    CHECK(s1.theta_deg == Approx(45.0).epsilon(1e-12));

    // metamorphic: a different walk with the same endpoint gives the same sample
    const Walk w2 = Walk::from_sites({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 0, 4},
                                      {0, 0, 5}, {1, 0, 5}, {2, 0, 5}, {3, 0, 5}, {3, 1, 5},
                                      {3, 2, 5}, {3, 3, 5}, {3, 4, 5}},
                                     true);
    const WeightedSample s2 = half_space_sample(w2, exps);
    CHECK(s1.theta_deg == s2.theta_deg);
    CHECK(s1.weight == s2.weight);

    // the boundary-ending weight exponent is gamma1/nu ~ 1.1555
    const Walk rod_n = Walk::rod(10);
    CHECK(half_space_sample(rod_n, exps).weight ==
          Approx(std::pow(10.0, -1.1555545)).epsilon(1e-5));

    CHECK_THROWS_AS((void)half_space_sample(
                        Walk::from_sites({{0, 0, 0}, {1, 0, 0}}, true), exps),
                    std::invalid_argument);
}

TEST_CASE("sphere sample: rods along the axis") {
    const ExponentSet exps = ExponentSet::saw3d();
    const SphereSpec spec{0.75};

    // rod along -z: endpoint maps to the antipode
    std::vector<Point3i> down;
    for (std::int64_t j = 0; j <= 20; ++j) down.push_back({0, 0, -j});
    const auto s_down = sphere_sample(Walk::from_sites(down, true), spec, exps);
    REQUIRE(s_down.has_value());
    CHECK(s_down->theta_deg == Approx(180.0).epsilon(1e-12));

    // rod along +z: endpoint maps to the near pole
    const auto s_up = sphere_sample(Walk::rod(20), spec, exps);
    REQUIRE(s_up.has_value());
    CHECK(s_up->theta_deg == Approx(0.0).epsilon(1e-10));
    CHECK(s_up->weight == Approx(std::pow(20.0, -exps.weight_boundary())).epsilon(1e-13));

    // a = 0 reduces to radial projection
    const auto s0 = sphere_sample(Walk::rod(7), SphereSpec{0.0}, exps);
    REQUIRE(s0.has_value());
    CHECK(s0->theta_deg == Approx(0.0).epsilon(1e-12));

    // weight exponent override is honored
    const auto sw = sphere_sample(Walk::rod(20), spec, exps, 2.5);
    REQUIRE(sw.has_value());
    CHECK(sw->weight == Approx(std::pow(20.0, -2.5)).epsilon(1e-13));
}

TEST_CASE("sphere sample: transformed endpoint on the sphere, interior strictly inside") {
    const ExponentSet exps = ExponentSet::rw3d();
    const SphereSpec spec{0.75};
    ChainConfig cc;
    cc.n_steps = 60;
    cc.self_avoiding = false;
    cc.seed = 5;
    PivotChain chain(cc);
    chain.run_burn_in();

    int accepted = 0;
    Xoshiro256pp rng(6);
    for (int t = 0; t < 10000 && accepted < 200; ++t) {
        chain.step();
        const Walk& w = chain.walk();
        if (w.endpoint().norm2() == 0) continue;
        const auto s = sphere_sample(w, spec, exps);
        if (!s) continue;
        ++accepted;

        // recompute lambda and check |x(N)| = 1 to 1e-12 and interior sites < 1
        const Point3i e = w.endpoint();
        const double e2 = static_cast<double>(e.norm2());
        const double ez = static_cast<double>(e.z);
        const double a = spec.a;
        const double disc = std::sqrt(a * a * ez * ez + (1.0 - a * a) * e2);
        const double lambda = ez >= 0.0 ? (1.0 - a * a) / (a * ez + disc) : (-a * ez + disc) / e2;
        auto transformed = [&](const Point3i& p) {
            return std::array<double, 3>{lambda * static_cast<double>(p.x),
                                         lambda * static_cast<double>(p.y),
                                         lambda * static_cast<double>(p.z) + a};
        };
        const auto end = transformed(e);
        CHECK(std::abs(std::hypot(end[0], end[1], end[2]) - 1.0) <= 1e-12);
        for (std::int64_t j = 1; j < w.n_steps(); ++j) {
            const Point3i& p = w.site(j);
            // strict in the sampler's own arithmetic; the recomputed norm may
            // differ by an ulp for sites essentially on the boundary
            const double r2 = lambda * lambda * static_cast<double>(p.norm2()) +
                              2.0 * lambda * a * static_cast<double>(p.z) + a * a;
            CHECK(r2 < 1.0);
            const auto x = transformed(p);
            CHECK(std::hypot(x[0], x[1], x[2]) < 1.0 + 1e-13);
        }
        // convexity: random points on random segments stay inside the ball
        for (int k = 0; k < 5; ++k) {
            const auto j = static_cast<std::int64_t>(rng.bounded(
                static_cast<std::uint64_t>(w.n_steps())));
            const auto p0 = transformed(w.site(j));
            const auto p1 = transformed(w.site(j + 1));
            const double t01 = rng.next_double();
            const double mx = p0[0] + t01 * (p1[0] - p0[0]);
            const double my = p0[1] + t01 * (p1[1] - p0[1]);
            const double mz = p0[2] + t01 * (p1[2] - p0[2]);
            CHECK(std::hypot(mx, my, mz) <= 1.0 + 1e-12);
        }
    }
    CHECK(accepted == 200);
}

TEST_CASE("sphere sample rejections") {
    const ExponentSet exps = ExponentSet::rw3d();
    // zero endpoint: degenerate direction
    const Walk loop = Walk::from_sites(
        {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}}, false);
    CHECK_FALSE(sphere_sample(loop, SphereSpec{0.5}, exps).has_value());

    // a long excursion away from the endpoint direction pokes outside
    std::vector<Point3i> sites{{0, 0, 0}};
    for (std::int64_t j = 1; j <= 30; ++j) sites.push_back({j, 0, 0});
    for (std::int64_t j = 1; j <= 29; ++j) sites.push_back({30, j, 0});
    sites.push_back({29, 29, 0});
    for (std::int64_t j = 28; j >= 1; --j) sites.push_back({j, 29, 0});  // ends at (1,29,0)
    const Walk excursion = Walk::from_sites(sites, true);
    CHECK_FALSE(sphere_sample(excursion, SphereSpec{0.75}, exps).has_value());

    CHECK_THROWS_AS((void)sphere_sample(Walk::rod(5), SphereSpec{1.0}, exps),
                    std::invalid_argument);
}

TEST_CASE("every emitted weight is the configured power of the endpoint norm") {
    const ExponentSet exps = ExponentSet::saw3d();
    ChainConfig cc;
    cc.n_steps = 30;
    cc.seed = 12;
    cc.constraint = Constraint::half_space;
    PivotChain chain(cc);
    chain.run_burn_in();
    for (int t = 0; t < 200; ++t) {
        chain.step();
        const double norm = std::sqrt(static_cast<double>(chain.walk().endpoint().norm2()));
        const double height = static_cast<double>(chain.walk().endpoint().z);
        const WeightedSample h = half_space_sample(chain.walk(), exps);
        CHECK(h.weight == Approx(std::pow(height, -exps.weight_boundary())).epsilon(1e-12));
        const WeightedSample f = full_space_sample(chain.walk(), exps);
        CHECK(f.weight == Approx(std::pow(norm, -exps.weight_full())).epsilon(1e-12));
    }
}
