#include "sawlab/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sawlab/predictions.hpp"

namespace saw {

namespace {

constexpr double kRad2Deg = 180.0 / std::numbers::pi;

void check_close(double lhs, double rhs, const char* what) {
    if (std::abs(lhs - rhs) > 1e-12)
        throw std::invalid_argument(std::string("exponents: ") + what);
}

std::int64_t dot(Point3i p, Point3i q) { return p.x * q.x + p.y * q.y + p.z * q.z; }

}  // namespace

double derive_b(double nu, double gamma, double rho, int d) {
    if (nu <= 0.0) throw std::invalid_argument("derive_b: nu must be positive");
    return (2.0 * rho - gamma + static_cast<double>(d) * nu) / (2.0 * nu);
}

ExponentSet ExponentSet::make(double nu, double gamma, double gamma1, int d) {
    ExponentSet e;
    e.nu = nu;
    e.gamma = gamma;
    e.gamma1 = gamma1;
    e.rho = gamma - gamma1;
    e.d = d;
    e.b = derive_b(nu, gamma, e.rho, d);
    check_close(e.rho, gamma - gamma1, "rho != gamma - gamma1");
    check_close(2.0 * e.b * nu, 2.0 * e.rho - gamma + d * nu, "scaling relation violated");
    if (!(e.b > 1.0))
        throw std::invalid_argument("exponents: b <= 1, plane-hitting density not normalizable");
    return e;
}

ExponentSet ExponentSet::saw3d() { return make(0.587597, 1.15698, 0.679); }

ExponentSet ExponentSet::rw3d() { return make(0.5, 1.0, 0.5); }

void SphereSpec::validate() const {
    if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("sphere: need 0 <= a < 1");
}

WeightedSample full_space_sample(const Walk& walk, const ExponentSet& exps, double cutoff_deg) {
    const Point3i e = walk.endpoint();
    const std::uint64_t e2 = e.norm2();
    if (e2 == 0) throw std::invalid_argument("full_space_sample: endpoint at the origin");

    // First j with <w(j), e> >= |e|^2 / 2, exactly in integers.
    const std::int64_t n = walk.n_steps();
    std::int64_t j = -1, s_prev = 0, s_j = 0;
    for (std::int64_t k = 1; k <= n; ++k) {
        const std::int64_t s = dot(walk.site(k), e);
        if (2 * s >= static_cast<std::int64_t>(e2)) {
            j = k;
            s_j = s;
            s_prev = dot(walk.site(k - 1), e);
            break;
        }
    }
    if (j < 0) throw std::logic_error("full_space_sample: no bisecting-plane crossing found");

    // Interpolate along the crossing edge to <p, e> = |e|^2 / 2.
    const double norm_e = std::sqrt(static_cast<double>(e2));
    const double target = 0.5 * static_cast<double>(e2);
    const double t = (target - static_cast<double>(s_prev)) / static_cast<double>(s_j - s_prev);
    const Point3i a = walk.site(j - 1), step = walk.site(j) - walk.site(j - 1);
    const double px = static_cast<double>(a.x) + t * static_cast<double>(step.x);
    const double py = static_cast<double>(a.y) + t * static_cast<double>(step.y);
    const double pz = static_cast<double>(a.z) + t * static_cast<double>(step.z);
    const double norm_p = std::sqrt(px * px + py * py + pz * pz);

    // <p, e_hat> = |e|/2 by construction; theta is the angle between p and e.
    const double cos_theta = std::clamp(0.5 * norm_e / norm_p, -1.0, 1.0);

    WeightedSample s;
    s.kind = EnsembleKind::full;
    s.theta_deg = std::acos(cos_theta) * kRad2Deg;
    s.weight = std::pow(norm_e, -exps.weight_full());
    s.beyond_cutoff = s.theta_deg > cutoff_deg;
    return s;
}

WeightedSample half_space_sample(const Walk& walk, const ExponentSet& exps, double cutoff_deg) {
    const Point3i e = walk.endpoint();
    if (e.z < 1)
        throw std::invalid_argument("half_space_sample: endpoint not strictly above the wall");
    const double r = std::hypot(static_cast<double>(e.x), static_cast<double>(e.y));

    // The dilation that puts the endpoint on the plane at distance 1 is
    // 1/e_z, so the importance weight is the dilation power e_z^-(g-r)/nu.
    // Weighting by the full endpoint norm instead provably leaves the
    // random-walk oracle at the sin^2 law for every exponent (the meander
    // endpoint density factorizes as radial x cos), never reaching the
    // boundary-hitting law this ensemble targets.
    WeightedSample s;
    s.kind = EnsembleKind::half;
    s.theta_deg = std::atan2(r, static_cast<double>(e.z)) * kRad2Deg;
    s.weight = std::pow(static_cast<double>(e.z), -exps.weight_boundary());
    s.beyond_cutoff = s.theta_deg > cutoff_deg;
    return s;
}

std::optional<WeightedSample> sphere_sample(const Walk& walk, const SphereSpec& spec,
                                            const ExponentSet& exps,
                                            std::optional<double> weight_exponent) {
    spec.validate();
    const Point3i e = walk.endpoint();
    const std::uint64_t e2i = e.norm2();
    if (e2i == 0) return std::nullopt;  // degenerate direction

    // lambda > 0 with |lambda e + a zhat| = 1; the cancellation-free branch.
    const double a = spec.a;
    const double e2 = static_cast<double>(e2i);
    const double ez = static_cast<double>(e.z);
    const double disc = std::sqrt(a * a * ez * ez + (1.0 - a * a) * e2);
    const double lambda = ez >= 0.0 ? (1.0 - a * a) / (a * ez + disc) : (-a * ez + disc) / e2;

    // Interior sites must stay strictly inside the unit ball; exact-boundary
    // ties reject. |lambda w + a zhat|^2 = lambda^2 |w|^2 + 2 lambda a w_z + a^2.
    // Scanned from the far end, where excursions are widest, so rejected
    // walks exit early.
    const std::int64_t n = walk.n_steps();
    const double l2 = lambda * lambda, two_la = 2.0 * lambda * a, a2 = a * a;
    for (std::int64_t j = n - 1; j >= 1; --j) {
        const Point3i& p = walk.site(j);
        const double r2 =
            l2 * static_cast<double>(p.norm2()) + two_la * static_cast<double>(p.z) + a2;
        if (r2 >= 1.0) return std::nullopt;
    }

    const double hx = lambda * static_cast<double>(e.x);
    const double hy = lambda * static_cast<double>(e.y);
    const double hz = lambda * ez + a;

    WeightedSample s;
    s.kind = EnsembleKind::sphere;
    s.theta_deg = std::atan2(std::hypot(hx, hy), hz) * kRad2Deg;
    const double p = weight_exponent.value_or(exps.weight_boundary());
    s.weight = std::pow(std::sqrt(e2), -p);
    s.beyond_cutoff = false;  // sphere results are analyzed unconditioned
    return s;
}

CorrectionProfile lattice_correction_profile(std::span<const SampleRecord> rw_samples,
                                             const SphereSpec& spec,
                                             const std::vector<double>& edges_deg,
                                             int batches_per_chain) {
    spec.validate();
    const WeightedHistogram hist = weighted_histogram(rw_samples, edges_deg, batches_per_chain);
    const std::size_t n_bins = hist.mass.size();

    CorrectionProfile out;
    out.edges_deg = edges_deg;
    out.factor.assign(n_bins, 1.0);
    out.stderr_factor.assign(n_bins, 0.0);
    out.usable.assign(n_bins, false);

    for (std::size_t k = 0; k < n_bins; ++k) {
        const double pred = sphere_hit_cdf(edges_deg[k + 1], spec.a, 1.5) -
                            sphere_hit_cdf(edges_deg[k], spec.a, 1.5);
        if (pred <= 0.0 || hist.mass[k] <= 0.0) continue;  // empty: factor 1, unusable
        out.factor[k] = hist.mass[k] / pred;
        out.stderr_factor[k] = hist.stderr_mass[k] / pred;
        out.usable[k] = out.stderr_factor[k] <= 0.5 * out.factor[k];
    }
    return out;
}

}  // namespace saw
