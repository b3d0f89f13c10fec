#include "sawlab/predictions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace saw {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Vec3 conformal_map(Vec3 p) {
    const double w = 1.0 - p.z;
    const double denom = p.x * p.x + p.y * p.y + w * w;
    require(denom != 0.0, "conformal_map: pole at (0,0,1)");
    return {2.0 * p.x / denom, 2.0 * p.y / denom, 2.0 * w / denom};
}

Vec3 inverse_conformal_map(Vec3 q) {
    const double denom = q.x * q.x + q.y * q.y + q.z * q.z;
    require(denom != 0.0, "inverse_conformal_map: pole at the origin");
    return {2.0 * q.x / denom, 2.0 * q.y / denom, 1.0 - 2.0 * q.z / denom};
}

void sphere_to_plane(double theta_rad, double phi_rad, double& u, double& v) {
    const double c = std::cos(theta_rad);
    require(1.0 - c != 0.0, "sphere_to_plane: pole at theta=0");
    const double s = std::sin(theta_rad);
    u = s * std::cos(phi_rad) / (1.0 - c);
    v = s * std::sin(phi_rad) / (1.0 - c);
}

double area_jacobian(double theta_rad) {
    const double w = 1.0 - std::cos(theta_rad);
    require(w != 0.0, "area_jacobian: pole at theta=0");
    return 1.0 / (w * w);
}

double area_jacobian_uv(double u, double v) {
    const double s = u * u + v * v + 1.0;
    return s * s / 4.0;
}

double half_space_density(double u, double v, double a, double b) {
    return std::pow(u * u + v * v + a * a, -b);
}

double sphere_hit_density(double theta_rad, double a, double b) {
    return std::pow(1.0 + a * a - 2.0 * a * std::cos(theta_rad), -b);
}

double bisecting_plane_density(double u, double v) {
    const double s = u * u + v * v + 1.0;
    return 1.0 / (kPi * s * s);
}

double half_space_cdf(double theta0_deg, double b) {
    require(theta0_deg >= 0.0 && theta0_deg <= 90.0, "half_space_cdf: theta0 outside [0,90]");
    require(b > 1.0, "half_space_cdf: b <= 1 gives a non-normalizable density");
    if (theta0_deg == 90.0) return 1.0;  // cos(pi/2) rounds away from the exact zero
    const double c = std::cos(deg2rad(theta0_deg));
    return 1.0 - std::pow(c, 2.0 * (b - 1.0));
}

double sphere_hit_cdf(double theta0_deg, double a, double b) {
    require(theta0_deg >= 0.0 && theta0_deg <= 180.0, "sphere_hit_cdf: theta0 outside [0,180]");
    require(a >= 0.0 && a < 1.0, "sphere_hit_cdf: need 0 <= a < 1");
    if (a == 0.0) return 0.5 * (1.0 - std::cos(deg2rad(theta0_deg)));  // uniform on the sphere
    require(b != 1.0, "sphere_hit_cdf: b = 1 refused (logarithmic case)");
    const double e = 1.0 - b;
    const double near = std::pow(1.0 - a, 2.0 * e);
    const double far = std::pow(1.0 + a, 2.0 * e);
    const double at = std::pow(1.0 + a * a - 2.0 * a * std::cos(deg2rad(theta0_deg)), e);
    return (near - at) / (near - far);
}

double bisecting_plane_cdf(double theta0_deg) {
    require(theta0_deg >= 0.0 && theta0_deg <= 90.0, "bisecting_plane_cdf: theta0 outside [0,90]");
    const double s = std::sin(deg2rad(theta0_deg));
    return s * s;
}

namespace {

// Mass of the plane density (r^2 + a^2)^-b over the disk of radius R,
// integrated in polar coordinates (the 2 pi azimuthal factor is left off;
// it cancels in every ratio). The region beyond r = 1 is mapped with
// s = 1/r, giving s^(2b-3) (1 + a^2 s^2)^-b whose only difficulty is an
// integrable endpoint singularity at s = 0, which tanh_sinh resolves.
double plane_disk_mass(double a, double b, double radius) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto inner = [a, b](double r) { return std::pow(r * r + a * a, -b) * r; };
    auto outer = [a, b](double s) {
        return std::pow(s, 2.0 * b - 3.0) * std::pow(1.0 + a * a * s * s, -b);
    };
    if (radius <= 1.0) return integrator.integrate(inner, 0.0, radius);
    const double s_lo = std::isinf(radius) ? 0.0 : 1.0 / radius;
    return integrator.integrate(inner, 0.0, 1.0) + integrator.integrate(outer, s_lo, 1.0);
}

double plane_total_mass(double a, double b) {
    return plane_disk_mass(a, b, std::numeric_limits<double>::infinity());
}

}  // namespace

double quadrature_half_space_cdf(double theta0_deg, double a, double b) {
    require(a > 0.0, "quadrature: half-space needs a > 0");
    require(b > 1.0, "quadrature: half-space mass diverges for b <= 1");
    require(theta0_deg >= 0.0 && theta0_deg <= 90.0, "quadrature: theta0 outside [0,90]");
    if (theta0_deg == 90.0) return 1.0;
    // hit point (u,v,a): tan(theta) = r/a
    const double radius = a * std::tan(deg2rad(theta0_deg));
    return plane_disk_mass(a, b, radius) / plane_total_mass(a, b);
}

double quadrature_sphere_hit_cdf(double theta0_deg, double a, double b) {
    require(a >= 0.0 && a < 1.0, "quadrature: need 0 <= a < 1");
    require(theta0_deg >= 0.0 && theta0_deg <= 180.0, "quadrature: theta0 outside [0,180]");
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto g = [a, b](double t) { return sphere_hit_density(t, a, b) * std::sin(t); };
    const double total = integrator.integrate(g, 0.0, kPi);
    return integrator.integrate(g, 0.0, deg2rad(theta0_deg)) / total;
}

double quadrature_bisecting_plane_cdf(double theta0_deg) {
    require(theta0_deg >= 0.0 && theta0_deg <= 90.0, "quadrature: theta0 outside [0,90]");
    if (theta0_deg == 90.0) return 1.0;
    // Eq-form (r^2+1)^-2 is the a = 1, b = 2 plane density.
    return plane_disk_mass(1.0, 2.0, std::tan(deg2rad(theta0_deg))) / plane_total_mass(1.0, 2.0);
}

double quadrature_bisecting_total_mass() {
    // 2 pi (azimuth) times 1/pi (prefactor): the density ships normalized
    return 2.0 * plane_total_mass(1.0, 2.0);
}

std::vector<double> degree_grid(double lo_deg, double hi_deg, double step_deg) {
    if (step_deg <= 0.0 || hi_deg < lo_deg) throw std::invalid_argument("degree_grid: bad range");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::llround((hi_deg - lo_deg) / step_deg));
    g.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) g.push_back(lo_deg + static_cast<double>(k) * step_deg);
    return g;
}

namespace {

template <typename Cdf>
PredictedCdf tabulate_conditioned(Cdf cdf, double b, double a, double cutoff_deg,
                                  double step_deg) {
    PredictedCdf out;
    out.b = b;
    out.a = a;
    out.cutoff_deg = cutoff_deg;
    out.grid_deg = degree_grid(0.0, cutoff_deg, step_deg);
    const double norm = cdf(cutoff_deg);
    if (norm <= 0.0) throw std::invalid_argument("predicted cdf: zero mass below cutoff");
    out.F.reserve(out.grid_deg.size());
    for (const double t : out.grid_deg) out.F.push_back(cdf(t) / norm);
    out.F.back() = 1.0;
    return out;
}

}  // namespace

PredictedCdf predict_half_space(double b, double cutoff_deg, double step_deg) {
    return tabulate_conditioned([b](double t) { return half_space_cdf(t, b); }, b, 1.0,
                                cutoff_deg, step_deg);
}

PredictedCdf predict_sphere(double a, double b, double step_deg) {
    return tabulate_conditioned([a, b](double t) { return sphere_hit_cdf(t, a, b); }, b, a,
                                180.0, step_deg);
}

PredictedCdf predict_bisecting(double cutoff_deg, double step_deg) {
    return tabulate_conditioned([](double t) { return bisecting_plane_cdf(t); }, 2.0, 1.0,
                                cutoff_deg, step_deg);
}

}  // namespace saw
