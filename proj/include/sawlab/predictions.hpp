// predictions.hpp
// Closed-form conformal geometry and hitting-angle CDFs: the Mobius map
// taking the unit sphere to the plane z=1, its area factor, the three
// hitting densities, their theta-CDFs, and an independent quadrature oracle
// used to validate every closed form.
//
// theta is in degrees at all public interfaces; radians internally.
#pragma once

#include <vector>

namespace saw {

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

// f(x,y,z) = 2(x,y,1-z) / (x^2+y^2+(1-z)^2); pole at (0,0,1).
// Maps infinity to the origin, the origin to (0,0,2), the unit sphere to the
// plane z=1, and (0,0,a) to (0,0, 2/(1-a)). Not an involution; the explicit
// inverse is below.
Vec3 conformal_map(Vec3 p);

// f^-1(u,v,s) = (2u, 2v, u^2+v^2+s^2-2s) / (u^2+v^2+s^2); pole at the origin.
Vec3 inverse_conformal_map(Vec3 q);

// Image of the spherical point (theta,phi) under f, as plane coordinates:
// u = sin(t)cos(p)/(1-cos(t)), v = sin(t)sin(p)/(1-cos(t)).
void sphere_to_plane(double theta_rad, double phi_rad, double& u, double& v);

// Infinitesimal-area factor of f from the unit sphere to the plane z=1.
double area_jacobian(double theta_rad);           // 1/(1-cos t)^2
double area_jacobian_uv(double u, double v);      // (u^2+v^2+1)^2 / 4

// Unnormalized hitting densities.
double half_space_density(double u, double v, double a, double b);  // (u^2+v^2+a^2)^-b
double sphere_hit_density(double theta_rad, double a, double b);    // (1+a^2-2a cos t)^-b
double bisecting_plane_density(double u, double v);                 // (1/pi)(u^2+v^2+1)^-2

// Closed-form theta-CDFs (unconditioned).
double half_space_cdf(double theta0_deg, double b);                 // 1 - cos^(2(b-1))
double sphere_hit_cdf(double theta0_deg, double a, double b);
double bisecting_plane_cdf(double theta0_deg);                      // sin^2

// Independent numerical route: integrates the stated density over the region
// theta <= theta0 and normalizes, to absolute accuracy <= 1e-8.
double quadrature_half_space_cdf(double theta0_deg, double a, double b);
double quadrature_sphere_hit_cdf(double theta0_deg, double a, double b);
double quadrature_bisecting_plane_cdf(double theta0_deg);
double quadrature_bisecting_total_mass();  // should be 1: the density ships normalized

// A predicted CDF tabulated on a uniform degree grid, conditioned on
// theta <= cutoff (values divided by F(cutoff); last grid point is 1).
struct PredictedCdf {
    std::vector<double> grid_deg;
    std::vector<double> F;
    double b = 0;
    double a = 0;
    double cutoff_deg = 0;
};

std::vector<double> degree_grid(double lo_deg, double hi_deg, double step_deg = 1.0);

PredictedCdf predict_half_space(double b, double cutoff_deg = 85.0, double step_deg = 1.0);
PredictedCdf predict_sphere(double a, double b, double step_deg = 1.0);  // grid 0..180, no cutoff
PredictedCdf predict_bisecting(double cutoff_deg = 85.0, double step_deg = 1.0);

}  // namespace saw
