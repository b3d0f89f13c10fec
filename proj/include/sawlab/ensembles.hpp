// ensembles.hpp
// Transforms raw fixed-N chain states into the three geometric ensembles:
// full-space walks rotated/dilated onto a fixed chord (observable: first hit
// of the bisecting plane), half-space walks dilated onto a boundary plane,
// and full-space walks dilated into a unit sphere. Each emits a hitting
// angle with an importance weight ||w(N)||^-p.
#pragma once

#include <optional>
#include <span>

#include "sawlab/lattice.hpp"
#include "sawlab/sample.hpp"
#include "sawlab/stats.hpp"

namespace saw {

// b from the scaling relation 2 b nu = 2 rho - gamma + d nu.
double derive_b(double nu, double gamma, double rho, int d);

// Critical exponents parameterizing weights and predictions. rho and b are
// derived, never stored independently, so the defining relations hold to
// machine precision.
struct ExponentSet {
    double nu = 0.0;
    double gamma = 0.0;
    double gamma1 = 0.0;
    double rho = 0.0;  // gamma - gamma1
    double b = 0.0;    // derive_b(nu, gamma, rho, d)
    int d = 3;

    double weight_full() const { return gamma / nu; }            // full-space ensemble
    double weight_boundary() const { return (gamma - rho) / nu; }  // boundary-ending ensembles

    static ExponentSet make(double nu, double gamma, double gamma1, int d = 3);
    static ExponentSet saw3d();  // nu=0.587597, gamma=1.15698, gamma1=0.679
    static ExponentSet rw3d();   // nu=1/2, gamma=1, gamma1=1/2 -> b=3/2
};

struct SphereSpec {
    double a = 0.75;  // distance from the sphere center to the interior endpoint

    void validate() const;
};

constexpr double kDefaultCutoffDeg = 85.0;

// Observable: the first crossing of the plane that perpendicularly bisects
// the segment from the origin to w(N), interpolated along the crossing edge;
// theta is the angle at the origin between the crossing point and w(N).
// Weight ||w(N)||^-(gamma/nu).
WeightedSample full_space_sample(const Walk& walk, const ExponentSet& exps,
                                 double cutoff_deg = kDefaultCutoffDeg);

// Observable: the polar angle of the endpoint of a half-space walk (equal to
// the hit angle after dilating the endpoint onto the plane at distance 1).
// Weight w(N)_z^-((gamma-rho)/nu): the power of the dilation 1/w(N)_z that
// the transformation applies.
WeightedSample half_space_sample(const Walk& walk, const ExponentSet& exps,
                                 double cutoff_deg = kDefaultCutoffDeg);

// Dilates the walk by the unique lambda > 0 putting its endpoint on the unit
// sphere around (0,0,-a) (equivalently, start at (0,0,a), end on the unit
// sphere), and conditions on the dilated walk lying strictly inside.
// Returns nullopt when the walk pokes outside or w(N) = 0. The weight
// exponent defaults to the boundary-ending exponent and can be overridden.
std::optional<WeightedSample> sphere_sample(const Walk& walk, const SphereSpec& spec,
                                            const ExponentSet& exps,
                                            std::optional<double> weight_exponent = std::nullopt);

// Ratio of the random-walk empirical theta-density to the exact b = 3/2
// sphere prediction, per bin: the multiplicative lattice-orientation
// correction that stats::apply_correction divides out of sphere results.
// Empty bins get factor 1 with an unusable flag.
CorrectionProfile lattice_correction_profile(std::span<const SampleRecord> rw_samples,
                                             const SphereSpec& spec,
                                             const std::vector<double>& edges_deg,
                                             int batches_per_chain = 32);

}  // namespace saw
