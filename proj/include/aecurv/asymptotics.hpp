#pragma once

// Decay machinery on the end: dyadic annulus sampling, weighted norms
// ||u sigma^{-delta-n/p}||_p with sigma = sqrt(1+r^2), decay-exponent fits,
// a Yamabe Rayleigh-quotient probe, and the spherically symmetric harmonic
// coordinate y = f(r) x/r with its decay measurement.

#include "aecurv/expr.hpp"
#include "aecurv/metric.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace aecurv {

struct AnnulusGrid {
    int dim = 0;
    double r0 = 1.0;
    std::uint64_t seed = 1;
    // samples[k] covers the annulus [r0 2^k, r0 2^{k+1}).
    std::vector<std::vector<std::vector<double>>> samples;
};

// annuli >= 4 for exponent fits; points >= 64 per annulus is the norm.
AnnulusGrid build_annulus_grid(int dim, double r0, int annuli, int points,
                               std::uint64_t seed);

using FieldSampler = std::function<double(const std::vector<double>&)>;

// ||u sigma^{-delta - n/p}||_{L^p} over the gridded end; p = infinity gives
// sup |u| sigma^{-delta}. Finite p uses importance-weighted Monte Carlo with
// the grid's log-uniform radial sampling density.
double weighted_norm(const FieldSampler& u, double p, double delta, const AnnulusGrid& grid);

struct DecayReport {
    std::string field;
    std::vector<double> annulus_radii; // geometric mid-radii
    std::vector<double> sup_values;
    double exponent = 0.0; // decay rate: |u| ~ r^{-exponent}
    double band = 0.0;     // standard error of the fitted slope
    bool degenerate = false; // field vanished on every sample; exponent = +inf
    std::uint64_t seed = 0;
};

DecayReport estimate_decay(const std::string& name, const FieldSampler& u,
                           const AnnulusGrid& grid);

// Trial functions for the Yamabe quotient carry their own gradient so that
// compactly supported bumps (not expressible in the DSL) work too.
struct TrialFunction {
    FieldSampler value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

// (1 - ((r-c)/w)^2)_+^2.
TrialFunction radial_bump(double center, double width);
// Wraps a DSL expression; gradient from order-1 jets.
TrialFunction trial_from_expr(const ExprPtr& e, const std::map<std::string, double>& params);

// Rayleigh quotient (Int a_n |grad u|_g^2 + R_g u^2 dV_g) / ||u||^2_{L^{2n/(n-2)}},
// an upper bound for the Yamabe invariant of [g].
double yamabe_quotient(const MetricSpec& spec, const TrialFunction& u,
                       const AnnulusGrid& grid);

// Minimum quotient over a small (center, width) battery of radial bumps.
double yamabe_probe(const MetricSpec& spec, const AnnulusGrid& grid);

struct HarmonicRadial {
    double r0 = 1.0, r_max = 1.0;
    std::vector<double> s_grid; // ln r, uniform
    std::vector<double> f, fs;  // f and df/ds on the grid, normalized
    double norm_c = 1.0;        // leading coefficient divided out at the far end
    double ode_residual = 0.0;  // max relative |Delta_g y| over probe points
    double growth_exponent = 0.0; // slope of log|f - r| vs log r
    bool degenerate_decay = false; // f == r to machine precision

    double f_at(double r) const;  // cubic Hermite in s = ln r
    double df_at(double r) const; // df/dr
};

// Requires a spherically symmetric spec g = a(r) delta + b(r) x x^T / r^2
// (validated by sampling); solves the radial harmonic ODE from inner_radius
// to r_max and measures the decay of f(r) - r.
HarmonicRadial harmonic_radial_coordinate(const MetricSpec& spec, double r_max);

// a, b, a', b' at radius r for a spherically symmetric metric.
struct RadialProfile {
    double a = 0.0, b = 0.0, da = 0.0, db = 0.0;
};
RadialProfile radial_profile(const MetricSpec& spec, double r);

} // namespace aecurv
