#pragma once

// Surface-integral energy functionals over Euclidean spheres S_r and their
// r -> infinity limits. Integrals are computed as r^{n-1} Sum w_k f(r omega_k)
// with the Euclidean outward normal nu = x/r; limits come from a two-term fit
// F(r) = F_inf + c r^{-p}.

#include "aecurv/expr.hpp"
#include "aecurv/metric.hpp"
#include "aecurv/parallel.hpp"
#include "aecurv/quadrature.hpp"

#include <span>
#include <string>
#include <vector>

namespace aecurv {

struct FluxSeries {
    std::string functional;
    std::vector<double> radii;
    std::vector<double> values;
    double f_inf = 0.0;
    double coeff = 0.0;    // c in the fitted tail c r^{-p}
    double exponent = 0.0; // p
    double residual = 0.0; // RMS misfit of the two-term model
    bool diverged = false;
    std::vector<std::string> warnings;
};

// {r0 * 2^k : k_lo <= k <= k_hi}.
std::vector<double> dyadic_radii(double r0, int k_lo = 3, int k_hi = 10);

// ADM energy, 1/(2(n-1) omega_{n-1}) Int (d_i g_ij - d_j g_ii) nu^j.
FluxSeries adm_energy(const MetricSpec& spec, const SphereQuadrature& quad,
                      const std::vector<double>& radii, Exec mode = Exec::parallel);

// Einstein-tensor form, -1/((n-1)(n-2) omega_{n-1}) Int G(r d_r, nu).
FluxSeries adm_energy_einstein(const MetricSpec& spec, const SphereQuadrature& quad,
                               const std::vector<double>& radii, Exec mode = Exec::parallel);

// Fourth-order energy E(g) = lim Int (d_j d_i d_i g_aa - d_j d_a d_i g_ai) nu^j,
// no prefactor.
FluxSeries fourth_order_energy(const MetricSpec& spec, const SphereQuadrature& quad,
                               const std::vector<double>& radii, Exec mode = Exec::parallel);

// Int G_J(r d_r, nu) with coordinate indices contracted against delta.
FluxSeries gj_flux(const MetricSpec& spec, const SphereQuadrature& quad,
                   const std::vector<double>& radii, Exec mode = Exec::parallel);

// Charge E_g(V) = lim Int <U(g - delta, V), nu>. V should lie in the kernel
// N_0 = {V : Delta V affine}; membership is sampled numerically and a
// violation only attaches a warning.
FluxSeries charge(const MetricSpec& spec, const ExprPtr& v, const SphereQuadrature& quad,
                  const std::vector<double>& radii, Exec mode = Exec::parallel);

// Fit F(r) = F_inf + c r^{-p}, p in [0.1, 2 dim]; needs >= 4 radii. Flags a
// series whose tail differences keep growing as diverged.
void extrapolate(FluxSeries& series, int dim);

// Plot-ready CSV: functional,radius,value,fit per row.
std::string flux_series_csv(std::span<const FluxSeries> series);

} // namespace aecurv
