#pragma once

// Deterministic low-discrepancy sampling of dyadic annuli. Directions come
// from Halton-driven Box-Muller normals (normalized), radii are log-uniform
// within each annulus. The seed offsets the Halton index, so every sample set
// is reproducible from (seed, annulus, count).

#include <cstdint>
#include <vector>

namespace aecurv {

double halton(std::uint64_t index, int base);

// `count` points in the annulus [r_lo, 2*r_lo), dimension dim.
std::vector<std::vector<double>> annulus_points(int dim, double r_lo, int count,
                                                std::uint64_t seed);

// `count` points with radius log-uniform in [r_lo, r_hi).
std::vector<std::vector<double>> shell_points(int dim, double r_lo, double r_hi, int count,
                                              std::uint64_t seed);

} // namespace aecurv
