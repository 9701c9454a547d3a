#include "aecurv/sampling.hpp"

#include "aecurv/errors.hpp"

#include <cmath>

namespace aecurv {

double halton(std::uint64_t index, int base) {
    double f = 1.0;
    double value = 0.0;
    while (index > 0) {
        f /= base;
        value += f * static_cast<double>(index % base);
        index /= base;
    }
    return value;
}

namespace {

constexpr int kPrimes[9] = {2, 3, 5, 7, 11, 13, 17, 19, 23};
constexpr double kPi = 3.14159265358979323846;

// Isotropic direction from consecutive Halton dimensions via Box-Muller.
std::vector<double> direction(int dim, std::uint64_t idx) {
    std::vector<double> z(dim, 0.0);
    for (int i = 0; i < dim; i += 2) {
        double u1 = halton(idx, kPrimes[i]);
        double u2 = halton(idx, kPrimes[i + 1]);
        if (u1 < 1e-12) u1 = 1e-12;
        double rho = std::sqrt(-2.0 * std::log(u1));
        z[i] = rho * std::cos(2.0 * kPi * u2);
        if (i + 1 < dim) z[i + 1] = rho * std::sin(2.0 * kPi * u2);
    }
    double norm2 = 0.0;
    for (double v : z) norm2 += v * v;
    if (norm2 < 1e-24) {
        z.assign(dim, 0.0);
        z[0] = 1.0;
        return z;
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (double& v : z) v *= inv;
    return z;
}

} // namespace

std::vector<std::vector<double>> shell_points(int dim, double r_lo, double r_hi, int count,
                                              std::uint64_t seed) {
    if (dim < 1 || dim > 8) fail(ErrorKind::domain, "shell_points: dim out of range");
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) fail(ErrorKind::domain, "shell_points: bad radii");
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<size_t>(count));
    const double log_lo = std::log(r_lo);
    const double log_hi = std::log(r_hi);
    for (int k = 0; k < count; ++k) {
        std::uint64_t idx = seed * 7919ull + 1ull + static_cast<std::uint64_t>(k);
        double t = halton(idx, kPrimes[8]);
        double r = std::exp(log_lo + t * (log_hi - log_lo));
        std::vector<double> p = direction(dim, idx);
        for (double& v : p) v *= r;
        pts.push_back(std::move(p));
    }
    return pts;
}

std::vector<std::vector<double>> annulus_points(int dim, double r_lo, int count,
                                                std::uint64_t seed) {
    return shell_points(dim, r_lo, 2.0 * r_lo, count, seed);
}

} // namespace aecurv
