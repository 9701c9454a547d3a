#pragma once

// Product quadrature on the unit sphere S^{n-1}: Gauss nodes in cos(theta)
// for each polar angle with the Jacobian sin^{n-1-j} factor absorbed into the
// weights (a Gauss-Jacobi rule with weight (1-t^2)^((n-2-j)/2)), and an
// equal-weight trapezoid rule in the azimuth. Exact for all monomials of
// total degree <= 2m-1; weights sum to |S^{n-1}|.

#include <vector>

namespace aecurv {

struct SphereQuadrature {
    int dim = 0;
    int degree = 0;                          // m, points per angle
    std::vector<std::vector<double>> nodes;  // unit vectors, m^{n-2} * 2m of them
    std::vector<double> weights;
};

// 3 <= dim <= 8, m >= 2.
SphereQuadrature build_quadrature(int dim, int m);

// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int dim);

// m-point Gauss rule for weight (1-t^2)^gamma on [-1,1], gamma > -1.
// Golub-Welsch on the symmetric Jacobi recurrence.
void gauss_jacobi(int m, double gamma, std::vector<double>& nodes,
                  std::vector<double>& weights);

} // namespace aecurv
