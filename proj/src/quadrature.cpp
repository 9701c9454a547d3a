#include "aecurv/quadrature.hpp"

#include "aecurv/errors.hpp"

#include <cmath>
#include <cstdlib>

namespace aecurv {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Eigenvalues and first eigenvector components of a symmetric tridiagonal
// matrix by the implicit QL method. d holds the diagonal (becomes the
// eigenvalues), e the subdiagonal in e[0..n-2], z the weight seed vector.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return;
    e.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            int m = l;
            for (; m < n - 1; ++m) {
                double dd = std::abs(d[static_cast<size_t>(m)]) + std::abs(d[static_cast<size_t>(m + 1)]);
                if (std::abs(e[static_cast<size_t>(m)]) <= 1e-15 * dd) break;
            }
            if (m == l) break;
            if (++iter > 50) fail(ErrorKind::numeric, "quadrature eigensolver did not converge");
            double g = (d[static_cast<size_t>(l + 1)] - d[static_cast<size_t>(l)]) /
                       (2.0 * e[static_cast<size_t>(l)]);
            double r = std::hypot(g, 1.0);
            double sign_g = g >= 0 ? std::abs(r) : -std::abs(r);
            g = d[static_cast<size_t>(m)] - d[static_cast<size_t>(l)] +
                e[static_cast<size_t>(l)] / (g + sign_g);
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[static_cast<size_t>(i)];
                double b = c * e[static_cast<size_t>(i)];
                r = std::hypot(f, g);
                e[static_cast<size_t>(i + 1)] = r;
                if (r == 0.0) {
                    d[static_cast<size_t>(i + 1)] -= p;
                    e[static_cast<size_t>(m)] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[static_cast<size_t>(i + 1)] - p;
                r = (d[static_cast<size_t>(i)] - g) * s + 2.0 * c * b;
                p = s * r;
                d[static_cast<size_t>(i + 1)] = g + p;
                g = c * r - b;
                double zt = z[static_cast<size_t>(i + 1)];
                z[static_cast<size_t>(i + 1)] = s * z[static_cast<size_t>(i)] + c * zt;
                z[static_cast<size_t>(i)] = c * z[static_cast<size_t>(i)] - s * zt;
            }
            if (underflow) continue;
            d[static_cast<size_t>(l)] -= p;
            e[static_cast<size_t>(l)] = g;
            e[static_cast<size_t>(m)] = 0.0;
        }
    }
    // Sort ascending, carrying z along.
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        for (int j = i + 1; j < n; ++j)
            if (d[static_cast<size_t>(j)] < d[static_cast<size_t>(k)]) k = j;
        if (k != i) {
            std::swap(d[static_cast<size_t>(i)], d[static_cast<size_t>(k)]);
            std::swap(z[static_cast<size_t>(i)], z[static_cast<size_t>(k)]);
        }
    }
}

} // namespace

void gauss_jacobi(int m, double gamma, std::vector<double>& nodes,
                  std::vector<double>& weights) {
    if (m < 1) fail(ErrorKind::config, "gauss_jacobi: need at least one node");
    if (!(gamma > -1.0)) fail(ErrorKind::config, "gauss_jacobi: gamma must exceed -1");

    // Symmetric Jacobi weight: diagonal is zero; the subdiagonal squares
    // reduce to b_k^2 = k(k + 2 gamma) / ((2k + 2 gamma + 1)(2k + 2 gamma - 1)).
    std::vector<double> d(static_cast<size_t>(m), 0.0);
    std::vector<double> e(static_cast<size_t>(m) - 1);
    for (int k = 1; k < m; ++k) {
        double num = k * (k + 2.0 * gamma);
        double den = (2.0 * k + 2.0 * gamma + 1.0) * (2.0 * k + 2.0 * gamma - 1.0);
        e[static_cast<size_t>(k - 1)] = std::sqrt(num / den);
    }
    std::vector<double> z(static_cast<size_t>(m), 0.0);
    z[0] = 1.0;
    tridiagonal_ql(d, e, z);

    const double mu0 = std::pow(2.0, 2.0 * gamma + 1.0) * std::tgamma(gamma + 1.0) *
                       std::tgamma(gamma + 1.0) / std::tgamma(2.0 * gamma + 2.0);
    nodes = d;
    weights.resize(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k)
        weights[static_cast<size_t>(k)] = mu0 * z[static_cast<size_t>(k)] * z[static_cast<size_t>(k)];
}

double sphere_area(int dim) {
    return 2.0 * std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0);
}

SphereQuadrature build_quadrature(int dim, int m) {
    if (dim < 3 || dim > 8) fail(ErrorKind::config, "quadrature supports dimensions 3..8");
    if (m < 2) fail(ErrorKind::config, "quadrature degree must be at least 2");

    SphereQuadrature q;
    q.dim = dim;
    q.degree = m;

    // Per polar angle j (1-based), Gauss nodes in t = cos(theta_j) with
    // weight (1 - t^2)^{(dim-2-j)/2}.
    const int polar = dim - 2;
    std::vector<std::vector<double>> tj(static_cast<size_t>(polar)),
        wj(static_cast<size_t>(polar));
    for (int j = 1; j <= polar; ++j)
        gauss_jacobi(m, (dim - 2 - j) / 2.0, tj[static_cast<size_t>(j - 1)],
                     wj[static_cast<size_t>(j - 1)]);

    const int azim = 2 * m;
    const double w_phi = 2.0 * kPi / azim;

    std::vector<int> idx(static_cast<size_t>(polar), 0);
    for (;;) {
        double w_polar = 1.0;
        for (int j = 0; j < polar; ++j)
            w_polar *= wj[static_cast<size_t>(j)][static_cast<size_t>(idx[static_cast<size_t>(j)])];
        for (int a = 0; a < azim; ++a) {
            double phi = w_phi * a;
            std::vector<double> x(static_cast<size_t>(dim));
            double sin_prod = 1.0;
            for (int j = 0; j < polar; ++j) {
                double t = tj[static_cast<size_t>(j)][static_cast<size_t>(idx[static_cast<size_t>(j)])];
                x[static_cast<size_t>(j)] = sin_prod * t;
                sin_prod *= std::sqrt(std::max(0.0, 1.0 - t * t));
            }
            x[static_cast<size_t>(dim - 2)] = sin_prod * std::cos(phi);
            x[static_cast<size_t>(dim - 1)] = sin_prod * std::sin(phi);
            q.nodes.push_back(std::move(x));
            q.weights.push_back(w_polar * w_phi);
        }
        int j = polar - 1;
        for (; j >= 0; --j) {
            if (++idx[static_cast<size_t>(j)] < m) break;
            idx[static_cast<size_t>(j)] = 0;
        }
        if (j < 0) break;
    }
    return q;
}

} // namespace aecurv
