#pragma once

// Curvature of a metric from its jets at a point. Everything lives in the
// coordinate basis of the end chart. Orders drop explicitly: with metric jets
// of order K, Christoffel symbols carry K-1, curvature tensors K-2. Requests
// that would need a negative order are hard errors, never silent truncation.
//
// Conventions:
//   Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
//   R^i_jkl    = d_k Gamma^i_lj - d_l Gamma^i_kj
//                + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj
//   Ric_jl     = R^i_jil, chosen so the round sphere has positive scalar
//                curvature; S = (Ric - R g / (2(n-1))) / (n-2).

#include "aecurv/jet.hpp"
#include "aecurv/metric.hpp"

#include <span>
#include <vector>

namespace aecurv {

struct MetricJetFrame {
    int dim = 0;
    int order = 0;
    std::vector<double> point;
    std::vector<Jet> g;     // dim*dim, row-major, symmetric
    std::vector<Jet> g_inv; // dim*dim, same order as g
    Jet sqrt_det;

    const Jet& g_at(int i, int j) const { return g[static_cast<size_t>(i * dim + j)]; }
    const Jet& inv_at(int i, int j) const { return g_inv[static_cast<size_t>(i * dim + j)]; }
};

MetricJetFrame metric_frame(const MetricSpec& spec, std::span<const double> point, int order);

// Build a frame from caller-supplied component jets (row-major dim*dim, all
// of the same order). Used for perturbation metrics assembled in jet space.
MetricJetFrame metric_frame_from_jets(std::span<const double> point, int dim,
                                      std::vector<Jet> g);

struct CurvatureFrame {
    MetricJetFrame metric;
    std::vector<Jet> gamma;    // [k][i][j], order K-1
    std::vector<Jet> riem;     // R^i_jkl as [i][j][k][l], order K-2
    std::vector<Jet> ric;      // order K-2
    std::vector<Jet> einstein; // Ric - 1/2 R g
    std::vector<Jet> schouten;
    Jet scalar;         // R
    Jet schouten_trace; // R / (2(n-1))

    int dim() const { return metric.dim; }
    int order() const { return metric.order; }
    const Jet& gamma_at(int k, int i, int j) const {
        int n = metric.dim;
        return gamma[static_cast<size_t>((k * n + i) * n + j)];
    }
    const Jet& riem_at(int i, int j, int k, int l) const {
        int n = metric.dim;
        return riem[static_cast<size_t>(((i * n + j) * n + k) * n + l)];
    }
};

// Needs metric order >= 2.
CurvatureFrame curvature_frame(MetricJetFrame frame);

// Scalar operators. Results carry order min(f.order, K) - 2.
std::vector<Jet> covariant_hessian(const CurvatureFrame& cf, const Jet& f);
Jet laplace_beltrami(const CurvatureFrame& cf, const Jet& f);

// 2-tensor operators on T given as dim*dim jets of one common order t.
// cov_deriv: (nabla_a T)_bv at [a][b][v], order min(t, K) - 1.
// tensor_laplacian: rough Laplacian g^ab nabla_a nabla_b T, order min(t, K) - 2.
// divergence: (div T)_v = g^ab nabla_a T_bv, order min(t, K) - 1.
std::vector<Jet> cov_deriv_2tensor(const CurvatureFrame& cf, const std::vector<Jet>& T);
std::vector<Jet> tensor_laplacian(const CurvatureFrame& cf, const std::vector<Jet>& T);
std::vector<Jet> divergence_2tensor(const CurvatureFrame& cf, const std::vector<Jet>& T);

// g^ij T_ij at the common working order.
Jet trace_with_inverse(const CurvatureFrame& cf, const std::vector<Jet>& T);

// Fully covariant |T|^2 = g^ia g^jb T_ij T_ab.
Jet norm2_with_inverse(const CurvatureFrame& cf, const std::vector<Jet>& T);

// Largest |value| over entries, for scale-relative tolerances (floor 1e-30).
double tensor_scale(const std::vector<Jet>& T);

} // namespace aecurv
