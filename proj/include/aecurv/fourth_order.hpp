#pragma once

// Fourth-order curvature stack: Q-curvature, the T and Bach tensors, the
// J-tensor and its Einstein-type combination G_J = J - 1/4 Q g, plus the
// linearization of Q at the flat metric (adjoint, boundary 1-form, Taylor
// remainder). With metric jets of order K these objects carry order K-4.

#include "aecurv/tensor.hpp"

#include <span>
#include <utility>
#include <vector>

namespace aecurv {

struct FourthOrderFrame {
    int dim = 0;
    int order = 0; // working order K-4 of every tensor below
    Jet q;
    std::vector<Jet> t;  // traceless T-tensor
    std::vector<Jet> b;  // Bach
    std::vector<Jet> j;  // J = (1/n) Q g - B/(n-2) - (n-4) T / (4(n-1)(n-2))
    std::vector<Jet> gj; // G_J = J - 1/4 Q g

    // Jet orders consumed along the way, for reporting.
    struct Orders {
        int metric = 0, christoffel = 0, curvature = 0, fourth = 0;
    } consumed;
};

// Needs metric order >= 4 (>= 5 if the divergence of G_J is wanted).
FourthOrderFrame fourth_order_frame(const CurvatureFrame& cf);

Jet q_curvature(const CurvatureFrame& cf);
std::vector<Jet> t_tensor(const CurvatureFrame& cf);
std::vector<Jet> bach_tensor(const CurvatureFrame& cf);
// Returns (J, G_J).
std::pair<std::vector<Jet>, std::vector<Jet>> j_tensor(const CurvatureFrame& cf);

// (div_g G_J)_v; requires metric order >= 5.
std::vector<Jet> gj_divergence(const CurvatureFrame& cf, const FourthOrderFrame& fo);

// Linearization DQ_delta . h = -(1/(2(n-1))) (Delta(div^2 h) - Delta^2(tr h))
// at the flat metric; h given as dim*dim jets of order >= 4.
double linearized_q_flat(const std::vector<Jet>& h);

// Adjoint D*Q_delta . V = -(1/(2(n-1))) (-Delta^2 V delta + d^2(Delta V)),
// returned as jets of order V.order - 4.
std::vector<Jet> adjoint_dq_flat(const Jet& v);

// Boundary 1-form U(h, V); h and V of order >= 3, result order min - 3:
//   U = -(1/(2(n-1))) (V du - u dV + DeltaV (div h - d tr h)
//                      - h(dDeltaV, .) + (tr h) dDeltaV),  u = div^2 h - Delta tr h.
std::vector<Jet> boundary_one_form(const std::vector<Jet>& h, const Jet& v);

struct QTaylor {
    double q = 0.0;         // Q of the metric
    double linear = 0.0;    // DQ_delta . (g - delta)
    double remainder = 0.0; // q - linear (Q_delta = 0)
};
QTaylor taylor_remainder(const MetricSpec& spec, std::span<const double> point);

} // namespace aecurv
