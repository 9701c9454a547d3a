#include "aecurv/fourth_order.hpp"

#include "aecurv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace aecurv {

namespace {

size_t sq(int n) { return static_cast<size_t>(n) * static_cast<size_t>(n); }

void require(int have, int need, const char* what) {
    if (have < need)
        fail(ErrorKind::order, std::string(what) + " requires derivative order " +
                                   std::to_string(need) + ", got " + std::to_string(have));
}

// Flat-space Laplacian of a jet, order drops by 2.
Jet flat_laplacian(const Jet& f) {
    require(f.order(), 2, "flat Laplacian");
    Jet acc = f.derivative(0).derivative(0);
    for (int i = 1; i < f.dim(); ++i) acc += f.derivative(i).derivative(i);
    return acc;
}

} // namespace

FourthOrderFrame fourth_order_frame(const CurvatureFrame& cf) {
    const int n = cf.dim();
    const int K = cf.order();
    require(K, 4, "Q");
    const int F = K - 4;

    FourthOrderFrame fo;
    fo.dim = n;
    fo.order = F;
    fo.consumed = {K, K - 1, K - 2, F};

    auto trunc = [&](const std::vector<Jet>& in) {
        std::vector<Jet> out(in.size());
        for (size_t k = 0; k < in.size(); ++k) out[k] = in[k].truncated(F);
        return out;
    };

    const std::vector<Jet> gF = trunc(cf.metric.g);
    const std::vector<Jet> invF = trunc(cf.metric.g_inv);
    const std::vector<Jet> sF = trunc(cf.schouten);
    const Jet rF = cf.scalar.truncated(F);
    const Jet trsF = cf.schouten_trace.truncated(F);

    auto at = [n](const std::vector<Jet>& m, int i, int j) -> const Jet& {
        return m[static_cast<size_t>(i * n + j)];
    };

    // Shared second-order ingredients, all at order F.
    const std::vector<Jet> lap_ric = tensor_laplacian(cf, cf.ric);
    const std::vector<Jet> hess_r = covariant_hessian(cf, cf.scalar);
    Jet lap_r = Jet::constant(n, F, 0.0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) lap_r += at(invF, u, v) * at(hess_r, u, v);
    const Jet ric2 = norm2_with_inverse(cf, cf.ric).truncated(F);
    const Jet s2 = norm2_with_inverse(cf, cf.schouten).truncated(F);

    // Q = -Delta R / (2(n-1)) - 2|Ric|^2/(n-2)^2 + c_Q R^2.
    const double c_q = (std::pow(n, 3) - 4.0 * n * n + 16.0 * n - 16.0) /
                       (8.0 * (n - 1.0) * (n - 1.0) * (n - 2.0) * (n - 2.0));
    fo.q = lap_r * (-1.0 / (2.0 * (n - 1))) - ric2 * (2.0 / ((n - 2.0) * (n - 2.0))) +
           (rF * rF) * c_q;

    // Schouten with one index raised, S^a_u = g^{ab} S_bu, order F.
    std::vector<Jet> s_up(sq(n));
    for (int a = 0; a < n; ++a)
        for (int u = 0; u < n; ++u) {
            Jet acc = Jet::constant(n, F, 0.0);
            for (int b = 0; b < n; ++b) acc += at(invF, a, b) * at(sF, b, u);
            s_up[static_cast<size_t>(a * n + u)] = std::move(acc);
        }
    // Fully raised S^{ab}.
    std::vector<Jet> s_upup(sq(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Jet acc = Jet::constant(n, F, 0.0);
            for (int u = 0; u < n; ++u) acc += at(s_up, a, u) * at(invF, b, u);
            s_upup[static_cast<size_t>(a * n + b)] = std::move(acc);
        }

    // T = (n-2)(Hess trS - g Delta trS / n) + 4(n-1)(SxS - |S|^2 g / n)
    //     - n^2 trS (S - trS g / n).
    const std::vector<Jet> hess_trs = covariant_hessian(cf, cf.schouten_trace);
    Jet lap_trs = Jet::constant(n, F, 0.0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) lap_trs += at(invF, u, v) * at(hess_trs, u, v);

    fo.t.resize(sq(n));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            Jet sxs = Jet::constant(n, F, 0.0); // (SxS)_uv = S^k_u S_kv
            for (int k = 0; k < n; ++k) sxs += at(s_up, k, u) * at(sF, k, v);
            Jet val = (at(hess_trs, u, v) - (1.0 / n) * (at(gF, u, v) * lap_trs)) *
                          static_cast<double>(n - 2) +
                      (sxs - (1.0 / n) * (s2 * at(gF, u, v))) * (4.0 * (n - 1)) -
                      static_cast<double>(n) * n *
                          (trsF * (at(sF, u, v) - (1.0 / n) * (trsF * at(gF, u, v))));
            fo.t[static_cast<size_t>(u * n + v)] = std::move(val);
        }

    // Bach. The curvature term contracts the lowered Riemann tensor
    // Riem_{auvb} = g_{am} R^m_{ubv} against S^{ab}; this is the slot order
    // under which tr B = 0 and div G_J = 0 hold.
    std::vector<Jet> riemF(sq(n) * sq(n));
    for (size_t k = 0; k < riemF.size(); ++k) riemF[k] = cf.riem[k].truncated(F);
    auto riem_at = [&](int i, int jj, int k, int l) -> const Jet& {
        return riemF[static_cast<size_t>(((i * n + jj) * n + k) * n + l)];
    };

    fo.b.resize(sq(n));
    const double c1 = 1.0 / (n - 2.0);
    const double c2 = 1.0 / (2.0 * (n - 1.0) * (n - 2.0));
    const double c3 = 1.0 / (2.0 * (n - 1.0));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            Jet riem_term = Jet::constant(n, F, 0.0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Jet lowered = Jet::constant(n, F, 0.0);
                    for (int m = 0; m < n; ++m)
                        lowered += at(gF, a, m) * riem_at(m, u, b, v);
                    riem_term += at(s_upup, a, b) * lowered;
                }
            Jet ss = Jet::constant(n, F, 0.0); // S^a_u S_av
            for (int a = 0; a < n; ++a) ss += at(s_up, a, u) * at(sF, a, v);

            Jet val = at(lap_ric, u, v) * c1 - (lap_r * at(gF, u, v)) * c2 -
                      at(hess_r, u, v) * c3 + riem_term * 2.0 -
                      ss * static_cast<double>(n - 4) - s2 * at(gF, u, v) -
                      2.0 * (trsF * at(sF, u, v));
            fo.b[static_cast<size_t>(u * n + v)] = std::move(val);
        }

    // J and G_J.
    fo.j.resize(sq(n));
    fo.gj.resize(sq(n));
    const double c_t = (n - 4.0) / (4.0 * (n - 1.0) * (n - 2.0));
    for (size_t k = 0; k < sq(n); ++k) {
        fo.j[k] = (fo.q * gF[k]) * (1.0 / n) - fo.b[k] * c1 - fo.t[k] * c_t;
        fo.gj[k] = fo.j[k] - (fo.q * gF[k]) * 0.25;
    }
    return fo;
}

Jet q_curvature(const CurvatureFrame& cf) { return fourth_order_frame(cf).q; }

std::vector<Jet> t_tensor(const CurvatureFrame& cf) { return fourth_order_frame(cf).t; }

std::vector<Jet> bach_tensor(const CurvatureFrame& cf) { return fourth_order_frame(cf).b; }

std::pair<std::vector<Jet>, std::vector<Jet>> j_tensor(const CurvatureFrame& cf) {
    FourthOrderFrame fo = fourth_order_frame(cf);
    return {std::move(fo.j), std::move(fo.gj)};
}

std::vector<Jet> gj_divergence(const CurvatureFrame& cf, const FourthOrderFrame& fo) {
    require(cf.order(), 5, "divergence of G_J");
    if (fo.order < 1) fail(ErrorKind::order, "divergence of G_J needs order-1 G_J jets");
    return divergence_2tensor(cf, fo.gj);
}

double linearized_q_flat(const std::vector<Jet>& h) {
    if (h.empty()) fail(ErrorKind::domain, "linearized_q_flat: empty tensor");
    const int n = h[0].dim();
    if (h.size() != sq(n)) fail(ErrorKind::domain, "linearized_q_flat: expected dim*dim jets");
    require(h[0].order(), 4, "DQ_delta");

    Jet div2 = Jet::constant(n, h[0].order() - 2, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            div2 += h[static_cast<size_t>(i * n + j)].derivative(i).derivative(j);
    Jet tr = h[0];
    for (int i = 1; i < n; ++i) tr += h[static_cast<size_t>(i * n + i)];

    double lap_div2 = flat_laplacian(div2).value();
    double lap2_tr = flat_laplacian(flat_laplacian(tr)).value();
    return -(lap_div2 - lap2_tr) / (2.0 * (n - 1));
}

std::vector<Jet> adjoint_dq_flat(const Jet& v) {
    const int n = v.dim();
    require(v.order(), 4, "D*Q_delta");
    const int F = v.order() - 4;

    Jet lap_v = flat_laplacian(v);             // order - 2
    Jet lap2_v = flat_laplacian(lap_v).truncated(F);
    std::vector<Jet> out(sq(n));
    const double c = -1.0 / (2.0 * (n - 1));
    for (int u = 0; u < n; ++u)
        for (int w = u; w < n; ++w) {
            Jet hess = lap_v.derivative(u).derivative(w).truncated(F);
            Jet val = (hess - (u == w ? lap2_v : Jet::constant(n, F, 0.0))) * c;
            out[static_cast<size_t>(u * n + w)] = val;
            if (u != w) out[static_cast<size_t>(w * n + u)] = std::move(val);
        }
    return out;
}

std::vector<Jet> boundary_one_form(const std::vector<Jet>& h, const Jet& v) {
    if (h.empty()) fail(ErrorKind::domain, "boundary_one_form: empty tensor");
    const int n = h[0].dim();
    if (h.size() != sq(n)) fail(ErrorKind::domain, "boundary_one_form: expected dim*dim jets");
    require(std::min(h[0].order(), v.order()), 3, "U(h,V)");
    const int m = std::min(h[0].order(), v.order()) - 3;

    auto at = [&](int i, int j) -> const Jet& { return h[static_cast<size_t>(i * n + j)]; };

    Jet div2 = Jet::constant(n, h[0].order() - 2, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) div2 += at(i, j).derivative(i).derivative(j);
    Jet tr = at(0, 0);
    for (int i = 1; i < n; ++i) tr += at(i, i);
    Jet u_fn = div2 - flat_laplacian(tr); // order h - 2

    Jet lap_v = flat_laplacian(v);                     // order v - 2
    const Jet lap_v_m = lap_v.truncated(m);
    const Jet u_m = u_fn.truncated(m);
    const Jet v_m = v.truncated(m);
    Jet tr_m = tr.truncated(m);

    std::vector<Jet> dlap_v(static_cast<size_t>(n));
    for (int a = 0; a < n; ++a) dlap_v[static_cast<size_t>(a)] = lap_v.derivative(a).truncated(m);

    std::vector<Jet> out(static_cast<size_t>(n));
    const double c = -1.0 / (2.0 * (n - 1));
    for (int j = 0; j < n; ++j) {
        Jet du_j = u_fn.derivative(j).truncated(m);
        Jet dv_j = v.derivative(j).truncated(m);
        Jet div_h_j = at(0, j).derivative(0);
        for (int a = 1; a < n; ++a) div_h_j += at(a, j).derivative(a);
        Jet dtr_j = tr.derivative(j);
        Jet h_dlap = Jet::constant(n, m, 0.0); // h(dDeltaV, .)_j
        for (int a = 0; a < n; ++a)
            h_dlap += at(j, a).truncated(m) * dlap_v[static_cast<size_t>(a)];

        Jet val = v_m * du_j - u_m * dv_j +
                  lap_v_m * (div_h_j.truncated(m) - dtr_j.truncated(m)) - h_dlap +
                  tr_m * dlap_v[static_cast<size_t>(j)];
        out[static_cast<size_t>(j)] = val * c;
    }
    return out;
}

QTaylor taylor_remainder(const MetricSpec& spec, std::span<const double> point) {
    MetricJetFrame frame = metric_frame(spec, point, 4);
    const int n = frame.dim;
    std::vector<Jet> h(frame.g);
    for (int i = 0; i < n; ++i) {
        Jet& d = h[static_cast<size_t>(i * n + i)];
        d = d - 1.0;
    }

    QTaylor out;
    out.q = fourth_order_frame(curvature_frame(std::move(frame))).q.value();
    out.linear = linearized_q_flat(h);
    out.remainder = out.q - out.linear;
    return out;
}

} // namespace aecurv
