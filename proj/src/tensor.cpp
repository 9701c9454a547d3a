#include "aecurv/tensor.hpp"

#include "aecurv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aecurv {

namespace {

size_t sq(int n) { return static_cast<size_t>(n) * static_cast<size_t>(n); }

void require_order(int have, int need, const char* what) {
    if (have < need)
        fail(ErrorKind::order, std::string(what) + " requires derivative order " +
                                   std::to_string(need) + ", got " + std::to_string(have));
}

// Plain value-level inverse, partial pivoting. n <= 8.
std::vector<double> value_inverse(const std::vector<Jet>& g, int n) {
    std::vector<double> a(sq(n)), x(sq(n), 0.0);
    for (size_t k = 0; k < a.size(); ++k) a[k] = g[k].value();
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i * n + i)] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a[static_cast<size_t>(row * n + col)]) >
                std::abs(a[static_cast<size_t>(piv * n + col)]))
                piv = row;
        if (std::abs(a[static_cast<size_t>(piv * n + col)]) < 1e-300)
            fail(ErrorKind::validation, "metric value matrix is singular");
        if (piv != col)
            for (int k = 0; k < n; ++k) {
                std::swap(a[static_cast<size_t>(piv * n + k)], a[static_cast<size_t>(col * n + k)]);
                std::swap(x[static_cast<size_t>(piv * n + k)], x[static_cast<size_t>(col * n + k)]);
            }
        double d = a[static_cast<size_t>(col * n + col)];
        for (int k = 0; k < n; ++k) {
            a[static_cast<size_t>(col * n + k)] /= d;
            x[static_cast<size_t>(col * n + k)] /= d;
        }
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            double f = a[static_cast<size_t>(row * n + col)];
            if (f == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                a[static_cast<size_t>(row * n + k)] -= f * a[static_cast<size_t>(col * n + k)];
                x[static_cast<size_t>(row * n + k)] -= f * x[static_cast<size_t>(col * n + k)];
            }
        }
    }
    return x;
}

// Jet-valued inverse by Newton iteration X <- X(2I - gX); each step doubles
// the number of correct derivative orders, so ceil(log2(K+1)) steps suffice.
std::vector<Jet> jet_inverse(const std::vector<Jet>& g, int n, int order) {
    std::vector<double> x0 = value_inverse(g, n);
    std::vector<Jet> x(sq(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            x[static_cast<size_t>(i * n + j)] =
                Jet::constant(n, order, x0[static_cast<size_t>(i * n + j)]);

    int steps = 0;
    while ((1 << steps) < order + 1) ++steps;
    for (int s = 0; s < steps; ++s) {
        // e = 2I - gX
        std::vector<Jet> e(sq(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet acc = Jet::constant(n, order, i == j ? 2.0 : 0.0);
                for (int k = 0; k < n; ++k)
                    acc -= g[static_cast<size_t>(i * n + k)] * x[static_cast<size_t>(k * n + j)];
                e[static_cast<size_t>(i * n + j)] = std::move(acc);
            }
        std::vector<Jet> next(sq(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet acc = Jet::constant(n, order, 0.0);
                for (int k = 0; k < n; ++k)
                    acc += x[static_cast<size_t>(i * n + k)] * e[static_cast<size_t>(k * n + j)];
                next[static_cast<size_t>(i * n + j)] = std::move(acc);
            }
        x = std::move(next);
    }
    return x;
}

// Determinant by LU elimination in jet arithmetic, value-part pivoting.
Jet jet_determinant(std::vector<Jet> a, int n) {
    double sign = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a[static_cast<size_t>(row * n + col)].value()) >
                std::abs(a[static_cast<size_t>(piv * n + col)].value()))
                piv = row;
        if (std::abs(a[static_cast<size_t>(piv * n + col)].value()) < 1e-300)
            fail(ErrorKind::validation, "metric value matrix is singular");
        if (piv != col) {
            sign = -sign;
            for (int k = col; k < n; ++k)
                std::swap(a[static_cast<size_t>(piv * n + k)], a[static_cast<size_t>(col * n + k)]);
        }
        for (int row = col + 1; row < n; ++row) {
            Jet f = a[static_cast<size_t>(row * n + col)] / a[static_cast<size_t>(col * n + col)];
            for (int k = col; k < n; ++k)
                a[static_cast<size_t>(row * n + k)] -=
                    f * a[static_cast<size_t>(col * n + k)];
        }
    }
    Jet det = a[0];
    for (int i = 1; i < n; ++i) det = det * a[static_cast<size_t>(i * n + i)];
    return det * sign;
}

void finish_frame(MetricJetFrame& frame) {
    frame.g_inv = jet_inverse(frame.g, frame.dim, frame.order);
    Jet det = jet_determinant(frame.g, frame.dim);
    if (!(det.value() > 0.0))
        fail(ErrorKind::validation, "metric determinant is not positive at the point");
    frame.sqrt_det = jet_sqrt(det);
}

} // namespace

MetricJetFrame metric_frame(const MetricSpec& spec, std::span<const double> point, int order) {
    if (order < 0 || order > kMaxJetOrder)
        fail(ErrorKind::order, "metric jets support orders 0..5, got " + std::to_string(order));
    if (static_cast<int>(point.size()) != spec.dim)
        fail(ErrorKind::domain, "point dimension does not match metric");

    MetricJetFrame frame;
    frame.dim = spec.dim;
    frame.order = order;
    frame.point.assign(point.begin(), point.end());
    frame.g.resize(sq(spec.dim));

    EvalContext ctx(point, order, spec.params);
    for (int i = 0; i < spec.dim; ++i)
        for (int j = i; j < spec.dim; ++j) {
            Jet v = ctx.eval(spec.component(i, j));
            frame.g[static_cast<size_t>(i * spec.dim + j)] = v;
            if (i != j) frame.g[static_cast<size_t>(j * spec.dim + i)] = std::move(v);
        }
    finish_frame(frame);
    return frame;
}

MetricJetFrame metric_frame_from_jets(std::span<const double> point, int dim,
                                      std::vector<Jet> g) {
    if (g.size() != sq(dim)) fail(ErrorKind::domain, "metric jets: expected dim*dim entries");
    MetricJetFrame frame;
    frame.dim = dim;
    frame.order = g[0].order();
    for (const Jet& j : g)
        if (j.order() != frame.order || j.dim() != dim)
            fail(ErrorKind::order, "metric jets must share one dimension and order");
    frame.point.assign(point.begin(), point.end());
    frame.g = std::move(g);
    finish_frame(frame);
    return frame;
}

CurvatureFrame curvature_frame(MetricJetFrame frame) {
    const int n = frame.dim;
    const int K = frame.order;
    require_order(K, 2, "curvature");

    CurvatureFrame cf;
    cf.metric = std::move(frame);

    // dg[l] holds the order K-1 jets of d_l g_ij.
    std::vector<std::vector<Jet>> dg(static_cast<size_t>(n));
    for (int l = 0; l < n; ++l) {
        dg[static_cast<size_t>(l)].resize(sq(n));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet d = cf.metric.g_at(i, j).derivative(l);
                dg[static_cast<size_t>(l)][static_cast<size_t>(i * n + j)] = d;
                if (i != j)
                    dg[static_cast<size_t>(l)][static_cast<size_t>(j * n + i)] = std::move(d);
            }
    }
    std::vector<Jet> inv1(sq(n));
    for (size_t k = 0; k < inv1.size(); ++k) inv1[k] = cf.metric.g_inv[k].truncated(K - 1);

    cf.gamma.resize(static_cast<size_t>(n) * sq(n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet acc = Jet::constant(n, K - 1, 0.0);
                for (int l = 0; l < n; ++l) {
                    Jet sum = dg[static_cast<size_t>(i)][static_cast<size_t>(l * n + j)] +
                              dg[static_cast<size_t>(j)][static_cast<size_t>(l * n + i)] -
                              dg[static_cast<size_t>(l)][static_cast<size_t>(i * n + j)];
                    acc += inv1[static_cast<size_t>(k * n + l)] * sum;
                }
                acc *= 0.5;
                cf.gamma[static_cast<size_t>((k * n + i) * n + j)] = acc;
                if (i != j) cf.gamma[static_cast<size_t>((k * n + j) * n + i)] = std::move(acc);
            }

    std::vector<Jet> gamma2(cf.gamma.size());
    for (size_t t = 0; t < gamma2.size(); ++t) gamma2[t] = cf.gamma[t].truncated(K - 2);

    cf.riem.assign(sq(n) * sq(n), Jet::constant(n, K - 2, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = k + 1; l < n; ++l) {
                    Jet acc = cf.gamma_at(i, l, j).derivative(k) -
                              cf.gamma_at(i, k, j).derivative(l);
                    for (int m = 0; m < n; ++m) {
                        acc += gamma2[static_cast<size_t>((i * n + k) * n + m)] *
                               gamma2[static_cast<size_t>((m * n + l) * n + j)];
                        acc -= gamma2[static_cast<size_t>((i * n + l) * n + m)] *
                               gamma2[static_cast<size_t>((m * n + k) * n + j)];
                    }
                    cf.riem[static_cast<size_t>(((i * n + j) * n + k) * n + l)] = acc;
                    acc *= -1.0;
                    cf.riem[static_cast<size_t>(((i * n + j) * n + l) * n + k)] = std::move(acc);
                }

    cf.ric.resize(sq(n));
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            Jet acc = Jet::constant(n, K - 2, 0.0);
            for (int i = 0; i < n; ++i) acc += cf.riem_at(i, j, i, l);
            cf.ric[static_cast<size_t>(j * n + l)] = std::move(acc);
        }

    std::vector<Jet> inv2(sq(n)), g2(sq(n));
    for (size_t t = 0; t < inv2.size(); ++t) {
        inv2[t] = cf.metric.g_inv[t].truncated(K - 2);
        g2[t] = cf.metric.g[t].truncated(K - 2);
    }
    cf.scalar = Jet::constant(n, K - 2, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            cf.scalar += inv2[static_cast<size_t>(j * n + l)] * cf.ric[static_cast<size_t>(j * n + l)];

    cf.einstein.resize(sq(n));
    cf.schouten.resize(sq(n));
    const double c_s = 1.0 / (2.0 * (n - 1));
    for (size_t t = 0; t < sq(n); ++t) {
        cf.einstein[t] = cf.ric[t] - 0.5 * (cf.scalar * g2[t]);
        cf.schouten[t] = (cf.ric[t] - c_s * (cf.scalar * g2[t])) * (1.0 / (n - 2));
    }
    cf.schouten_trace = cf.scalar * c_s;
    return cf;
}

std::vector<Jet> covariant_hessian(const CurvatureFrame& cf, const Jet& f) {
    const int n = cf.dim();
    const int m = std::min(f.order(), cf.order()) - 2;
    require_order(m + 2, 2, "covariant Hessian");

    std::vector<Jet> df(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) df[static_cast<size_t>(k)] = f.derivative(k).truncated(m);

    std::vector<Jet> h(sq(n));
    for (int u = 0; u < n; ++u)
        for (int v = u; v < n; ++v) {
            Jet acc = f.derivative(u).derivative(v).truncated(m);
            for (int k = 0; k < n; ++k)
                acc -= cf.gamma_at(k, u, v).truncated(m) * df[static_cast<size_t>(k)];
            h[static_cast<size_t>(u * n + v)] = acc;
            if (u != v) h[static_cast<size_t>(v * n + u)] = std::move(acc);
        }
    return h;
}

Jet laplace_beltrami(const CurvatureFrame& cf, const Jet& f) {
    const int n = cf.dim();
    std::vector<Jet> h = covariant_hessian(cf, f);
    const int m = h[0].order();
    Jet acc = Jet::constant(n, m, 0.0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            acc += cf.metric.inv_at(u, v).truncated(m) * h[static_cast<size_t>(u * n + v)];
    return acc;
}

std::vector<Jet> cov_deriv_2tensor(const CurvatureFrame& cf, const std::vector<Jet>& T) {
    const int n = cf.dim();
    if (T.size() != sq(n)) fail(ErrorKind::domain, "cov_deriv_2tensor: expected dim*dim entries");
    const int o = std::min(T[0].order(), cf.order()) - 1;
    require_order(o + 1, 1, "covariant derivative");

    std::vector<Jet> t1(sq(n));
    for (size_t k = 0; k < t1.size(); ++k) t1[k] = T[k].truncated(o);

    std::vector<Jet> out(static_cast<size_t>(n) * sq(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int v = 0; v < n; ++v) {
                Jet acc = T[static_cast<size_t>(b * n + v)].derivative(a).truncated(o);
                for (int k = 0; k < n; ++k) {
                    acc -= cf.gamma_at(k, a, b).truncated(o) * t1[static_cast<size_t>(k * n + v)];
                    acc -= cf.gamma_at(k, a, v).truncated(o) * t1[static_cast<size_t>(b * n + k)];
                }
                out[static_cast<size_t>((a * n + b) * n + v)] = std::move(acc);
            }
    return out;
}

std::vector<Jet> tensor_laplacian(const CurvatureFrame& cf, const std::vector<Jet>& T) {
    const int n = cf.dim();
    const int o2 = std::min(T.empty() ? -1 : T[0].order(), cf.order()) - 2;
    require_order(o2 + 2, 2, "tensor Laplacian");
    std::vector<Jet> ct = cov_deriv_2tensor(cf, T); // order o2 + 1

    std::vector<Jet> ct2(ct.size());
    for (size_t k = 0; k < ct.size(); ++k) ct2[k] = ct[k].truncated(o2);
    auto at = [&](int a, int b, int v) -> const Jet& {
        return ct2[static_cast<size_t>((a * n + b) * n + v)];
    };

    std::vector<Jet> out(sq(n));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            Jet acc = Jet::constant(n, o2, 0.0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Jet term = ct[static_cast<size_t>((b * n + u) * n + v)].derivative(a).truncated(o2);
                    for (int k = 0; k < n; ++k) {
                        const Jet gk_ab = cf.gamma_at(k, a, b).truncated(o2);
                        term -= gk_ab * at(k, u, v);
                        term -= cf.gamma_at(k, a, u).truncated(o2) * at(b, k, v);
                        term -= cf.gamma_at(k, a, v).truncated(o2) * at(b, u, k);
                    }
                    acc += cf.metric.inv_at(a, b).truncated(o2) * term;
                }
            out[static_cast<size_t>(u * n + v)] = std::move(acc);
        }
    return out;
}

std::vector<Jet> divergence_2tensor(const CurvatureFrame& cf, const std::vector<Jet>& T) {
    const int n = cf.dim();
    std::vector<Jet> ct = cov_deriv_2tensor(cf, T);
    const int o = ct[0].order();
    std::vector<Jet> out(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
        Jet acc = Jet::constant(n, o, 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                acc += cf.metric.inv_at(a, b).truncated(o) *
                       ct[static_cast<size_t>((a * n + b) * n + v)];
        out[static_cast<size_t>(v)] = std::move(acc);
    }
    return out;
}

Jet trace_with_inverse(const CurvatureFrame& cf, const std::vector<Jet>& T) {
    const int n = cf.dim();
    const int m = std::min(T[0].order(), cf.order());
    Jet acc = Jet::constant(n, m, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            acc += cf.metric.inv_at(i, j).truncated(m) * T[static_cast<size_t>(i * n + j)].truncated(m);
    return acc;
}

Jet norm2_with_inverse(const CurvatureFrame& cf, const std::vector<Jet>& T) {
    const int n = cf.dim();
    const int m = std::min(T[0].order(), cf.order());
    // Raise one index first: n^3 products instead of n^4.
    std::vector<Jet> up(sq(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet acc = Jet::constant(n, m, 0.0);
            for (int a = 0; a < n; ++a)
                acc += cf.metric.inv_at(i, a).truncated(m) *
                       T[static_cast<size_t>(a * n + j)].truncated(m);
            up[static_cast<size_t>(i * n + j)] = std::move(acc);
        }
    Jet acc = Jet::constant(n, m, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet upper = Jet::constant(n, m, 0.0);
            for (int b = 0; b < n; ++b)
                upper += cf.metric.inv_at(j, b).truncated(m) *
                         up[static_cast<size_t>(i * n + b)];
            acc += upper * T[static_cast<size_t>(i * n + j)].truncated(m);
        }
    return acc;
}

double tensor_scale(const std::vector<Jet>& T) {
    double s = 0.0;
    for (const Jet& j : T) s = std::max(s, std::abs(j.value()));
    return s;
}

} // namespace aecurv
