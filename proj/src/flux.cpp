#include "aecurv/flux.hpp"

#include "aecurv/errors.hpp"
#include "aecurv/fourth_order.hpp"
#include "aecurv/sampling.hpp"
#include "aecurv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace aecurv {

namespace {

size_t sq(int n) { return static_cast<size_t>(n) * static_cast<size_t>(n); }

// Runs the integrand at every node of every sphere. Node evaluations may run
// in parallel; results land in per-index slots and are reduced serially in
// index order, so outputs are byte-identical across thread counts.
FluxSeries sweep(std::string name, const MetricSpec& spec, const SphereQuadrature& quad,
                 const std::vector<double>& radii, Exec mode,
                 const std::function<double(const std::vector<double>&,
                                            const std::vector<double>&)>& integrand) {
    if (quad.dim != spec.dim) fail(ErrorKind::config, "quadrature dimension mismatch");
    if (radii.size() < 4) fail(ErrorKind::config, "flux sweep needs at least 4 radii");
    for (size_t k = 1; k < radii.size(); ++k)
        if (!(radii[k] > radii[k - 1]))
            fail(ErrorKind::config, "flux radii must be strictly increasing");

    FluxSeries series;
    series.functional = std::move(name);
    series.radii = radii;
    series.values.resize(radii.size(), 0.0);

    const size_t nodes = quad.nodes.size();
    std::vector<double> buffer(nodes);
    std::vector<std::string> errors(nodes);
    for (size_t kr = 0; kr < radii.size(); ++kr) {
        const double r = radii[kr];
        par_for(nodes, [&](size_t k) {
            const std::vector<double>& omega = quad.nodes[k];
            std::vector<double> x(omega.size());
            for (size_t i = 0; i < x.size(); ++i) x[i] = r * omega[i];
            try {
                buffer[k] = integrand(x, omega);
            } catch (const Error& e) {
                buffer[k] = 0.0;
                errors[k] = e.what();
            }
        }, mode);
        for (size_t k = 0; k < nodes; ++k)
            if (!errors[k].empty())
                fail(ErrorKind::domain,
                     "flux integrand failed at r = " + std::to_string(r) + ": " + errors[k]);
        double acc = 0.0;
        for (size_t k = 0; k < nodes; ++k) acc += quad.weights[k] * buffer[k];
        series.values[kr] = acc * std::pow(r, spec.dim - 1);
    }
    return series;
}

// Least-squares (F_inf, c) for fixed p; returns RMS residual.
double fit_for_p(const std::vector<double>& r, const std::vector<double>& f, double p,
                 double& f_inf, double& c) {
    const size_t k = r.size();
    double s1 = static_cast<double>(k), sb = 0, sbb = 0, sf = 0, sbf = 0;
    for (size_t i = 0; i < k; ++i) {
        double b = std::pow(r[i], -p);
        sb += b;
        sbb += b * b;
        sf += f[i];
        sbf += b * f[i];
    }
    double det = s1 * sbb - sb * sb;
    if (std::abs(det) < 1e-300) {
        f_inf = sf / s1;
        c = 0.0;
    } else {
        f_inf = (sbb * sf - sb * sbf) / det;
        c = (s1 * sbf - sb * sf) / det;
    }
    double rss = 0.0;
    for (size_t i = 0; i < k; ++i) {
        double e = f_inf + c * std::pow(r[i], -p) - f[i];
        rss += e * e;
    }
    return std::sqrt(rss / static_cast<double>(k));
}

} // namespace

std::vector<double> dyadic_radii(double r0, int k_lo, int k_hi) {
    if (!(r0 > 0.0) || k_hi < k_lo) fail(ErrorKind::config, "bad dyadic radius range");
    std::vector<double> r;
    for (int k = k_lo; k <= k_hi; ++k) r.push_back(r0 * std::pow(2.0, k));
    return r;
}

void extrapolate(FluxSeries& series, int dim) {
    if (series.radii.size() < 4)
        fail(ErrorKind::config, "extrapolation needs at least 4 radii");
    const double p_lo = 0.1, p_hi = 2.0 * dim;

    double best_p = p_lo, best_res = std::numeric_limits<double>::infinity();
    double f_inf = 0, c = 0;
    const int grid = 64;
    for (int i = 0; i <= grid; ++i) {
        double p = p_lo * std::pow(p_hi / p_lo, static_cast<double>(i) / grid);
        double fi, cc;
        double res = fit_for_p(series.radii, series.values, p, fi, cc);
        if (res < best_res) {
            best_res = res;
            best_p = p;
        }
    }
    // Golden-section refinement around the best grid cell.
    double a = best_p / std::pow(p_hi / p_lo, 1.0 / grid);
    double b = best_p * std::pow(p_hi / p_lo, 1.0 / grid);
    a = std::max(a, p_lo);
    b = std::min(b, p_hi);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double fi, cc;
    double r1 = fit_for_p(series.radii, series.values, x1, fi, cc);
    double r2 = fit_for_p(series.radii, series.values, x2, fi, cc);
    for (int it = 0; it < 60; ++it) {
        if (r1 < r2) {
            b = x2;
            x2 = x1;
            r2 = r1;
            x1 = b - gr * (b - a);
            r1 = fit_for_p(series.radii, series.values, x1, fi, cc);
        } else {
            a = x1;
            x1 = x2;
            r1 = r2;
            x2 = a + gr * (b - a);
            r2 = fit_for_p(series.radii, series.values, x2, fi, cc);
        }
    }
    best_p = 0.5 * (a + b);
    best_res = fit_for_p(series.radii, series.values, best_p, f_inf, c);

    series.f_inf = f_inf;
    series.coeff = c;
    series.exponent = best_p;
    series.residual = best_res;

    // A convergent tail has shrinking consecutive differences; three growing
    // gaps in a row above the noise floor mean the series is running away.
    double scale = 0.0;
    for (double v : series.values) scale = std::max(scale, std::abs(v));
    const size_t k = series.values.size();
    if (k >= 4) {
        double d1 = std::abs(series.values[k - 3] - series.values[k - 4]);
        double d2 = std::abs(series.values[k - 2] - series.values[k - 3]);
        double d3 = std::abs(series.values[k - 1] - series.values[k - 2]);
        if (d3 > 1e-12 * std::max(scale, 1.0) && d3 >= d2 && d2 >= d1) {
            series.diverged = true;
            series.warnings.push_back("tail differences do not shrink; limit untrusted");
        }
    }
}

FluxSeries adm_energy(const MetricSpec& spec, const SphereQuadrature& quad,
                      const std::vector<double>& radii, Exec mode) {
    const int n = spec.dim;
    const double pref = 1.0 / (2.0 * (n - 1) * sphere_area(n));
    FluxSeries s = sweep(
        "adm_energy", spec, quad, radii, mode,
        [&](const std::vector<double>& x, const std::vector<double>& omega) {
            EvalContext ctx(x, 1, spec.params);
            std::vector<Jet> g(sq(n));
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    Jet v = ctx.eval(spec.component(i, j));
                    g[static_cast<size_t>(i * n + j)] = v;
                    if (i != j) g[static_cast<size_t>(j * n + i)] = std::move(v);
                }
            double f = 0.0;
            for (int j = 0; j < n; ++j) {
                double term = 0.0;
                for (int i = 0; i < n; ++i) {
                    term += g[static_cast<size_t>(i * n + j)].derivative(i).value();
                    term -= g[static_cast<size_t>(i * n + i)].derivative(j).value();
                }
                f += term * omega[static_cast<size_t>(j)];
            }
            return f;
        });
    for (double& v : s.values) v *= pref;
    extrapolate(s, n);
    return s;
}

FluxSeries adm_energy_einstein(const MetricSpec& spec, const SphereQuadrature& quad,
                               const std::vector<double>& radii, Exec mode) {
    const int n = spec.dim;
    const double pref = -1.0 / ((n - 1.0) * (n - 2.0) * sphere_area(n));
    FluxSeries s = sweep(
        "adm_energy_einstein", spec, quad, radii, mode,
        [&](const std::vector<double>& x, const std::vector<double>& omega) {
            CurvatureFrame cf = curvature_frame(metric_frame(spec, x, 2));
            double f = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    f += cf.einstein[static_cast<size_t>(i * n + j)].value() *
                         x[static_cast<size_t>(i)] * omega[static_cast<size_t>(j)];
            return f;
        });
    for (double& v : s.values) v *= pref;
    extrapolate(s, n);
    return s;
}

FluxSeries fourth_order_energy(const MetricSpec& spec, const SphereQuadrature& quad,
                               const std::vector<double>& radii, Exec mode) {
    const int n = spec.dim;
    FluxSeries s = sweep(
        "fourth_order_energy", spec, quad, radii, mode,
        [&](const std::vector<double>& x, const std::vector<double>& omega) {
            EvalContext ctx(x, 3, spec.params);
            std::vector<Jet> g(sq(n));
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    Jet v = ctx.eval(spec.component(i, j));
                    g[static_cast<size_t>(i * n + j)] = v;
                    if (i != j) g[static_cast<size_t>(j * n + i)] = std::move(v);
                }
            std::vector<int> alpha(static_cast<size_t>(n));
            double f = 0.0;
            for (int j = 0; j < n; ++j) {
                double term = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int i = 0; i < n; ++i) {
                        std::fill(alpha.begin(), alpha.end(), 0);
                        alpha[static_cast<size_t>(j)] += 1;
                        alpha[static_cast<size_t>(i)] += 2;
                        term += g[static_cast<size_t>(a * n + a)].partial(alpha);
                        std::fill(alpha.begin(), alpha.end(), 0);
                        alpha[static_cast<size_t>(j)] += 1;
                        alpha[static_cast<size_t>(a)] += 1;
                        alpha[static_cast<size_t>(i)] += 1;
                        term -= g[static_cast<size_t>(a * n + i)].partial(alpha);
                    }
                f += term * omega[static_cast<size_t>(j)];
            }
            return f;
        });
    extrapolate(s, n);
    return s;
}

FluxSeries gj_flux(const MetricSpec& spec, const SphereQuadrature& quad,
                   const std::vector<double>& radii, Exec mode) {
    const int n = spec.dim;
    FluxSeries s = sweep(
        "gj_flux", spec, quad, radii, mode,
        [&](const std::vector<double>& x, const std::vector<double>& omega) {
            FourthOrderFrame fo =
                fourth_order_frame(curvature_frame(metric_frame(spec, x, 4)));
            double f = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    f += fo.gj[static_cast<size_t>(i * n + j)].value() *
                         x[static_cast<size_t>(i)] * omega[static_cast<size_t>(j)];
            return f;
        });
    extrapolate(s, n);
    return s;
}

FluxSeries charge(const MetricSpec& spec, const ExprPtr& v, const SphereQuadrature& quad,
                  const std::vector<double>& radii, Exec mode) {
    const int n = spec.dim;
    FluxSeries s = sweep(
        "charge", spec, quad, radii, mode,
        [&](const std::vector<double>& x, const std::vector<double>& omega) {
            EvalContext ctx(x, 3, spec.params);
            std::vector<Jet> h(sq(n));
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    Jet val = ctx.eval(spec.component(i, j));
                    if (i == j) val -= 1.0;
                    h[static_cast<size_t>(i * n + j)] = val;
                    if (i != j) h[static_cast<size_t>(j * n + i)] = std::move(val);
                }
            Jet vj = eval_jet(v, x, 3, spec.params);
            std::vector<Jet> u = boundary_one_form(h, vj);
            double f = 0.0;
            for (int j = 0; j < n; ++j)
                f += u[static_cast<size_t>(j)].value() * omega[static_cast<size_t>(j)];
            return f;
        });

    // Kernel probe: D*Q_delta V should vanish for admissible V.
    double worst = 0.0, vscale = 1e-30;
    for (const auto& p : shell_points(n, 2.0 * spec.inner_radius, 8.0 * spec.inner_radius, 8, 17)) {
        Jet vj = eval_jet(v, p, 4, spec.params);
        vscale = std::max(vscale, std::abs(vj.value()));
        for (const Jet& entry : adjoint_dq_flat(vj))
            worst = std::max(worst, std::abs(entry.value()));
    }
    if (worst > 1e-8 * std::max(1.0, vscale)) {
        std::ostringstream msg;
        msg << "V is not in the kernel N_0: max |D*Q_delta V| = " << worst;
        s.warnings.push_back(msg.str());
    }
    extrapolate(s, n);
    return s;
}

std::string flux_series_csv(std::span<const FluxSeries> series) {
    std::ostringstream out;
    out.precision(17);
    out << "functional,radius,value,fit\n";
    for (const FluxSeries& s : series)
        for (size_t k = 0; k < s.radii.size(); ++k) {
            double fit = s.f_inf + s.coeff * std::pow(s.radii[k], -s.exponent);
            out << s.functional << ',' << s.radii[k] << ',' << s.values[k] << ',' << fit
                << '\n';
        }
    return out.str();
}

} // namespace aecurv
