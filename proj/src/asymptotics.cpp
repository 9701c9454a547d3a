#include "aecurv/asymptotics.hpp"

#include "aecurv/errors.hpp"
#include "aecurv/quadrature.hpp"
#include "aecurv/sampling.hpp"
#include "aecurv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aecurv {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

std::string point_string(const std::vector<double>& x) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ')';
    return os.str();
}

double radius_of(const std::vector<double>& x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::sqrt(r2);
}

// Slope and its standard error for y vs x by least squares.
void fit_line(const std::vector<double>& x, const std::vector<double>& y, double& slope,
              double& stderr_slope) {
    const size_t m = x.size();
    double xm = 0, ym = 0;
    for (size_t i = 0; i < m; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(m);
    ym /= static_cast<double>(m);
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    slope = sxy / sxx;
    double rss = 0;
    for (size_t i = 0; i < m; ++i) {
        double e = y[i] - ym - slope * (x[i] - xm);
        rss += e * e;
    }
    stderr_slope = m > 2 ? std::sqrt(rss / (static_cast<double>(m) - 2.0) / sxx) : 0.0;
}

} // namespace

AnnulusGrid build_annulus_grid(int dim, double r0, int annuli, int points,
                               std::uint64_t seed) {
    if (annuli < 1 || points < 1) fail(ErrorKind::config, "annulus grid: bad sizes");
    AnnulusGrid grid;
    grid.dim = dim;
    grid.r0 = r0;
    grid.seed = seed;
    for (int k = 0; k < annuli; ++k)
        grid.samples.push_back(annulus_points(dim, r0 * std::pow(2.0, k), points,
                                              seed + 131ull * static_cast<std::uint64_t>(k)));
    return grid;
}

double weighted_norm(const FieldSampler& u, double p, double delta,
                     const AnnulusGrid& grid) {
    if (!(p > 1.0)) fail(ErrorKind::config, "weighted norm needs p in (1, inf]");
    const int n = grid.dim;
    const bool sup_norm = std::isinf(p);
    const double power = sup_norm ? 0.0 : delta + static_cast<double>(n) / p;

    double sup = 0.0, integral = 0.0;
    for (const auto& annulus : grid.samples) {
        const double inv_count = 1.0 / static_cast<double>(annulus.size());
        for (const auto& x : annulus) {
            double val = u(x);
            if (!std::isfinite(val))
                fail(ErrorKind::numeric, "non-finite field sample at " + point_string(x));
            double r = radius_of(x);
            double sigma = std::sqrt(1.0 + r * r);
            if (sup_norm) {
                sup = std::max(sup, std::abs(val) * std::pow(sigma, -delta));
            } else {
                double weighted = std::abs(val) * std::pow(sigma, -power);
                // Importance weight for log-uniform radius, uniform direction.
                double w = sphere_area(n) * kLn2 * std::pow(r, n);
                integral += std::pow(weighted, p) * w * inv_count;
            }
        }
    }
    return sup_norm ? sup : std::pow(integral, 1.0 / p);
}

DecayReport estimate_decay(const std::string& name, const FieldSampler& u,
                           const AnnulusGrid& grid) {
    if (grid.samples.size() < 4)
        fail(ErrorKind::config, "decay estimate needs at least 4 annuli");
    DecayReport report;
    report.field = name;
    report.seed = grid.seed;

    for (size_t k = 0; k < grid.samples.size(); ++k) {
        double sup = 0.0;
        for (const auto& x : grid.samples[k]) {
            double val = u(x);
            if (!std::isfinite(val))
                fail(ErrorKind::numeric, "non-finite field sample at " + point_string(x));
            sup = std::max(sup, std::abs(val));
        }
        report.annulus_radii.push_back(grid.r0 * std::pow(2.0, static_cast<double>(k) + 0.5));
        report.sup_values.push_back(sup);
    }

    std::vector<double> lx, ly;
    for (size_t k = 0; k < report.sup_values.size(); ++k)
        if (report.sup_values[k] > 1e-300) {
            lx.push_back(std::log(report.annulus_radii[k]));
            ly.push_back(std::log(report.sup_values[k]));
        }
    if (lx.size() < 2) {
        report.degenerate = true;
        report.exponent = std::numeric_limits<double>::infinity();
        return report;
    }
    double slope = 0, band = 0;
    fit_line(lx, ly, slope, band);
    report.exponent = -slope;
    report.band = band;
    return report;
}

TrialFunction radial_bump(double center, double width) {
    TrialFunction t;
    t.value = [center, width](const std::vector<double>& x) {
        double s = (radius_of(x) - center) / width;
        double q = 1.0 - s * s;
        return q > 0.0 ? q * q : 0.0;
    };
    t.gradient = [center, width](const std::vector<double>& x) {
        double r = radius_of(x);
        std::vector<double> g(x.size(), 0.0);
        double s = (r - center) / width;
        double q = 1.0 - s * s;
        if (q <= 0.0 || r < 1e-300) return g;
        double dq_dr = 2.0 * q * (-2.0 * s) / width;
        for (size_t i = 0; i < x.size(); ++i) g[i] = dq_dr * x[i] / r;
        return g;
    };
    return t;
}

TrialFunction trial_from_expr(const ExprPtr& e, const std::map<std::string, double>& params) {
    TrialFunction t;
    t.value = [e, params](const std::vector<double>& x) {
        return eval_jet(e, x, 0, params).value();
    };
    t.gradient = [e, params](const std::vector<double>& x) {
        Jet j = eval_jet(e, x, 1, params);
        std::vector<double> g(x.size());
        for (size_t i = 0; i < x.size(); ++i) g[i] = j.derivative(static_cast<int>(i)).value();
        return g;
    };
    return t;
}

double yamabe_quotient(const MetricSpec& spec, const TrialFunction& u,
                       const AnnulusGrid& grid) {
    const int n = spec.dim;
    if (grid.dim != n) fail(ErrorKind::config, "grid dimension mismatch");
    const double a_n = 4.0 * (n - 1.0) / (n - 2.0);
    const double q_exp = 2.0 * n / (n - 2.0);

    double numerator = 0.0, denom_int = 0.0;
    for (const auto& annulus : grid.samples) {
        const double inv_count = 1.0 / static_cast<double>(annulus.size());
        for (const auto& x : annulus) {
            double uval = u.value(x);
            std::vector<double> du = u.gradient(x);
            bool zero = uval == 0.0;
            for (double d : du) zero = zero && d == 0.0;
            if (zero) continue;

            CurvatureFrame cf = curvature_frame(metric_frame(spec, x, 2));
            double grad2 = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    grad2 += cf.metric.inv_at(i, j).value() * du[static_cast<size_t>(i)] *
                             du[static_cast<size_t>(j)];
            double vol = cf.metric.sqrt_det.value();
            double r = radius_of(x);
            double w = sphere_area(n) * kLn2 * std::pow(r, n) * inv_count;

            numerator += (a_n * grad2 + cf.scalar.value() * uval * uval) * vol * w;
            denom_int += std::pow(std::abs(uval), q_exp) * vol * w;
        }
    }
    if (denom_int <= 0.0)
        fail(ErrorKind::config, "trial function vanishes on the sample grid");
    return numerator / std::pow(denom_int, 2.0 / q_exp);
}

double yamabe_probe(const MetricSpec& spec, const AnnulusGrid& grid) {
    const double r_lo = grid.r0;
    const double r_hi = grid.r0 * std::pow(2.0, static_cast<double>(grid.samples.size()));
    double best = std::numeric_limits<double>::infinity();
    for (double c_frac : {0.25, 0.45, 0.65}) {
        for (double w_frac : {0.15, 0.3}) {
            double c = r_lo + c_frac * (r_hi - r_lo);
            double w = std::max(w_frac * (r_hi - r_lo), 1e-6);
            // Keep the bump's support inside the gridded annuli.
            if (c - w < r_lo || c + w > r_hi) continue;
            best = std::min(best, yamabe_quotient(spec, radial_bump(c, w), grid));
        }
    }
    if (!std::isfinite(best)) fail(ErrorKind::config, "no admissible bump fits the grid");
    return best;
}

RadialProfile radial_profile(const MetricSpec& spec, double r) {
    const int n = spec.dim;
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    x[0] = r;
    EvalContext ctx(x, 1, spec.params);
    Jet g11 = ctx.eval(spec.component(0, 0));
    Jet g22 = ctx.eval(spec.component(1, 1));
    RadialProfile p;
    p.a = g22.value();
    p.b = g11.value() - p.a;
    p.da = g22.derivative(0).value();
    p.db = g11.derivative(0).value() - p.da;
    return p;
}

namespace {

// Coefficients of f_ss + c1 f_s - c0 f = 0 in s = ln r (derived from
// Delta_g (f(r) x_i / r) = 0 for g = a delta + b x x^T / r^2; see docs).
void ode_coeffs(const MetricSpec& spec, int n, double r, double& c1, double& c0) {
    RadialProfile p = radial_profile(spec, r);
    if (!(p.a > 0.0) || !(p.a + p.b > 0.0))
        fail(ErrorKind::validation, "radial metric is not positive at r = " + std::to_string(r));
    c1 = (n - 2) + r * (n - 1) * p.da / (2.0 * p.a) - r * (p.da + p.db) / (2.0 * (p.a + p.b));
    c0 = (n - 1) * (p.a + p.b) / p.a;
}

void check_spherical_symmetry(const MetricSpec& spec) {
    const int n = spec.dim;
    for (int k = 0; k < 4; ++k) {
        auto pts = annulus_points(n, spec.inner_radius * std::pow(2.0, k), 4,
                                  911 + static_cast<std::uint64_t>(k));
        for (const auto& x : pts) {
            std::vector<double> g = spec.evaluate(x);
            double r = radius_of(x);
            std::vector<double> w(x.size());
            for (size_t i = 0; i < x.size(); ++i) w[i] = x[i] / r;
            // Radial-radial and one tangential component fix (a, b).
            double s1 = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    s1 += g[static_cast<size_t>(i * n + j)] * w[static_cast<size_t>(i)] *
                          w[static_cast<size_t>(j)];
            // Tangent vector by Gram-Schmidt from the least-aligned axis.
            int axis = 0;
            for (int i = 1; i < n; ++i)
                if (std::abs(w[static_cast<size_t>(i)]) < std::abs(w[static_cast<size_t>(axis)]))
                    axis = i;
            std::vector<double> t(x.size(), 0.0);
            t[static_cast<size_t>(axis)] = 1.0;
            for (size_t i = 0; i < t.size(); ++i)
                t[i] -= w[static_cast<size_t>(axis)] * w[i];
            double tn = 0.0;
            for (double v : t) tn += v * v;
            tn = std::sqrt(tn);
            for (double& v : t) v /= tn;
            double a_t = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a_t += g[static_cast<size_t>(i * n + j)] * t[static_cast<size_t>(i)] *
                           t[static_cast<size_t>(j)];
            double b_t = s1 - a_t;
            double scale = 0.0, resid = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double model = a_t * (i == j ? 1.0 : 0.0) +
                                   b_t * w[static_cast<size_t>(i)] * w[static_cast<size_t>(j)];
                    double entry = g[static_cast<size_t>(i * n + j)];
                    scale = std::max(scale, std::abs(entry));
                    resid = std::max(resid, std::abs(entry - model));
                }
            if (resid > 1e-8 * std::max(scale, 1.0))
                fail(ErrorKind::validation,
                     "metric is not spherically symmetric near " + point_string(x));
        }
    }
}

} // namespace

double HarmonicRadial::f_at(double r) const {
    const double s = std::log(r);
    if (s_grid.size() < 2 || s < s_grid.front() || s > s_grid.back())
        fail(ErrorKind::domain, "harmonic coordinate queried outside the solved range");
    const double h = s_grid[1] - s_grid[0];
    size_t k = std::min(static_cast<size_t>((s - s_grid.front()) / h), s_grid.size() - 2);
    double t = (s - s_grid[k]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    return h00 * f[k] + h10 * h * fs[k] + h01 * f[k + 1] + h11 * h * fs[k + 1];
}

double HarmonicRadial::df_at(double r) const {
    const double s = std::log(r);
    if (s_grid.size() < 2 || s < s_grid.front() || s > s_grid.back())
        fail(ErrorKind::domain, "harmonic coordinate queried outside the solved range");
    const double h = s_grid[1] - s_grid[0];
    size_t k = std::min(static_cast<size_t>((s - s_grid.front()) / h), s_grid.size() - 2);
    double t = (s - s_grid[k]) / h;
    double d00 = 6 * t * (t - 1) / h;
    double d10 = (3 * t - 1) * (t - 1);
    double d01 = -d00;
    double d11 = t * (3 * t - 2);
    double dfds = d00 * f[k] + d10 * fs[k] + d01 * f[k + 1] + d11 * fs[k + 1];
    return dfds / r;
}

HarmonicRadial harmonic_radial_coordinate(const MetricSpec& spec, double r_max) {
    const int n = spec.dim;
    if (!(r_max > 4.0 * spec.inner_radius))
        fail(ErrorKind::config, "r_max must exceed 4 * inner_radius");
    check_spherical_symmetry(spec);

    HarmonicRadial out;
    out.r0 = spec.inner_radius;
    out.r_max = r_max;

    const int steps = 16384;
    const double s0 = std::log(out.r0), s1 = std::log(r_max);
    const double h = (s1 - s0) / steps;

    out.s_grid.resize(static_cast<size_t>(steps) + 1);
    out.f.resize(out.s_grid.size());
    out.fs.resize(out.s_grid.size());

    // RK4 on (f, v), v = f_s, from the flat seed f = r.
    double fval = out.r0, v = out.r0;
    out.s_grid[0] = s0;
    out.f[0] = fval;
    out.fs[0] = v;
    auto rhs = [&](double s, double yf, double yv, double& df, double& dv) {
        double c1 = 0, c0 = 0;
        ode_coeffs(spec, n, std::exp(s), c1, c0);
        df = yv;
        dv = -c1 * yv + c0 * yf;
    };
    for (int k = 0; k < steps; ++k) {
        double s = s0 + k * h;
        double k1f, k1v, k2f, k2v, k3f, k3v, k4f, k4v;
        rhs(s, fval, v, k1f, k1v);
        rhs(s + 0.5 * h, fval + 0.5 * h * k1f, v + 0.5 * h * k1v, k2f, k2v);
        rhs(s + 0.5 * h, fval + 0.5 * h * k2f, v + 0.5 * h * k2v, k3f, k3v);
        rhs(s + h, fval + h * k3f, v + h * k3v, k4f, k4v);
        fval += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        out.s_grid[static_cast<size_t>(k) + 1] = s0 + (k + 1) * h;
        out.f[static_cast<size_t>(k) + 1] = fval;
        out.fs[static_cast<size_t>(k) + 1] = v;
    }

    // Normalize the leading coefficient by a linear fit f = c r + e over the
    // outermost decade; pinning f(r_max) = r_max instead would zero out f - r
    // at the boundary and corrupt the decay measurement.
    {
        std::vector<double> rs, vals;
        for (size_t k = 0; k < out.s_grid.size(); ++k) {
            double r = std::exp(out.s_grid[k]);
            if (r >= r_max / 10.0) {
                rs.push_back(r);
                vals.push_back(out.f[k]);
            }
        }
        double rm = 0, vm = 0;
        for (size_t i = 0; i < rs.size(); ++i) {
            rm += rs[i];
            vm += vals[i];
        }
        rm /= static_cast<double>(rs.size());
        vm /= static_cast<double>(rs.size());
        double sxx = 0, sxy = 0;
        for (size_t i = 0; i < rs.size(); ++i) {
            sxx += (rs[i] - rm) * (rs[i] - rm);
            sxy += (rs[i] - rm) * (vals[i] - vm);
        }
        double c = sxy / sxx;
        if (!(std::abs(c) > 1e-300)) fail(ErrorKind::numeric, "harmonic solve degenerated");
        out.norm_c = c;
        for (size_t k = 0; k < out.f.size(); ++k) {
            out.f[k] /= c;
            out.fs[k] /= c;
        }
    }

    // Decay of f(r) - r: per-dyadic-annulus sup over the dense grid.
    {
        std::vector<double> lx, ly;
        int annuli = static_cast<int>(std::floor(std::log2(r_max / out.r0)));
        for (int k = 0; k < annuli; ++k) {
            double lo = out.r0 * std::pow(2.0, k), hi = 2.0 * lo;
            double sup = 0.0;
            for (size_t i = 0; i < out.s_grid.size(); ++i) {
                double r = std::exp(out.s_grid[i]);
                if (r >= lo && r < hi) sup = std::max(sup, std::abs(out.f[i] - r));
            }
            if (sup > 1e-12 * hi) {
                lx.push_back(std::log(lo * std::sqrt(2.0)));
                ly.push_back(std::log(sup));
            }
        }
        if (lx.size() < 3) {
            out.degenerate_decay = true;
            out.growth_exponent = -std::numeric_limits<double>::infinity();
        } else {
            double slope = 0, band = 0;
            fit_line(lx, ly, slope, band);
            out.growth_exponent = slope;
        }
    }

    // Residual Delta_g y at probe radii through the full tensor machinery,
    // relative to the size of the flat Laplacian's individual terms.
    {
        double worst = 0.0;
        const int probes = 50;
        for (int k = 0; k < probes; ++k) {
            double r = 2.0 * out.r0 *
                       std::pow(r_max / (8.0 * out.r0), static_cast<double>(k) / (probes - 1));
            double c1 = 0, c0 = 0;
            ode_coeffs(spec, n, r, c1, c0);
            double fr = out.f_at(r);
            double df = out.df_at(r);
            // f_ss from the ODE itself rather than a second interpolation.
            double fs_here = df * r;
            double fss = -c1 * fs_here + c0 * fr;
            double d2f = (fss - fs_here) / (r * r);

            std::vector<double> x(static_cast<size_t>(n), 0.0);
            x[0] = r;
            Jet sum = Jet::constant(n, 2, 0.0);
            for (int i = 0; i < n; ++i) {
                Jet xi = Jet::coordinate(n, 2, i, x[static_cast<size_t>(i)]);
                sum += xi * xi;
            }
            Jet rj = jet_sqrt(sum);
            const double derivs[3] = {fr, df, d2f};
            Jet fj = jet_compose(rj, derivs);
            Jet y = fj * Jet::coordinate(n, 2, 0, x[0]) * jet_reciprocal(rj);

            CurvatureFrame cf = curvature_frame(metric_frame(spec, x, 2));
            double resid = std::abs(laplace_beltrami(cf, y).value());
            double scale = std::abs(d2f) + (n - 1) * std::abs(df) / r +
                           (n - 1) * std::abs(fr) / (r * r);
            worst = std::max(worst, resid / std::max(scale, 1e-30));
        }
        out.ode_residual = worst;
    }
    return out;
}

} // namespace aecurv
