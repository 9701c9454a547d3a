// aecurv: batch CLI over the curvature library. Every command resolves a
// metric (catalog name or JSON file), runs one batch computation, and emits
// a single JSON or CSV document; nothing is printed until the run finished.
//
// Exit codes: 0 success, 1 tolerance breach, 2 configuration error,
// 3 domain/order/numeric error.

#include "aecurv/asymptotics.hpp"
#include "aecurv/errors.hpp"
#include "aecurv/flux.hpp"
#include "aecurv/fourth_order.hpp"
#include "aecurv/metric.hpp"
#include "aecurv/parallel.hpp"
#include "aecurv/quadrature.hpp"
#include "aecurv/sampling.hpp"
#include "aecurv/tensor.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::ordered_json;
using namespace aecurv;

namespace {

struct Options {
    std::string command;
    std::string metric_name;
    std::string metric_file;
    std::vector<std::string> param_kv;
    std::string points_file;
    std::vector<std::string> point_args;
    std::string radii_arg;
    int quad_degree = 0; // 0 = per-dimension default
    int order = 4;
    std::optional<double> tol;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "json";

    std::string functional = "all"; // flux
    std::string charge_v = "1";     // flux charge
    std::string field = "metric";   // decay
    double r0 = 0;                  // decay fit window start, 0 = inner radius
    int annuli = 8;                 // decay
    int points_per_annulus = 64;    // decay / check / linearize counts
    int check_points = 100;
    int lin_points = 10;
    double slope_min = 1.9;
    bool corrupt_fixture = false;
    bool serial = false;
};

// Exactness degree 2m-1. The G_J sweep builds a full fourth-order frame per
// node, so the default degree drops with dimension; rotation-invariant
// integrands (all catalog metrics) are exact at any degree.
int default_quad_degree(int dim) {
    switch (dim) {
        case 3: return 10;
        case 4: return 8;
        case 5: return 6;
        case 6: return 4;
        default: return 3;
    }
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& kv) {
    std::map<std::string, std::string> out;
    for (const std::string& s : kv) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(ErrorKind::config, "--param expects k=v, got '" + s + "'");
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

MetricSpec resolve_metric(const Options& opt) {
    if (!opt.metric_name.empty() && !opt.metric_file.empty())
        fail(ErrorKind::config, "--metric and --metric-file are mutually exclusive");
    auto params = parse_params(opt.param_kv);
    MetricSpec spec;
    if (!opt.metric_name.empty()) {
        spec = catalog_metric(opt.metric_name, params);
    } else if (!opt.metric_file.empty()) {
        spec = load_metric_file(opt.metric_file);
        for (const auto& [k, v] : params) {
            try {
                spec.params[k] = std::stod(v);
            } catch (const std::exception&) {
                fail(ErrorKind::config, "parameter '" + k + "' must be numeric for metric files");
            }
        }
    } else {
        fail(ErrorKind::config, "one of --metric or --metric-file is required");
    }
    MetricValidation val = validate_metric(spec, opt.seed);
    for (const std::string& w : val.warnings) std::cerr << "warning: " << w << "\n";
    if (!val.positive_definite)
        fail(ErrorKind::validation, "metric failed validation: " + val.warnings.back());
    return spec;
}

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> pt;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        try {
            pt.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(ErrorKind::config, "bad coordinate '" + item + "' in point '" + text + "'");
        }
    }
    return pt;
}

std::vector<std::vector<double>> load_points(const Options& opt, const MetricSpec& spec) {
    std::vector<std::vector<double>> pts;
    for (const std::string& s : opt.point_args) pts.push_back(parse_point(s));
    if (!opt.points_file.empty()) {
        std::ifstream in(opt.points_file);
        if (!in) fail(ErrorKind::config, "cannot open points file '" + opt.points_file + "'");
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            for (char& c : line)
                if (c == ',' || c == '\t') c = ' ';
            std::istringstream ls(line);
            std::vector<double> pt;
            double x;
            while (ls >> x) pt.push_back(x);
            if (!pt.empty()) pts.push_back(std::move(pt));
        }
    }
    if (pts.empty()) fail(ErrorKind::config, "no evaluation points given (--point or --points)");
    for (const auto& pt : pts) {
        if (static_cast<int>(pt.size()) != spec.dim)
            fail(ErrorKind::config, "point has " + std::to_string(pt.size()) +
                                        " coordinates, metric dimension is " +
                                        std::to_string(spec.dim));
        double r2 = 0;
        for (double c : pt) r2 += c * c;
        if (std::sqrt(r2) < spec.inner_radius * (1.0 - 1e-12))
            fail(ErrorKind::domain, "point lies inside the chart inner radius " +
                                        std::to_string(spec.inner_radius));
    }
    return pts;
}

std::vector<double> resolve_radii(const Options& opt, const MetricSpec& spec) {
    if (opt.radii_arg.empty())
        return dyadic_radii(std::max(1.0, spec.inner_radius));
    auto comma = opt.radii_arg.find(',');
    if (comma == std::string::npos)
        fail(ErrorKind::config, "--radii expects R0,K");
    double r0 = 0;
    int k = 0;
    try {
        r0 = std::stod(opt.radii_arg.substr(0, comma));
        k = std::stoi(opt.radii_arg.substr(comma + 1));
    } catch (const std::exception&) {
        fail(ErrorKind::config, "--radii expects R0,K, got '" + opt.radii_arg + "'");
    }
    if (r0 < spec.inner_radius || k < 4)
        fail(ErrorKind::config, "--radii needs R0 >= inner radius and K >= 4");
    return dyadic_radii(r0, 0, k - 1);
}

ordered_json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

ordered_json matrix_json(const std::vector<Jet>& m, int n) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < n; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < n; ++j) row.push_back(m[static_cast<size_t>(i * n + j)].value());
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json config_json(const Options& opt, const MetricSpec& spec) {
    ordered_json cfg;
    cfg["metric"] = spec.name;
    cfg["dim"] = spec.dim;
    cfg["params"] = ordered_json::object();
    for (const auto& [k, v] : spec.params) cfg["params"][k] = v;
    cfg["inner_radius"] = spec.inner_radius;
    cfg["seed"] = opt.seed;
    cfg["order"] = opt.order;
    cfg["threads"] = opt.serial ? 1 : max_threads();
    return cfg;
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path);
    if (!out) fail(ErrorKind::config, "cannot write to '" + opt.out_path + "'");
    out << text;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

// ---------------------------------------------------------------- eval ----

int cmd_eval(const Options& opt) {
    if (opt.order < 4) fail(ErrorKind::order, "Q requires derivative order 4");
    MetricSpec spec = resolve_metric(opt);
    auto pts = load_points(opt, spec);
    const int n = spec.dim;

    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "eval";
    doc["config"] = config_json(opt, spec);
    ordered_json out_pts = ordered_json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "point_index,quantity,i,j,value\n";

    for (size_t pi = 0; pi < pts.size(); ++pi) {
        CurvatureFrame cf = curvature_frame(metric_frame(spec, pts[pi], opt.order));

        ordered_json rec;
        rec["point"] = pts[pi];
        rec["g"] = matrix_json(cf.metric.g, n);
        rec["ric"] = matrix_json(cf.ric, n);
        rec["r"] = cf.scalar.value();
        rec["s"] = matrix_json(cf.schouten, n);

        auto csv_matrix = [&](const char* tag, const std::vector<Jet>& m) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    csv << pi << ',' << tag << ',' << i << ',' << j << ','
                        << m[static_cast<size_t>(i * n + j)].value() << '\n';
        };
        csv_matrix("g", cf.metric.g);
        csv_matrix("ric", cf.ric);
        csv << pi << ",r,," << ',' << cf.scalar.value() << '\n';
        csv_matrix("s", cf.schouten);

        FourthOrderFrame fo = fourth_order_frame(cf);
        rec["b"] = matrix_json(fo.b, n);
        rec["t"] = matrix_json(fo.t, n);
        rec["q"] = fo.q.value();
        rec["j"] = matrix_json(fo.j, n);
        rec["gj"] = matrix_json(fo.gj, n);
        if (opt.order >= 5) {
            std::vector<Jet> div = gj_divergence(cf, fo);
            ordered_json d = ordered_json::array();
            for (const Jet& jd : div) d.push_back(jd.value());
            rec["div_gj"] = std::move(d);
        }
        csv_matrix("b", fo.b);
        csv_matrix("t", fo.t);
        csv << pi << ",q,,," << fo.q.value() << '\n';
        csv_matrix("j", fo.j);
        csv_matrix("gj", fo.gj);
        out_pts.push_back(std::move(rec));
    }
    doc["points"] = std::move(out_pts);

    emit(opt, opt.format == "csv" ? csv.str() : doc.dump(2) + "\n");
    return 0;
}

// --------------------------------------------------------------- check ----

struct CheckRow {
    std::string name;
    double residual = 0.0; // worst relative residual over points
    double tolerance = 0.0;
    std::vector<double> worst_point;
};

int cmd_check(const Options& opt) {
    MetricSpec spec = resolve_metric(opt);
    const int n = spec.dim;
    const double r_lo = std::max(1.0, spec.inner_radius);
    auto pts = shell_points(n, r_lo, 8.0 * r_lo, opt.check_points, opt.seed);

    std::vector<CheckRow> rows(5);
    rows[0] = {"tr J - Q", 0.0, opt.tol.value_or(1e-10), {}};
    rows[1] = {"tr GJ - (4-n)Q/4", 0.0, opt.tol.value_or(1e-10), {}};
    rows[2] = {"tr T", 0.0, opt.tol.value_or(1e-10), {}};
    rows[3] = {"div GJ", 0.0, opt.tol.value_or(1e-8), {}};
    rows[4] = {"div G (Bianchi)", 0.0, opt.tol.value_or(1e-8), {}};

    struct PointResiduals {
        double v[5] = {0, 0, 0, 0, 0};
        std::string error;
    };
    std::vector<PointResiduals> res(pts.size());

    par_for(pts.size(), [&](size_t pi) {
        try {
            CurvatureFrame cf = curvature_frame(metric_frame(spec, pts[pi], 5));
            FourthOrderFrame fo = fourth_order_frame(cf);
            if (opt.corrupt_fixture)
                for (int i = 0; i < n; ++i)
                    fo.j[static_cast<size_t>(i * n + i)] += 1e-3 * (1.0 + tensor_scale(fo.j));

            const double floor = 1e-30;
            double q = fo.q.value();
            double jscale = std::max({std::abs(q), tensor_scale(fo.j), floor});
            res[pi].v[0] = std::abs(trace_with_inverse(cf, fo.j).value() - q) / jscale;

            double gj_scale = std::max({std::abs(q), tensor_scale(fo.gj), floor});
            double tr_gj = trace_with_inverse(cf, fo.gj).value();
            res[pi].v[1] = std::abs(tr_gj - (4.0 - n) * q / 4.0) / gj_scale;

            double t_scale = std::max(tensor_scale(fo.t), floor);
            res[pi].v[2] = std::abs(trace_with_inverse(cf, fo.t).value()) / t_scale;

            std::vector<Jet> div = gj_divergence(cf, fo);
            // G_J can vanish identically (conformally flat n = 4), leaving
            // grad G_J pure roundoff; grad J then carries the honest scale.
            double grad_scale =
                std::max({tensor_scale(cov_deriv_2tensor(cf, fo.gj)),
                          tensor_scale(cov_deriv_2tensor(cf, fo.j)), floor});
            double worst_div = 0;
            for (const Jet& d : div) worst_div = std::max(worst_div, std::abs(d.value()));
            res[pi].v[3] = worst_div / grad_scale;

            std::vector<Jet> div_g = divergence_2tensor(cf, cf.einstein);
            double ein_scale = std::max(tensor_scale(cov_deriv_2tensor(cf, cf.einstein)), floor);
            double worst_g = 0;
            for (const Jet& d : div_g) worst_g = std::max(worst_g, std::abs(d.value()));
            res[pi].v[4] = worst_g / ein_scale;
        } catch (const std::exception& e) {
            res[pi].error = e.what();
        }
    }, opt.serial ? Exec::serial : Exec::parallel);

    for (size_t pi = 0; pi < pts.size(); ++pi)
        if (!res[pi].error.empty()) throw Error(ErrorKind::domain, res[pi].error);

    for (size_t pi = 0; pi < pts.size(); ++pi)
        for (int k = 0; k < 5; ++k)
            if (res[pi].v[k] > rows[k].residual) {
                rows[k].residual = res[pi].v[k];
                rows[k].worst_point = pts[pi];
            }

    bool pass = true;
    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "check";
    doc["config"] = config_json(opt, spec);
    doc["config"]["points"] = opt.check_points;
    ordered_json jrows = ordered_json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "identity,max_relative_residual,tolerance,pass\n";
    for (const CheckRow& row : rows) {
        bool ok = row.residual <= row.tolerance;
        pass = pass && ok;
        ordered_json jr;
        jr["identity"] = row.name;
        jr["max_relative_residual"] = row.residual;
        jr["tolerance"] = row.tolerance;
        jr["pass"] = ok;
        if (!ok) jr["worst_point"] = row.worst_point;
        jrows.push_back(std::move(jr));
        csv << csv_escape(row.name) << ',' << row.residual << ',' << row.tolerance << ','
            << (ok ? "true" : "false") << '\n';
    }
    doc["identities"] = std::move(jrows);
    doc["pass"] = pass;

    emit(opt, opt.format == "csv" ? csv.str() : doc.dump(2) + "\n");
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------- flux ----

ordered_json series_json(const FluxSeries& s) {
    ordered_json j;
    j["functional"] = s.functional;
    j["radii"] = s.radii;
    j["values"] = s.values;
    j["f_inf"] = finite_or_null(s.f_inf);
    j["coeff"] = finite_or_null(s.coeff);
    j["exponent"] = finite_or_null(s.exponent);
    j["residual"] = finite_or_null(s.residual);
    j["diverged"] = s.diverged;
    j["warnings"] = s.warnings;
    return j;
}

int cmd_flux(const Options& opt) {
    MetricSpec spec = resolve_metric(opt);
    const int n = spec.dim;
    int degree = opt.quad_degree > 0 ? opt.quad_degree : default_quad_degree(n);
    SphereQuadrature quad = build_quadrature(n, degree);
    std::vector<double> radii = resolve_radii(opt, spec);
    Exec mode = opt.serial ? Exec::serial : Exec::parallel;

    const std::string& f = opt.functional;
    bool all = f == "all";
    std::vector<FluxSeries> series;
    if (all || f == "adm") series.push_back(adm_energy(spec, quad, radii, mode));
    if (all || f == "adm-einstein")
        series.push_back(adm_energy_einstein(spec, quad, radii, mode));
    if (all || f == "e4" || f == "energy-ratio")
        series.push_back(fourth_order_energy(spec, quad, radii, mode));
    if (all || f == "gj" || f == "energy-ratio") series.push_back(gj_flux(spec, quad, radii, mode));
    if (all || f == "charge") {
        ExprPtr v = parse_expr(opt.charge_v);
        series.push_back(charge(spec, v, quad, radii, mode));
    }
    if (series.empty())
        fail(ErrorKind::config,
             "unknown functional '" + f + "' (adm, adm-einstein, e4, gj, charge, energy-ratio, all)");

    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "flux";
    doc["config"] = config_json(opt, spec);
    doc["config"]["functional"] = f;
    doc["config"]["quad_degree"] = degree;
    doc["config"]["radii"] = radii;
    if (all || f == "charge") doc["config"]["charge_v"] = opt.charge_v;
    ordered_json jser = ordered_json::array();
    for (const FluxSeries& s : series) jser.push_back(series_json(s));
    doc["series"] = std::move(jser);

    int rc = 0;
    if (f == "energy-ratio" || all) {
        const FluxSeries* e4 = nullptr;
        const FluxSeries* gj = nullptr;
        for (const FluxSeries& s : series) {
            if (s.functional == "fourth_order_energy") e4 = &s;
            if (s.functional == "gj_flux") gj = &s;
        }
        if (!e4 || !gj) fail(ErrorKind::numeric, "the energy-ratio check needs both e4 and gj series");
        double coeff = (n - 4.0) / (8.0 * (n - 1.0));
        ordered_json ratio_doc;
        ratio_doc["expected_coeff"] = coeff;
        ratio_doc["e4_limit"] = finite_or_null(e4->f_inf);
        ratio_doc["gj_limit"] = finite_or_null(gj->f_inf);
        bool ok = true;
        if (n == 4) {
            double atol = opt.tol.value_or(1e-4);
            ratio_doc["tolerance"] = atol;
            ok = std::abs(e4->f_inf) <= atol && std::abs(gj->f_inf) <= atol;
        } else {
            double rtol = opt.tol.value_or(0.01);
            ratio_doc["tolerance"] = rtol;
            double ratio = std::abs(e4->f_inf) > 1e-300 ? -gj->f_inf / e4->f_inf
                                                        : std::numeric_limits<double>::quiet_NaN();
            ratio_doc["ratio"] = finite_or_null(ratio);
            ok = std::isfinite(ratio) && std::abs(ratio - coeff) <= rtol * std::abs(coeff);
        }
        ratio_doc["pass"] = ok;
        doc["energy_ratio"] = std::move(ratio_doc);
        if (f == "energy-ratio" && !ok) rc = 1;
    }

    emit(opt, opt.format == "csv" ? flux_series_csv(series) : doc.dump(2) + "\n");
    return rc;
}

// --------------------------------------------------------------- decay ----

FieldSampler field_sampler(const std::string& field, const MetricSpec& spec) {
    const int n = spec.dim;
    if (field == "metric")
        return [spec, n](const std::vector<double>& x) {
            std::vector<double> g = spec.evaluate(x);
            double worst = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    worst = std::max(worst,
                                     std::abs(g[static_cast<size_t>(i * n + j)] - (i == j ? 1.0 : 0.0)));
            return worst;
        };
    if (field == "ricci")
        return [spec](const std::vector<double>& x) {
            CurvatureFrame cf = curvature_frame(metric_frame(spec, x, 2));
            return tensor_scale(cf.ric);
        };
    if (field == "q" || field == "j" || field == "gj")
        return [spec, field](const std::vector<double>& x) {
            FourthOrderFrame fo = fourth_order_frame(curvature_frame(metric_frame(spec, x, 4)));
            if (field == "q") return std::abs(fo.q.value());
            return tensor_scale(field == "j" ? fo.j : fo.gj);
        };
    fail(ErrorKind::config, "unknown field '" + field + "' (metric, ricci, q, j, gj)");
}

int cmd_decay(const Options& opt) {
    MetricSpec spec = resolve_metric(opt);
    double r0 = opt.r0 > 0 ? opt.r0 : std::max(1.0, spec.inner_radius);
    if (r0 < spec.inner_radius)
        fail(ErrorKind::config, "--r0 lies inside the chart inner radius");
    AnnulusGrid grid = build_annulus_grid(spec.dim, r0, opt.annuli, opt.points_per_annulus,
                                          opt.seed);
    DecayReport rep = estimate_decay(opt.field, field_sampler(opt.field, spec), grid);

    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "decay";
    doc["config"] = config_json(opt, spec);
    doc["config"]["field"] = opt.field;
    doc["config"]["annuli"] = opt.annuli;
    doc["config"]["points_per_annulus"] = opt.points_per_annulus;
    doc["field"] = rep.field;
    doc["annulus_radii"] = rep.annulus_radii;
    doc["sup_values"] = rep.sup_values;
    doc["exponent"] = finite_or_null(rep.exponent);
    doc["band"] = finite_or_null(rep.band);
    doc["degenerate"] = rep.degenerate;

    std::ostringstream csv;
    csv.precision(17);
    csv << "annulus_radius,sup\n";
    for (size_t k = 0; k < rep.annulus_radii.size(); ++k)
        csv << rep.annulus_radii[k] << ',' << rep.sup_values[k] << '\n';

    emit(opt, opt.format == "csv" ? csv.str() : doc.dump(2) + "\n");
    return 0;
}

// ----------------------------------------------------------- linearize ----

int cmd_linearize(const Options& opt) {
    MetricSpec spec = resolve_metric(opt);
    const int n = spec.dim;

    // Scale the perturbation with a reserved parameter: each component becomes
    // delta_ij + __eps (g_ij - delta_ij).
    MetricSpec scaled = spec;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double dij = i == j ? 1.0 : 0.0;
            ExprPtr h = make_binary(BinaryOp::sub, spec.component(i, j), make_constant(dij));
            scaled.upper[static_cast<size_t>(spec.upper_index(i, j))] = make_binary(
                BinaryOp::add, make_constant(dij),
                make_binary(BinaryOp::mul, make_parameter("__eps"), h));
        }

    const double r_lo = std::max(1.0, spec.inner_radius);
    auto pts = shell_points(n, r_lo, 2.0 * r_lo, opt.lin_points, opt.seed);
    const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};

    std::vector<double> sup_rem(eps.size(), 0.0);
    for (size_t ei = 0; ei < eps.size(); ++ei) {
        scaled.params["__eps"] = eps[ei];
        for (const auto& pt : pts)
            sup_rem[ei] = std::max(sup_rem[ei], std::abs(taylor_remainder(scaled, pt).remainder));
    }

    bool degenerate = true;
    for (double s : sup_rem) degenerate = degenerate && s < 1e-300;
    double slope = 0.0;
    if (!degenerate) {
        // least squares on log10 |R| vs log10 eps
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t k = 0; k < eps.size(); ++k) {
            double x = std::log10(eps[k]);
            double y = std::log10(std::max(sup_rem[k], 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double m = static_cast<double>(eps.size());
        slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    bool pass = degenerate || slope >= opt.slope_min;

    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "linearize";
    doc["config"] = config_json(opt, spec);
    doc["config"]["points"] = opt.lin_points;
    doc["config"]["slope_min"] = opt.slope_min;
    doc["eps"] = eps;
    doc["sup_remainder"] = sup_rem;
    doc["slope"] = finite_or_null(slope);
    doc["degenerate"] = degenerate;
    doc["pass"] = pass;

    std::ostringstream csv;
    csv.precision(17);
    csv << "eps,sup_remainder\n";
    for (size_t k = 0; k < eps.size(); ++k) csv << eps[k] << ',' << sup_rem[k] << '\n';

    emit(opt, opt.format == "csv" ? csv.str() : doc.dump(2) + "\n");
    return pass ? 0 : 1;
}

// ------------------------------------------------------------- catalog ----

int cmd_catalog(const Options& opt) {
    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "catalog";
    ordered_json entries = ordered_json::array();
    std::ostringstream csv;
    csv << "name,summary,param,default\n";
    for (const CatalogEntry& e : catalog_entries()) {
        ordered_json je;
        je["name"] = e.name;
        je["summary"] = e.summary;
        ordered_json jp = ordered_json::array();
        for (const CatalogParam& p : e.params) {
            ordered_json pj;
            pj["name"] = p.name;
            pj["expression"] = p.is_expression;
            pj["default"] = p.default_value;
            jp.push_back(std::move(pj));
            csv << e.name << ',' << csv_escape(e.summary) << ',' << p.name << ','
                << csv_escape(p.default_value) << '\n';
        }
        je["params"] = std::move(jp);
        entries.push_back(std::move(je));
    }
    doc["entries"] = std::move(entries);
    emit(opt, opt.format == "csv" ? csv.str() : doc.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"aecurv: fourth-order curvature diagnostics on asymptotically "
                 "Euclidean metrics"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* c) {
        c->add_option("--metric", opt.metric_name, "catalog metric name");
        c->add_option("--metric-file", opt.metric_file, "metric JSON file");
        c->add_option("--param", opt.param_kv, "metric parameter k=v (repeatable)");
        c->add_option("--seed", opt.seed, "sampling seed");
        c->add_option("--tol", opt.tol, "override the command's primary tolerance");
        c->add_option("--out", opt.out_path, "write output to this path instead of stdout");
        c->add_option("--format", opt.format, "output format: json (default) or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        c->add_flag("--serial", opt.serial, "disable parallel execution");
    };

    CLI::App* eval = app.add_subcommand("eval", "curvature frame at given points");
    add_common(eval);
    eval->add_option("--points", opt.points_file, "file with one point per line");
    eval->add_option("--point", opt.point_args, "point as x1,x2,... (repeatable)");
    eval->add_option("--order", opt.order, "jet order: 4 (default) or 5, which adds div G_J")
        ->check(CLI::Range(2, 5));

    CLI::App* check = app.add_subcommand("check", "trace and conservation identity suite");
    add_common(check);
    check->add_option("--points", opt.check_points, "number of sample points")
        ->check(CLI::PositiveNumber);
    check->add_flag("--corrupt-fixture", opt.corrupt_fixture)->group("");

    CLI::App* flux = app.add_subcommand("flux", "surface-integral energy sweeps");
    add_common(flux);
    flux->add_option("functional", opt.functional,
                     "adm | adm-einstein | e4 | gj | charge | energy-ratio | all");
    flux->add_option("--radii", opt.radii_arg, "R0,K: radii R0 2^k for 0 <= k < K");
    flux->add_option("--quad-degree", opt.quad_degree, "points per sphere angle")
        ->check(CLI::Range(2, 64));
    flux->add_option("--charge-v", opt.charge_v, "kernel element V for the charge functional");

    CLI::App* decay = app.add_subcommand("decay", "decay-exponent estimate over dyadic annuli");
    add_common(decay);
    decay->add_option("--field", opt.field, "metric | ricci | q | j | gj");
    decay->add_option("--r0", opt.r0, "start of the dyadic fit window (default inner radius)");
    decay->add_option("--annuli", opt.annuli, "number of dyadic annuli")->check(CLI::Range(4, 32));
    decay->add_option("--points-per-annulus", opt.points_per_annulus, "samples per annulus")
        ->check(CLI::PositiveNumber);

    CLI::App* lin = app.add_subcommand("linearize", "Q-curvature Taylor remainder slope");
    add_common(lin);
    lin->add_option("--points", opt.lin_points, "number of sample points")
        ->check(CLI::PositiveNumber);
    lin->add_option("--slope-min", opt.slope_min, "pass threshold for the remainder slope");

    CLI::App* cat = app.add_subcommand("catalog", "list built-in metrics");
    cat->add_option("--out", opt.out_path, "write output to this path instead of stdout");
    cat->add_option("--format", opt.format, "output format: json (default) or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (eval->parsed()) return cmd_eval(opt);
        if (check->parsed()) return cmd_check(opt);
        if (flux->parsed()) return cmd_flux(opt);
        if (decay->parsed()) return cmd_decay(opt);
        if (lin->parsed()) return cmd_linearize(opt);
        return cmd_catalog(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::config:
            case ErrorKind::parse:
            case ErrorKind::validation: return 2;
            default: return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
