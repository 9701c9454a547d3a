#include "aecurv/metric.hpp"

#include "aecurv/errors.hpp"
#include "aecurv/sampling.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace aecurv {

namespace {

using nlohmann::json;

// Numeric parameters accept constant expressions ("4/3", "2^0.5") so that
// exact-looking values survive the command line.
double parse_number(const std::string& key, const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && *end == '\0') return v;
    try {
        ExprPtr e = parse_expr(text);
        if (max_variable(*e) > 0 || contains_radius(*e))
            fail(ErrorKind::config, "parameter '" + key + "' must be constant, got '" + text + "'");
        std::vector<double> origin{1.0};
        return eval_jet(e, origin, 0, {}).value();
    } catch (const Error&) {
        fail(ErrorKind::config, "parameter '" + key + "': expected a number, got '" + text + "'");
    }
}

void collect_parameters(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::parameter) out.insert(e->name);
    collect_parameters(e->lhs, out);
    collect_parameters(e->rhs, out);
}

// Consumes keys from a working copy of the user-supplied parameter map so
// that leftovers can be diagnosed.
struct ParamReader {
    std::map<std::string, std::string> left;

    explicit ParamReader(const std::map<std::string, std::string>& in) : left(in) {}

    std::optional<std::string> take(const std::string& key) {
        auto it = left.find(key);
        if (it == left.end()) return std::nullopt;
        std::string v = it->second;
        left.erase(it);
        return v;
    }

    double take_number(const std::string& key, double fallback) {
        auto v = take(key);
        return v ? parse_number(key, *v) : fallback;
    }
};

// Shared structural checks for catalog- and file-built specs. Remaining user
// params are matched against the parameters the expressions reference.
void finalize_spec(MetricSpec& spec, ParamReader* reader) {
    if (spec.dim < 3 || spec.dim > 8)
        fail(ErrorKind::config, "metric dimension must be between 3 and 8, got " +
                                     std::to_string(spec.dim));
    if (!(spec.inner_radius > 0.0))
        fail(ErrorKind::config, "inner_radius must be positive");
    if (spec.decay < 0.0) fail(ErrorKind::config, "decay must be nonnegative");

    std::set<std::string> referenced;
    for (const auto& e : spec.upper) {
        collect_parameters(e, referenced);
        if (max_variable(*e) > spec.dim)
            fail(ErrorKind::config, "component uses coordinate x" +
                                        std::to_string(max_variable(*e)) +
                                        " but dim = " + std::to_string(spec.dim));
    }
    if (reader) {
        for (const auto& [key, text] : reader->left) {
            if (!referenced.count(key))
                fail(ErrorKind::config,
                     "unknown parameter '" + key + "' for metric '" + spec.name + "'");
            spec.params[key] = parse_number(key, text);
        }
    }
    for (const auto& nm : referenced) {
        if (!spec.params.count(nm))
            fail(ErrorKind::config, "parameter '" + nm + "' has no value");
    }
}

ExprPtr zero_expr() {
    static const ExprPtr z = make_constant(0.0);
    return z;
}

ExprPtr one_expr() {
    static const ExprPtr o = make_constant(1.0);
    return o;
}

void fill_diagonal(MetricSpec& spec, const std::vector<ExprPtr>& diag) {
    spec.upper.assign(static_cast<size_t>(spec.dim) * (spec.dim + 1) / 2, zero_expr());
    for (int i = 0; i < spec.dim; ++i)
        spec.upper[static_cast<size_t>(spec.upper_index(i, i))] = diag[static_cast<size_t>(i)];
}

// Cholesky of a symmetric matrix given row-major; returns false on a
// nonpositive pivot. min_pivot reports the smallest diagonal residual.
bool cholesky_ok(const std::vector<double>& a, int n, double& min_pivot) {
    std::vector<double> l(a);
    min_pivot = l[0];
    for (int j = 0; j < n; ++j) {
        double d = l[static_cast<size_t>(j * n + j)];
        for (int k = 0; k < j; ++k) {
            double v = l[static_cast<size_t>(j * n + k)];
            d -= v * v;
        }
        if (d < min_pivot) min_pivot = d;
        if (!(d > 0.0)) return false;
        double root = std::sqrt(d);
        l[static_cast<size_t>(j * n + j)] = root;
        for (int i = j + 1; i < n; ++i) {
            double s = l[static_cast<size_t>(i * n + j)];
            for (int k = 0; k < j; ++k)
                s -= l[static_cast<size_t>(i * n + k)] * l[static_cast<size_t>(j * n + k)];
            l[static_cast<size_t>(i * n + j)] = s / root;
        }
    }
    return true;
}

} // namespace

int MetricSpec::upper_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // Row i starts after rows 0..i-1, which hold dim, dim-1, ... entries.
    return i * dim - i * (i - 1) / 2 + (j - i);
}

const ExprPtr& MetricSpec::component(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim || j >= dim)
        fail(ErrorKind::domain, "metric component index out of range");
    return upper[static_cast<size_t>(upper_index(i, j))];
}

std::vector<double> MetricSpec::evaluate(const std::vector<double>& point) const {
    if (static_cast<int>(point.size()) != dim)
        fail(ErrorKind::domain, "point dimension does not match metric");
    EvalContext ctx(point, 0, params);
    std::vector<double> g(static_cast<size_t>(dim) * static_cast<size_t>(dim), 0.0);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            double v = ctx.eval(component(i, j)).value();
            g[static_cast<size_t>(i * dim + j)] = v;
            g[static_cast<size_t>(j * dim + i)] = v;
        }
    }
    return g;
}

const std::vector<CatalogEntry>& catalog_entries() {
    static const std::vector<CatalogEntry> entries = {
        {"flat",
         "Euclidean metric; every curvature object vanishes identically",
         {{"n", false, "3"}}},
        {"schwarzschild_isotropic",
         "time-symmetric Schwarzschild slice g = (1 + m/(2r))^4 delta (n = 3 only); "
         "scalar-flat with ADM mass m",
         {{"n", false, "3"}, {"m", false, "1"}}},
        {"conformal",
         "conformally flat g = u^exponent delta",
         {{"n", false, "3"},
          {"u", true, "1 + 0.1*r^(-1)"},
          {"exponent", false, "4/(n-2)"}}},
        {"diagonal_perturbation",
         "g = delta + eps * diag(h1, ..., hn); h sets every axis, h1..hn override",
         {{"n", false, "3"}, {"eps", false, "0.1"}, {"h", true, "r^(-2)"}}},
        {"product_decay",
         "g = (1 + r^-tau) delta",
         {{"n", false, "3"}, {"tau", false, "1"}}},
    };
    return entries;
}

MetricSpec catalog_metric(const std::string& name,
                          const std::map<std::string, std::string>& params) {
    ParamReader reader(params);
    MetricSpec spec;
    spec.name = name;
    spec.dim = static_cast<int>(reader.take_number("n", 3.0));
    std::optional<std::string> inner = reader.take("inner_radius");
    std::optional<std::string> decay = reader.take("decay");

    if (name == "flat") {
        std::vector<ExprPtr> diag(static_cast<size_t>(spec.dim), one_expr());
        fill_diagonal(spec, diag);
    } else if (name == "schwarzschild_isotropic") {
        if (spec.dim != 3)
            fail(ErrorKind::config, "schwarzschild_isotropic requires n = 3");
        double m = reader.take_number("m", 1.0);
        spec.params["m"] = m;
        ExprPtr diag = parse_expr("(1 + m/(2*r))^4");
        fill_diagonal(spec, std::vector<ExprPtr>(3, diag));
        spec.inner_radius = std::max(1.0, m);
        spec.decay = 1.0;
    } else if (name == "conformal") {
        bool defaulted = false;
        std::string u_text = "1 + 0.1*r^(-1)";
        if (auto u = reader.take("u")) {
            u_text = *u;
        } else {
            defaulted = true;
        }
        double e = reader.take_number("exponent", 4.0 / (spec.dim - 2));
        ExprPtr u = parse_expr(u_text);
        ExprPtr diag = std::abs(e - 1.0) < 1e-15 ? u : make_power(u, e);
        fill_diagonal(spec, std::vector<ExprPtr>(static_cast<size_t>(spec.dim), diag));
        if (defaulted) spec.decay = 1.0;
    } else if (name == "diagonal_perturbation") {
        double eps = reader.take_number("eps", 0.1);
        spec.params["eps"] = eps;
        std::string h_all = "r^(-2)";
        bool defaulted = true;
        if (auto h = reader.take("h")) {
            h_all = *h;
            defaulted = false;
        }
        std::vector<ExprPtr> diag;
        for (int i = 0; i < spec.dim; ++i) {
            std::string h_text = h_all;
            if (auto hi = reader.take("h" + std::to_string(i + 1))) {
                h_text = *hi;
                defaulted = false;
            }
            diag.push_back(make_binary(BinaryOp::add, one_expr(),
                                       make_binary(BinaryOp::mul, make_parameter("eps"),
                                                   parse_expr(h_text))));
        }
        fill_diagonal(spec, diag);
        if (defaulted) spec.decay = 2.0;
    } else if (name == "product_decay") {
        double tau = reader.take_number("tau", 1.0);
        if (!(tau > 0.0)) fail(ErrorKind::config, "product_decay: tau must be positive");
        ExprPtr diag =
            make_binary(BinaryOp::add, one_expr(), make_power(make_radius(), -tau));
        fill_diagonal(spec, std::vector<ExprPtr>(static_cast<size_t>(spec.dim), diag));
        spec.decay = tau;
    } else {
        fail(ErrorKind::config, "unknown catalog metric '" + name + "'");
    }

    if (inner) spec.inner_radius = parse_number("inner_radius", *inner);
    if (decay) spec.decay = parse_number("decay", *decay);
    finalize_spec(spec, &reader);
    return spec;
}

MetricSpec metric_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& ex) {
        fail(ErrorKind::config, std::string("metric file is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) fail(ErrorKind::config, "metric file: top level must be an object");
    if (j.contains("schema") && j["schema"].get<int>() != 1)
        fail(ErrorKind::config, "metric file: unsupported schema version");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        fail(ErrorKind::config, "metric file: missing integer field 'dim'");
    if (!j.contains("components") || !j["components"].is_array())
        fail(ErrorKind::config, "metric file: missing array field 'components'");

    MetricSpec spec;
    spec.dim = j["dim"].get<int>();
    spec.name = j.value("name", std::string("file"));
    spec.inner_radius = j.value("inner_radius", 1.0);
    spec.decay = j.value("decay", 0.0);
    if (j.contains("params")) {
        if (!j["params"].is_object())
            fail(ErrorKind::config, "metric file: 'params' must be an object of numbers");
        for (auto& [key, val] : j["params"].items()) {
            if (!val.is_number())
                fail(ErrorKind::config, "metric file: parameter '" + key + "' is not a number");
            spec.params[key] = val.get<double>();
        }
    }

    const int n = spec.dim;
    if (n < 3 || n > 8) fail(ErrorKind::config, "metric file: dim must be between 3 and 8");
    const auto& rows = j["components"];
    if (static_cast<int>(rows.size()) != n)
        fail(ErrorKind::config, "metric file: 'components' must have dim rows");

    // Rows may carry the full dim entries or just the upper triangle from the
    // diagonal on. Full rows are checked for symmetry.
    std::vector<std::vector<ExprPtr>> grid(static_cast<size_t>(n),
                                           std::vector<ExprPtr>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<size_t>(i)];
        if (!row.is_array())
            fail(ErrorKind::config, "metric file: components row is not an array");
        const int len = static_cast<int>(row.size());
        if (len != n && len != n - i)
            fail(ErrorKind::config,
                 "metric file: components row " + std::to_string(i) + " has bad length");
        for (int k = 0; k < len; ++k) {
            const auto& cell = row[static_cast<size_t>(k)];
            if (!cell.is_string())
                fail(ErrorKind::config, "metric file: components must be expression strings");
            int col = (len == n) ? k : i + k;
            grid[static_cast<size_t>(i)][static_cast<size_t>(col)] =
                parse_expr(cell.get<std::string>());
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) {
            const ExprPtr& low = grid[static_cast<size_t>(i)][static_cast<size_t>(k)];
            const ExprPtr& up = grid[static_cast<size_t>(k)][static_cast<size_t>(i)];
            if (low && !expr_equal(*low, *up))
                fail(ErrorKind::validation, "metric file: components not symmetric at (" +
                                                std::to_string(i) + "," + std::to_string(k) +
                                                ")");
        }
    }
    spec.upper.resize(static_cast<size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k)
            spec.upper[static_cast<size_t>(spec.upper_index(i, k))] =
                grid[static_cast<size_t>(i)][static_cast<size_t>(k)];

    finalize_spec(spec, nullptr);
    return spec;
}

std::string metric_to_json_text(const MetricSpec& spec) {
    json j;
    j["schema"] = 1;
    j["name"] = spec.name;
    j["dim"] = spec.dim;
    json rows = json::array();
    for (int i = 0; i < spec.dim; ++i) {
        json row = json::array();
        for (int k = i; k < spec.dim; ++k) row.push_back(pretty_print(*spec.component(i, k)));
        rows.push_back(std::move(row));
    }
    j["components"] = std::move(rows);
    if (!spec.params.empty()) j["params"] = spec.params;
    j["inner_radius"] = spec.inner_radius;
    if (spec.decay > 0.0) j["decay"] = spec.decay;
    return j.dump(2) + "\n";
}

MetricSpec load_metric_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open metric file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return metric_from_json_text(buf.str());
}

void save_metric_file(const MetricSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::config, "cannot write metric file '" + path + "'");
    out << metric_to_json_text(spec);
}

MetricValidation validate_metric(const MetricSpec& spec, std::uint64_t seed) {
    MetricValidation report;
    report.min_pivot = std::numeric_limits<double>::infinity();

    std::vector<double> log_r, log_dev;
    for (int k = 0; k < 4; ++k) {
        double r_lo = spec.inner_radius * std::pow(2.0, k);
        auto pts = annulus_points(spec.dim, r_lo, 64, seed + static_cast<std::uint64_t>(k));
        for (const auto& p : pts) {
            std::vector<double> g = spec.evaluate(p);
            double pivot = 0.0;
            if (!cholesky_ok(g, spec.dim, pivot)) {
                report.positive_definite = false;
                double r = 0.0;
                for (double v : p) r += v * v;
                report.warnings.push_back("not positive definite near r = " +
                                          std::to_string(std::sqrt(r)));
                report.min_pivot = std::min(report.min_pivot, pivot);
                return report;
            }
            report.min_pivot = std::min(report.min_pivot, pivot);

            double dev = 0.0;
            for (int i = 0; i < spec.dim; ++i)
                for (int jj = 0; jj < spec.dim; ++jj) {
                    double d = g[static_cast<size_t>(i * spec.dim + jj)] - (i == jj ? 1.0 : 0.0);
                    dev = std::max(dev, std::abs(d));
                }
            if (dev > 1e-13) {
                double r2 = 0.0;
                for (double v : p) r2 += v * v;
                log_r.push_back(0.5 * std::log(r2));
                log_dev.push_back(std::log(dev));
            }
        }
    }

    if (spec.params.count("m") && spec.params.at("m") <= 0.0 &&
        spec.name == "schwarzschild_isotropic")
        report.warnings.push_back("m <= 0: not a positive-mass slice");

    // Soft decay check: least-squares slope of log|g - delta| against log r.
    if (spec.decay > 0.0 && log_r.size() >= 8) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double cnt = static_cast<double>(log_r.size());
        for (size_t idx = 0; idx < log_r.size(); ++idx) {
            sx += log_r[idx];
            sy += log_dev[idx];
            sxx += log_r[idx] * log_r[idx];
            sxy += log_r[idx] * log_dev[idx];
        }
        double denom = cnt * sxx - sx * sx;
        if (std::abs(denom) > 1e-12) {
            double slope = (cnt * sxy - sx * sy) / denom;
            if (slope > -spec.decay + 0.5) {
                std::ostringstream msg;
                msg << "declared decay " << spec.decay
                    << " not supported by samples (measured slope " << slope << ")";
                report.warnings.push_back(msg.str());
            }
        }
    }
    return report;
}

} // namespace aecurv
