#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "aecurv/asymptotics.hpp"
#include "aecurv/errors.hpp"
#include "aecurv/metric.hpp"
#include "oracles.hpp"

using namespace aecurv;

namespace {

double radius(const std::vector<double>& x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::sqrt(r2);
}

FieldSampler metric_deviation(const MetricSpec& spec) {
    return [&spec](const std::vector<double>& x) {
        std::vector<double> g = spec.evaluate(x);
        const int n = spec.dim;
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double d = g[static_cast<size_t>(i * n + j)] - (i == j ? 1.0 : 0.0);
                worst = std::max(worst, std::abs(d));
            }
        return worst;
    };
}

} // namespace

TEST_CASE("annulus grid is reproducible and well placed") {
    AnnulusGrid a = build_annulus_grid(4, 1.5, 5, 32, 9);
    AnnulusGrid b = build_annulus_grid(4, 1.5, 5, 32, 9);
    AnnulusGrid c = build_annulus_grid(4, 1.5, 5, 32, 10);
    REQUIRE(a.samples.size() == 5);
    bool any_differs = false;
    for (size_t k = 0; k < a.samples.size(); ++k) {
        REQUIRE(a.samples[k].size() == 32);
        double lo = 1.5 * std::pow(2.0, static_cast<double>(k));
        for (size_t i = 0; i < a.samples[k].size(); ++i) {
            CHECK(a.samples[k][i] == b.samples[k][i]);
            if (a.samples[k][i] != c.samples[k][i]) any_differs = true;
            double r = radius(a.samples[k][i]);
            CHECK(r >= lo);
            CHECK(r < 2.0 * lo);
        }
    }
    CHECK(any_differs);
    CHECK_THROWS_AS(build_annulus_grid(4, 1.0, 0, 32, 1), Error);
}

TEST_CASE("weighted norm invariants") {
    AnnulusGrid grid = build_annulus_grid(3, 1.0, 6, 64, 3);
    // u = sigma^delta makes the weighted integrand exactly 1 at p = infinity.
    double delta = -1.7;
    FieldSampler u = [delta](const std::vector<double>& x) {
        double r = radius(x);
        return std::pow(1.0 + r * r, delta / 2.0);
    };
    double inf = std::numeric_limits<double>::infinity();
    CHECK(weighted_norm(u, inf, delta, grid) == doctest::Approx(1.0).epsilon(1e-14));
    // Homogeneity in u for a finite p.
    FieldSampler u3 = [&u](const std::vector<double>& x) { return 3.0 * u(x); };
    double n1 = weighted_norm(u, 2.0, delta, grid);
    double n3 = weighted_norm(u3, 2.0, delta, grid);
    CHECK(n3 == doctest::Approx(3.0 * n1).epsilon(1e-13));
    CHECK(n1 > 0.0);
    CHECK_THROWS_AS(weighted_norm(u, 1.0, delta, grid), Error);
}

TEST_CASE("decay estimate recovers a pure power law") {
    AnnulusGrid grid = build_annulus_grid(3, 1.0, 8, 64, 5);
    FieldSampler u = [](const std::vector<double>& x) { return std::pow(radius(x), -2.5); };
    DecayReport rep = estimate_decay("power", u, grid);
    CHECK(rep.field == "power");
    REQUIRE(rep.annulus_radii.size() == 8);
    REQUIRE(rep.sup_values.size() == 8);
    CHECK(rep.exponent == doctest::Approx(2.5).epsilon(0.02));
    CHECK(rep.band < 0.05);
    CHECK_FALSE(rep.degenerate);

    FieldSampler zero = [](const std::vector<double>&) { return 0.0; };
    DecayReport z = estimate_decay("zero", zero, grid);
    CHECK(z.degenerate);

    AnnulusGrid tiny = build_annulus_grid(3, 1.0, 3, 16, 5);
    CHECK_THROWS_AS(estimate_decay("u", u, tiny), Error);
}

TEST_CASE("decay of catalog metric deviations") {
    MetricSpec pd = catalog_metric("product_decay", {{"n", "4"}, {"tau", "1.5"}});
    AnnulusGrid grid = build_annulus_grid(4, 1.0, 8, 64, 2);
    DecayReport rep = estimate_decay("metric", metric_deviation(pd), grid);
    CHECK(rep.exponent == doctest::Approx(1.5).epsilon(0.02));

    MetricSpec sw = catalog_metric("schwarzschild_isotropic", {{"m", "1"}});
    AnnulusGrid g3 = build_annulus_grid(3, 2.0, 8, 64, 2);
    DecayReport swr = estimate_decay("metric", metric_deviation(sw), g3);
    CHECK(swr.exponent == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("radial profile on catalog metrics") {
    MetricSpec sw = catalog_metric("schwarzschild_isotropic", {{"m", "1"}});
    RadialProfile p = radial_profile(sw, 3.0);
    double c = 1.0 + 1.0 / 6.0;
    CHECK(p.a == doctest::Approx(std::pow(c, 4)).epsilon(1e-12));
    CHECK(std::abs(p.b) < 1e-12);
    CHECK(p.da == doctest::Approx(4.0 * std::pow(c, 3) * (-1.0 / 18.0)).epsilon(1e-12));
    CHECK(std::abs(p.db) < 1e-12);

    MetricSpec pd = catalog_metric("product_decay", {{"n", "3"}, {"tau", "1"}});
    RadialProfile q = radial_profile(pd, 2.0);
    CHECK(q.a == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(q.da == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("trial functions") {
    TrialFunction bump = radial_bump(4.0, 2.0);
    std::vector<double> inside{4.5, 0.0, 0.0};
    std::vector<double> outside{7.0, 0.0, 0.0};
    double t = (4.5 - 4.0) / 2.0;
    CHECK(bump.value(inside) == doctest::Approx(std::pow(1.0 - t * t, 2)).epsilon(1e-13));
    CHECK(bump.value(outside) == 0.0);
    CHECK(bump.gradient(outside)[0] == 0.0);

    TrialFunction e = trial_from_expr(parse_expr("x1^2 + c * x2"), {{"c", 2.0}});
    std::vector<double> x{1.5, -0.5, 2.0};
    CHECK(e.value(x) == doctest::Approx(1.25).epsilon(1e-14));
    std::vector<double> grad = e.gradient(x);
    REQUIRE(grad.size() == 3);
    CHECK(grad[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(grad[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(grad[2]) < 1e-14);
}

TEST_CASE("yamabe probe stays positive on positive-mass data") {
    MetricSpec flat5 = catalog_metric("flat", {{"n", "5"}});
    AnnulusGrid g5 = build_annulus_grid(5, 1.0, 6, 128, 7);
    double yf = yamabe_probe(flat5, g5);
    CHECK(yf == doctest::Approx(192.59).epsilon(0.01));

    MetricSpec sw = catalog_metric("schwarzschild_isotropic", {{"m", "0.5"}});
    AnnulusGrid g3 = build_annulus_grid(3, 1.0, 6, 128, 7);
    double ys = yamabe_probe(sw, g3);
    CHECK(ys == doctest::Approx(244.72).epsilon(0.01));
    CHECK(ys > 0.0);

    double quotient = yamabe_quotient(flat5, radial_bump(8.0, 6.0), g5);
    CHECK(std::isfinite(quotient));
    CHECK(quotient > 0.0);
}

TEST_CASE("harmonic radial coordinate on flat space") {
    MetricSpec flat = catalog_metric("flat", {{"n", "3"}});
    HarmonicRadial h = harmonic_radial_coordinate(flat, 4096.0);
    CHECK(h.degenerate_decay);
    CHECK(h.ode_residual < 1e-12);
    CHECK(h.f_at(100.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(h.df_at(100.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(h.f_at(0.5), Error);
    CHECK_THROWS_AS(h.f_at(5000.0), Error);
}

TEST_CASE("harmonic radial coordinate on Schwarzschild") {
    MetricSpec sw = catalog_metric("schwarzschild_isotropic", {{"m", "1"}});
    HarmonicRadial h = harmonic_radial_coordinate(sw, 65536.0);
    CHECK(h.ode_residual < 1e-10);
    CHECK_FALSE(h.degenerate_decay);
    // f - r tends to -m/2; tau* = min(tau, n-2) = 1, so f - r stays bounded.
    CHECK(h.f_at(1e4) - 1e4 == doctest::Approx(-0.5).epsilon(2e-4));
    CHECK(std::abs(h.growth_exponent) < 0.1);
}

TEST_CASE("harmonic growth exponent tracks weak decay") {
    MetricSpec cf = catalog_metric(
        "conformal", {{"n", "3"}, {"u", "1 + 0.3 * r^(-0.5)"}, {"decay", "0.5"}});
    HarmonicRadial h = harmonic_radial_coordinate(cf, 65536.0);
    CHECK(h.ode_residual < 1e-8);
    // tau = 0.5 < n - 2, so |f - r| grows like r^{1 - tau}.
    CHECK(h.growth_exponent == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("harmonic solver validates its input") {
    MetricSpec aniso = catalog_metric(
        "diagonal_perturbation", {{"n", "3"}, {"eps", "0.2"}, {"h1", "x2 * r^(-3)"}});
    CHECK_THROWS_AS(harmonic_radial_coordinate(aniso, 4096.0), Error);
    try {
        harmonic_radial_coordinate(aniso, 4096.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
    }
    MetricSpec flat = catalog_metric("flat", {{"n", "3"}});
    CHECK_THROWS_AS(harmonic_radial_coordinate(flat, 2.0), Error);
}
