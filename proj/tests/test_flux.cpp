#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "aecurv/errors.hpp"
#include "aecurv/flux.hpp"
#include "aecurv/metric.hpp"
#include "oracles.hpp"

using namespace aecurv;

TEST_CASE("dyadic radii") {
    std::vector<double> r = dyadic_radii(2.0, 3, 6);
    REQUIRE(r.size() == 4);
    CHECK(r[0] == 16.0);
    CHECK(r[1] == 32.0);
    CHECK(r[2] == 64.0);
    CHECK(r[3] == 128.0);
    CHECK_THROWS_AS(dyadic_radii(0.0), Error);
    CHECK_THROWS_AS(dyadic_radii(1.0, 5, 4), Error);
}

TEST_CASE("all functionals vanish on flat space") {
    MetricSpec spec = catalog_metric("flat", {{"n", "4"}});
    SphereQuadrature quad = build_quadrature(4, 3);
    std::vector<double> radii = dyadic_radii(1.0, 3, 6);
    for (const FluxSeries& s :
         {adm_energy(spec, quad, radii), adm_energy_einstein(spec, quad, radii),
          fourth_order_energy(spec, quad, radii), gj_flux(spec, quad, radii),
          charge(spec, parse_expr("1"), quad, radii)}) {
        for (double v : s.values) CHECK(std::abs(v) < 1e-12);
        CHECK(std::abs(s.f_inf) < 1e-12);
        CHECK_FALSE(s.diverged);
    }
}

TEST_CASE("ADM mass of the Schwarzschild slice") {
    for (double m : {0.5, 2.0}) {
        MetricSpec spec = catalog_metric("schwarzschild_isotropic", {{"m", std::to_string(m)}});
        SphereQuadrature quad = build_quadrature(3, 4);
        std::vector<double> radii = dyadic_radii(1.0, 8, 13);
        FluxSeries adm = adm_energy(spec, quad, radii);
        FluxSeries ein = adm_energy_einstein(spec, quad, radii);
        CHECK(adm.functional == "adm_energy");
        CHECK(ein.functional == "adm_energy_einstein");
        CHECK(adm.f_inf == doctest::Approx(m).epsilon(1e-4));
        CHECK(ein.f_inf == doctest::Approx(m).epsilon(1e-4));
        CHECK(adm.f_inf == doctest::Approx(ein.f_inf).epsilon(1e-4));
        CHECK_FALSE(adm.diverged);
        // The sweep itself converges toward m from the near field.
        CHECK(std::abs(adm.values.back() - m) < std::abs(adm.values.front() - m) + 1e-12);
    }
}

TEST_CASE("conformal fourth-order energy and G_J flux ratio") {
    using std::numbers::pi;
    MetricSpec spec = catalog_metric("conformal", {{"n", "5"}});
    SphereQuadrature quad = build_quadrature(5, 2);
    std::vector<double> radii = dyadic_radii(1.0, 3, 10);
    FluxSeries e4 = fourth_order_energy(spec, quad, radii);
    FluxSeries gj = gj_flux(spec, quad, radii);
    double energy = 128.0 * pi * pi / 15.0;
    CHECK(e4.f_inf == doctest::Approx(energy).epsilon(5e-3));
    // The flux limit carries the opposite orientation to the energy.
    CHECK(-gj.f_inf / e4.f_inf == doctest::Approx(1.0 / 32.0).epsilon(1e-2));
    CHECK_FALSE(e4.diverged);
    CHECK_FALSE(gj.diverged);
}

TEST_CASE("charge with V = 1 recovers the energy scaling") {
    MetricSpec spec = catalog_metric("conformal", {{"n", "5"}});
    SphereQuadrature quad = build_quadrature(5, 2);
    std::vector<double> radii = dyadic_radii(1.0, 3, 10);
    FluxSeries e4 = fourth_order_energy(spec, quad, radii);
    FluxSeries ch = charge(spec, parse_expr("1"), quad, radii);
    CHECK(ch.warnings.empty());
    // E_g(1) = E(g) / (2(n-1)).
    CHECK(ch.f_inf == doctest::Approx(e4.f_inf / 8.0).epsilon(1e-2));
    // Coordinate functions are admissible and carry no charge here.
    FluxSeries cx = charge(spec, parse_expr("x1"), quad, radii);
    CHECK(cx.warnings.empty());
    CHECK(std::abs(cx.f_inf) < 1e-8 * std::abs(ch.f_inf));
}

TEST_CASE("charge flags V outside the kernel") {
    MetricSpec spec = catalog_metric("conformal", {{"n", "5"}});
    SphereQuadrature quad = build_quadrature(5, 2);
    std::vector<double> radii = dyadic_radii(1.0, 3, 6);
    FluxSeries bad = charge(spec, parse_expr("x1^4"), quad, radii);
    REQUIRE_FALSE(bad.warnings.empty());
    CHECK(bad.warnings.front().find("kernel") != std::string::npos);
}

TEST_CASE("extrapolation recovers a two-term tail") {
    FluxSeries s;
    s.functional = "synthetic";
    s.radii = dyadic_radii(1.0, 3, 9);
    for (double r : s.radii) s.values.push_back(3.0 + 5.0 * std::pow(r, -1.5));
    extrapolate(s, 3);
    CHECK(s.f_inf == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.coeff == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(s.exponent == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(s.residual < 1e-8);
    CHECK_FALSE(s.diverged);
}

TEST_CASE("growing series is flagged as diverged") {
    FluxSeries s;
    s.functional = "synthetic";
    s.radii = dyadic_radii(1.0, 3, 9);
    for (double r : s.radii) s.values.push_back(0.01 * std::sqrt(r));
    extrapolate(s, 3);
    CHECK(s.diverged);
    REQUIRE_FALSE(s.warnings.empty());
    CHECK(s.warnings.front().find("limit untrusted") != std::string::npos);
}

TEST_CASE("serial and parallel sweeps agree bitwise") {
    MetricSpec spec = catalog_metric("conformal", {{"n", "5"}});
    SphereQuadrature quad = build_quadrature(5, 2);
    std::vector<double> radii = dyadic_radii(1.0, 3, 6);
    FluxSeries par = gj_flux(spec, quad, radii, Exec::parallel);
    FluxSeries ser = gj_flux(spec, quad, radii, Exec::serial);
    REQUIRE(par.values.size() == ser.values.size());
    for (size_t k = 0; k < par.values.size(); ++k) CHECK(par.values[k] == ser.values[k]);
}

TEST_CASE("csv rendering") {
    FluxSeries s;
    s.functional = "synthetic";
    s.radii = {8.0, 16.0};
    s.values = {1.25, 1.0625};
    s.f_inf = 1.0;
    s.coeff = 2.0;
    s.exponent = 1.0;
    std::string csv = flux_series_csv(std::vector<FluxSeries>{s});
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "functional,radius,value,fit");
    REQUIRE(std::getline(in, line));
    CHECK(line.find("synthetic,8") == 0);
    int rows = 1;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("input validation") {
    MetricSpec spec = catalog_metric("flat", {{"n", "4"}});
    SphereQuadrature quad3 = build_quadrature(3, 3);
    SphereQuadrature quad4 = build_quadrature(4, 3);
    CHECK_THROWS_AS(adm_energy(spec, quad3, dyadic_radii(1.0, 3, 6)), Error);
    CHECK_THROWS_AS(adm_energy(spec, quad4, {8.0, 16.0, 32.0}), Error);
    CHECK_THROWS_AS(adm_energy(spec, quad4, {8.0, 16.0, 32.0, 24.0}), Error);
    FluxSeries s;
    s.radii = {8.0, 16.0};
    s.values = {1.0, 2.0};
    CHECK_THROWS_AS(extrapolate(s, 3), Error);
}
