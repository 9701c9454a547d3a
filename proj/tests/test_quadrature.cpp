#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "aecurv/errors.hpp"
#include "aecurv/quadrature.hpp"
#include "oracles.hpp"

using namespace aecurv;

namespace {

double integrate_monomial(const SphereQuadrature& q, const std::vector<int>& a) {
    double s = 0.0;
    for (size_t k = 0; k < q.nodes.size(); ++k) {
        double term = q.weights[k];
        for (size_t i = 0; i < a.size(); ++i) term *= std::pow(q.nodes[k][i], a[i]);
        s += term;
    }
    return s;
}

// All exponent vectors with given total degree, dimension n.
void enumerate_exponents(int n, int degree, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == n - 1) {
        cur.push_back(degree);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int d = 0; d <= degree; ++d) {
        cur.push_back(d);
        enumerate_exponents(n, degree - d, cur, out);
        cur.pop_back();
    }
}

} // namespace

TEST_CASE("weights sum to the sphere area") {
    for (int n = 3; n <= 8; ++n) {
        int m = n <= 5 ? 6 : 3;
        SphereQuadrature q = build_quadrature(n, m);
        CHECK(q.dim == n);
        CHECK(q.degree == m);
        size_t expect = 2 * static_cast<size_t>(std::pow(m, n - 2)) * m;
        CHECK(q.nodes.size() == expect);
        CHECK(q.weights.size() == expect);
        double s = 0.0;
        for (double w : q.weights) {
            CHECK(w > 0.0);
            s += w;
        }
        CHECK(s == doctest::Approx(sphere_area(n)).epsilon(1e-13));
    }
}

TEST_CASE("nodes lie on the unit sphere") {
    SphereQuadrature q = build_quadrature(5, 3);
    for (const auto& x : q.nodes) {
        REQUIRE(x.size() == 5);
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        CHECK(std::abs(r2 - 1.0) < 1e-14);
    }
}

TEST_CASE("monomials up to degree 2m-1 integrate exactly") {
    for (int n : {3, 4, 5}) {
        int m = 4;
        SphereQuadrature q = build_quadrature(n, m);
        std::vector<std::vector<int>> exps;
        std::vector<int> cur;
        for (int d = 0; d <= 2 * m - 1; ++d) enumerate_exponents(n, d, cur, exps);
        for (const auto& a : exps) {
            double got = integrate_monomial(q, a);
            double want = oracles::sphere_moment(a);
            if (want == 0.0) {
                CHECK(std::abs(got) < 1e-13 * sphere_area(n));
            } else {
                CHECK(got == doctest::Approx(want).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("known closed-form moments") {
    using std::numbers::pi;
    // Int_{S^2} w1^2 = 4 pi / 3, Int_{S^4} w1^4 = 8 pi^2 / 35.
    SphereQuadrature q3 = build_quadrature(3, 4);
    CHECK(integrate_monomial(q3, {2, 0, 0}) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-13));
    SphereQuadrature q5 = build_quadrature(5, 4);
    CHECK(integrate_monomial(q5, {4, 0, 0, 0, 0}) ==
          doctest::Approx(8.0 * pi * pi / 35.0).epsilon(1e-13));
    CHECK(integrate_monomial(q5, {2, 2, 0, 0, 0}) ==
          doctest::Approx(oracles::sphere_moment({2, 2, 0, 0, 0})).epsilon(1e-13));
}

TEST_CASE("degree guarantee is sharp") {
    // m = 2 is exact through total degree 3 only; a quartic misses by O(1).
    SphereQuadrature q = build_quadrature(3, 2);
    double got = integrate_monomial(q, {4, 0, 0});
    double want = oracles::sphere_moment({4, 0, 0});
    CHECK(std::abs(got - want) > 1e-2);
    // The same quartic becomes exact once m = 3.
    SphereQuadrature q3 = build_quadrature(3, 3);
    CHECK(integrate_monomial(q3, {4, 0, 0}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("gauss_jacobi reproduces Gauss-Legendre at gamma 0") {
    std::vector<double> t, w;
    gauss_jacobi(3, 0.0, t, w);
    REQUIRE(t.size() == 3);
    double s35 = std::sqrt(3.0 / 5.0);
    CHECK(t[0] == doctest::Approx(-s35).epsilon(1e-14));
    CHECK(std::abs(t[1]) < 1e-14);
    CHECK(t[2] == doctest::Approx(s35).epsilon(1e-14));
    CHECK(w[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("gauss_jacobi integrates against the weight") {
    using std::numbers::pi;
    // Int_{-1}^{1} t^2 sqrt(1-t^2) dt = pi / 8.
    std::vector<double> t, w;
    gauss_jacobi(4, 0.5, t, w);
    double s = 0.0;
    for (size_t k = 0; k < t.size(); ++k) s += w[k] * t[k] * t[k];
    CHECK(s == doctest::Approx(pi / 8.0).epsilon(1e-13));
    // Total mass Int (1-t^2)^{3/2} = 3 pi / 8.
    gauss_jacobi(2, 1.5, t, w);
    CHECK(w[0] + w[1] == doctest::Approx(3.0 * pi / 8.0).epsilon(1e-13));
}

TEST_CASE("invalid requests are rejected") {
    CHECK_THROWS_AS(build_quadrature(2, 4), Error);
    CHECK_THROWS_AS(build_quadrature(9, 4), Error);
    CHECK_THROWS_AS(build_quadrature(4, 1), Error);
    try {
        build_quadrature(2, 4);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
    }
    std::vector<double> t, w;
    CHECK_THROWS_AS(gauss_jacobi(0, 0.0, t, w), Error);
    CHECK_THROWS_AS(gauss_jacobi(3, -1.0, t, w), Error);
}
