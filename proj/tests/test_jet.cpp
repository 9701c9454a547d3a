#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aecurv/errors.hpp"
#include "aecurv/jet.hpp"

#include <cmath>
#include <vector>

using namespace aecurv;

namespace {

// Jet of the polynomial sum_k c_k prod x_i^{p_ki} built only from coordinate
// jets and ring operations, for cross-checking partial() against the closed
// form of monomial derivatives.
double monomial_partial(const std::vector<int>& p, const std::vector<int>& alpha,
                        const std::vector<double>& x) {
    double v = 1.0;
    for (size_t i = 0; i < p.size(); ++i) {
        int pw = p[i] - alpha[i];
        if (pw < 0) return 0.0;
        double fact = 1.0;
        for (int k = p[i]; k > pw; --k) fact *= k;
        v *= fact * std::pow(x[i], pw);
    }
    return v;
}

} // namespace

TEST_CASE("coordinate and constant jets") {
    Jet c = Jet::constant(3, 4, 2.5);
    CHECK(c.value() == 2.5);
    CHECK(c.dim() == 3);
    CHECK(c.order() == 4);
    std::vector<int> e1{1, 0, 0};
    CHECK(c.partial(e1) == 0.0);

    Jet x = Jet::coordinate(3, 4, 1, -1.5);
    CHECK(x.value() == -1.5);
    std::vector<int> e2{0, 1, 0};
    CHECK(x.partial(e2) == 1.0);
    std::vector<int> e22{0, 2, 0};
    CHECK(x.partial(e22) == 0.0);
}

TEST_CASE("product matches monomial calculus") {
    std::vector<double> x{1.3, -0.4, 0.7};
    std::vector<int> p{2, 1, 3};
    Jet m = Jet::constant(3, 5, 1.0);
    for (int i = 0; i < 3; ++i) {
        Jet xi = Jet::coordinate(3, 5, i, x[static_cast<size_t>(i)]);
        for (int k = 0; k < p[static_cast<size_t>(i)]; ++k) m = m * xi;
    }
    const JetTables& tab = JetTables::get(3);
    for (int idx = 0; idx < tab.count_at[5]; ++idx) {
        std::vector<int> alpha(3);
        for (int i = 0; i < 3; ++i) alpha[static_cast<size_t>(i)] = tab.alpha[static_cast<size_t>(idx)][static_cast<size_t>(i)];
        double want = monomial_partial(p, alpha, x);
        CHECK(m.partial(alpha) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("ring identities") {
    Jet x = Jet::coordinate(2, 4, 0, 0.8);
    Jet y = Jet::coordinate(2, 4, 1, -0.3);
    Jet a = 1.0 + x * y + 2.0 * y;
    Jet lhs = (a + x) * (a - x);
    Jet rhs = a * a - x * x;
    for (size_t i = 0; i < lhs.coeffs().size(); ++i)
        CHECK(lhs.coeffs()[i] == doctest::Approx(rhs.coeffs()[i]).epsilon(1e-14));
}

TEST_CASE("exp log sqrt reciprocal pow") {
    Jet x = Jet::coordinate(2, 5, 0, 0.4);
    Jet y = Jet::coordinate(2, 5, 1, 0.9);
    Jet a = 2.0 + x + 0.5 * x * y;

    Jet b = jet_log(jet_exp(a));
    for (size_t i = 0; i < a.coeffs().size(); ++i)
        CHECK(b.coeffs()[i] == doctest::Approx(a.coeffs()[i]).epsilon(1e-12));

    Jet s = jet_sqrt(a);
    Jet s2 = s * s;
    for (size_t i = 0; i < a.coeffs().size(); ++i)
        CHECK(s2.coeffs()[i] == doctest::Approx(a.coeffs()[i]).epsilon(1e-12));

    Jet r = jet_reciprocal(a) * a;
    CHECK(r.value() == doctest::Approx(1.0));
    CHECK(r.max_abs_coeff() == doctest::Approx(1.0));

    Jet p = jet_pow(a, -1.5);
    Jet q = jet_reciprocal(jet_sqrt(a * a * a));
    for (size_t i = 0; i < p.coeffs().size(); ++i)
        CHECK(p.coeffs()[i] == doctest::Approx(q.coeffs()[i]).epsilon(1e-12));

    Jet ip = jet_pow(a, 3.0);
    Jet iq = a * a * a;
    for (size_t i = 0; i < ip.coeffs().size(); ++i)
        CHECK(ip.coeffs()[i] == doctest::Approx(iq.coeffs()[i]).epsilon(1e-12));
}

TEST_CASE("compose against analytic sin") {
    // sin applied through jet_compose with the derivative table at a.value().
    Jet x = Jet::coordinate(1, 5, 0, 0.6);
    Jet a = x * x;
    double v = a.value();
    std::vector<double> derivs{std::sin(v), std::cos(v), -std::sin(v),
                               -std::cos(v), std::sin(v), std::cos(v)};
    Jet s = jet_compose(a, derivs);
    // d/dx sin(x^2) = 2x cos(x^2); d2/dx2 = 2cos(x^2) - 4x^2 sin(x^2)
    std::vector<int> a1{1}, a2{2};
    CHECK(s.partial(a1) == doctest::Approx(2 * 0.6 * std::cos(v)).epsilon(1e-12));
    CHECK(s.partial(a2) ==
          doctest::Approx(2 * std::cos(v) - 4 * 0.36 * std::sin(v)).epsilon(1e-12));
}

TEST_CASE("division") {
    Jet x = Jet::coordinate(2, 4, 0, 1.2);
    Jet y = Jet::coordinate(2, 4, 1, -0.5);
    Jet num = 1.0 + x + y * y;
    Jet den = 2.0 + x * y;
    Jet q = num / den;
    Jet back = q * den;
    for (size_t i = 0; i < num.coeffs().size(); ++i)
        CHECK(back.coeffs()[i] == doctest::Approx(num.coeffs()[i]).epsilon(1e-12));
}

TEST_CASE("truncation is a prefix copy") {
    Jet x = Jet::coordinate(3, 5, 0, 0.3);
    Jet y = Jet::coordinate(3, 5, 1, 0.7);
    Jet a = jet_exp(x * y + x);
    Jet t = a.truncated(3);
    CHECK(t.order() == 3);
    for (size_t i = 0; i < t.coeffs().size(); ++i) CHECK(t.coeffs()[i] == a.coeffs()[i]);
}

TEST_CASE("derivative extracts shifted partials") {
    Jet x = Jet::coordinate(2, 4, 0, 0.5);
    Jet y = Jet::coordinate(2, 4, 1, 1.5);
    Jet a = x * x * y + 3.0 * y;
    Jet dx = a.derivative(0);
    CHECK(dx.order() == 3);
    CHECK(dx.value() == doctest::Approx(2 * 0.5 * 1.5)); // d/dx = 2xy
    std::vector<int> e1{1, 0};
    CHECK(dx.partial(e1) == doctest::Approx(2 * 1.5)); // d2/dx2 = 2y
    std::vector<int> e2{0, 1};
    CHECK(dx.partial(e2) == doctest::Approx(2 * 0.5)); // d2/dxdy = 2x
}

TEST_CASE("order and dim mismatches fail loudly") {
    Jet a = Jet::constant(3, 4, 1.0);
    Jet b = Jet::constant(3, 3, 1.0);
    CHECK_THROWS_AS(a + b, Error);
    CHECK_THROWS_AS(a * b, Error);
    Jet c = Jet::constant(2, 4, 1.0);
    CHECK_THROWS_AS(a + c, Error);
}

TEST_CASE("explicit truncation reconciles orders") {
    Jet a = Jet::constant(3, 4, 2.0);
    Jet b = Jet::constant(3, 3, 1.0);
    Jet s = a.truncated(3) + b;
    CHECK(s.value() == 3.0);
}

TEST_CASE("domain violations") {
    Jet neg = Jet::constant(2, 3, -1.0);
    CHECK_THROWS_AS(jet_sqrt(neg), Error);
    CHECK_THROWS_AS(jet_log(neg), Error);
    Jet zero = Jet::constant(2, 3, 0.0);
    CHECK_THROWS_AS(jet_reciprocal(zero), Error);
}

TEST_CASE("partial rejects excessive order") {
    Jet a = Jet::constant(2, 2, 1.0);
    std::vector<int> alpha{2, 1};
    CHECK_THROWS_AS(a.partial(alpha), Error);
}
