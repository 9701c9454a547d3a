#pragma once

// Truncated multivariate jets: raw partial derivatives d^alpha f stored
// densely over all multi-indices |alpha| <= order, order <= 5, dim <= 8.
// Multi-indices are enumerated in graded order, so the coefficients of an
// order-k jet are a prefix of the order-5 enumeration and truncation is a
// copy of that prefix.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "aecurv/errors.hpp"

namespace aecurv {

inline constexpr int kMaxJetOrder = 5;
inline constexpr int kMaxDim = 8;

// Per-dimension lookup tables shared by all jets of that dimension.
struct JetTables {
    int dim = 0;
    // alphas, graded-lexicographic; alphas with degree <= k occupy [0, count_at[k]).
    std::vector<std::array<std::uint8_t, kMaxDim>> alpha;
    std::array<int, kMaxJetOrder + 1> count_at{};
    // derivative shift: shift[var * count_at[order-1] slots]: index of alpha + e_var,
    // defined for all alpha with |alpha| < kMaxJetOrder.
    std::vector<std::int32_t> shift; // shift[var * count_at[kMaxJetOrder-1] + i]
    struct MulTerm {
        std::int32_t t, a, b;
        double c;
    };
    std::vector<MulTerm> mul;                          // sorted by target index
    std::array<std::size_t, kMaxJetOrder + 1> mul_end{}; // #terms with |target| <= k

    int index_of(std::span<const int> a) const; // -1 when absent
    static const JetTables& get(int dim);
};

class Jet {
public:
    Jet() = default;

    static Jet constant(int dim, int order, double v);
    // Coordinate function x_var evaluated at `value`.
    static Jet coordinate(int dim, int order, int var, double value);

    int dim() const { return dim_; }
    int order() const { return order_; }
    double value() const { return c_.empty() ? 0.0 : c_[0]; }
    std::span<const double> coeffs() const { return c_; }
    std::span<double> coeffs() { return c_; }

    // Raw partial d^alpha f; |alpha| must be <= order.
    double partial(std::span<const int> alpha) const;

    Jet truncated(int order) const;
    Jet derivative(int var) const; // raw partials of d_var f, order-1

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator*(Jet a, double s) { a *= s; return a; }
    friend Jet operator*(double s, Jet a) { a *= s; return a; }
    friend Jet operator+(Jet a, double s);
    friend Jet operator+(double s, Jet a) { a += s; return a; }
    friend Jet operator-(Jet a, double s);
    friend Jet operator-(double s, const Jet& a);
    friend Jet operator*(const Jet& a, const Jet& b); // Leibniz convolution
    friend Jet operator/(const Jet& a, const Jet& b);

    double max_abs_coeff() const;

private:
    Jet(int dim, int order) : dim_(dim), order_(order) {
        c_.assign(static_cast<std::size_t>(JetTables::get(dim).count_at[order]), 0.0);
    }
    void check_match(const Jet& o) const;

    int dim_ = 0;
    int order_ = -1;
    std::vector<double> c_;

    friend Jet jet_compose(const Jet&, std::span<const double>);
};

// Composition with a univariate outer function given by its derivative values
// derivs[k] = f^(k)(inner.value()), k = 0..inner.order().
Jet jet_compose(const Jet& inner, std::span<const double> derivs);

Jet jet_reciprocal(const Jet& a);
Jet jet_sqrt(const Jet& a);
Jet jet_exp(const Jet& a);
Jet jet_log(const Jet& a);
// Integer exponents (|p| <= 32) use repeated multiplication and allow any
// nonzero base; other exponents require a positive base value.
Jet jet_pow(const Jet& a, double p);

} // namespace aecurv
