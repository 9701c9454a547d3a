#include "aecurv/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace aecurv {

namespace {

std::uint64_t pack(std::span<const std::uint8_t> a, int dim) {
    std::uint64_t key = 0;
    for (int i = 0; i < dim; ++i) key = (key << 4) | a[i];
    return key;
}

void enumerate_rec(int dim, int pos, int remaining, std::array<std::uint8_t, kMaxDim>& cur,
                   std::vector<std::array<std::uint8_t, kMaxDim>>& out) {
    if (pos == dim - 1) {
        cur[pos] = static_cast<std::uint8_t>(remaining);
        out.push_back(cur);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur[pos] = static_cast<std::uint8_t>(v);
        enumerate_rec(dim, pos + 1, remaining - v, cur, out);
    }
}

double binom_int(int a, int b) {
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

JetTables build_tables(int dim) {
    JetTables t;
    t.dim = dim;
    std::array<std::uint8_t, kMaxDim> cur{};
    for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
        enumerate_rec(dim, 0, deg, cur, t.alpha);
        t.count_at[deg] = static_cast<int>(t.alpha.size());
    }
    std::unordered_map<std::uint64_t, std::int32_t> rank;
    rank.reserve(t.alpha.size() * 2);
    for (std::size_t i = 0; i < t.alpha.size(); ++i)
        rank[pack({t.alpha[i].data(), static_cast<std::size_t>(dim)}, dim)] =
            static_cast<std::int32_t>(i);

    // derivative shifts for all alpha of degree < kMaxJetOrder
    const int nshift = t.count_at[kMaxJetOrder - 1];
    t.shift.assign(static_cast<std::size_t>(dim) * nshift, -1);
    for (int var = 0; var < dim; ++var) {
        for (int i = 0; i < nshift; ++i) {
            auto a = t.alpha[static_cast<std::size_t>(i)];
            a[var] += 1;
            t.shift[static_cast<std::size_t>(var) * nshift + i] =
                rank.at(pack({a.data(), static_cast<std::size_t>(dim)}, dim));
        }
    }

    // product terms: for every (a, b) with |alpha_a| + |alpha_b| <= max order,
    // accumulate into target alpha_a + alpha_b with the multinomial coefficient
    // prod_i C(gamma_i, a_i).
    for (std::size_t ia = 0; ia < t.alpha.size(); ++ia) {
        int da = 0;
        for (int i = 0; i < dim; ++i) da += t.alpha[ia][i];
        for (std::size_t ib = 0; ib < t.alpha.size(); ++ib) {
            int db = 0;
            for (int i = 0; i < dim; ++i) db += t.alpha[ib][i];
            if (da + db > kMaxJetOrder) continue;
            std::array<std::uint8_t, kMaxDim> g{};
            double coeff = 1.0;
            for (int i = 0; i < dim; ++i) {
                g[i] = static_cast<std::uint8_t>(t.alpha[ia][i] + t.alpha[ib][i]);
                coeff *= binom_int(g[i], t.alpha[ia][i]);
            }
            JetTables::MulTerm m;
            m.t = rank.at(pack({g.data(), static_cast<std::size_t>(dim)}, dim));
            m.a = static_cast<std::int32_t>(ia);
            m.b = static_cast<std::int32_t>(ib);
            m.c = coeff;
            t.mul.push_back(m);
        }
    }
    std::sort(t.mul.begin(), t.mul.end(), [](const auto& x, const auto& y) {
        if (x.t != y.t) return x.t < y.t;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    for (int k = 0; k <= kMaxJetOrder; ++k) {
        const std::int32_t limit = t.count_at[k];
        auto it = std::upper_bound(t.mul.begin(), t.mul.end(), limit - 1,
                                   [](std::int32_t v, const JetTables::MulTerm& m) { return v < m.t; });
        t.mul_end[k] = static_cast<std::size_t>(it - t.mul.begin());
    }
    return t;
}

} // namespace

int JetTables::index_of(std::span<const int> a) const {
    if (static_cast<int>(a.size()) != dim) return -1;
    int deg = 0;
    for (int v : a) {
        if (v < 0) return -1;
        deg += v;
    }
    if (deg > kMaxJetOrder) return -1;
    for (int i = 0; i < count_at[kMaxJetOrder]; ++i) {
        bool eq = true;
        for (int d = 0; d < dim; ++d)
            if (alpha[static_cast<std::size_t>(i)][d] != a[d]) { eq = false; break; }
        if (eq) return i;
    }
    return -1;
}

const JetTables& JetTables::get(int dim) {
    if (dim < 1 || dim > kMaxDim)
        fail(ErrorKind::order, "jet dimension must be in [1, 8], got " + std::to_string(dim));
    static std::array<JetTables, kMaxDim + 1> cache;
    static std::array<std::once_flag, kMaxDim + 1> flags;
    std::call_once(flags[static_cast<std::size_t>(dim)],
                   [dim] { cache[static_cast<std::size_t>(dim)] = build_tables(dim); });
    return cache[static_cast<std::size_t>(dim)];
}

Jet Jet::constant(int dim, int order, double v) {
    if (order < 0 || order > kMaxJetOrder)
        fail(ErrorKind::order, "jet order must be in [0, 5], got " + std::to_string(order));
    Jet j(dim, order);
    j.c_[0] = v;
    return j;
}

Jet Jet::coordinate(int dim, int order, int var, double value) {
    if (var < 0 || var >= dim)
        fail(ErrorKind::order, "coordinate index out of range");
    Jet j = constant(dim, order, value);
    if (order >= 1) j.c_[static_cast<std::size_t>(1 + var)] = 1.0;
    // graded enumeration puts e_1..e_dim right after the zero index, in the
    // order produced by enumerate_rec: alpha = e_0 first (v descending from 1).
    // enumerate_rec for deg=1 yields e_0, e_1, ..., e_{dim-1}; index 1+var is e_var.
    return j;
}

void Jet::check_match(const Jet& o) const {
    if (dim_ != o.dim_)
        fail(ErrorKind::order, "jet dimension mismatch: " + std::to_string(dim_) + " vs " +
                                   std::to_string(o.dim_));
    if (order_ != o.order_)
        fail(ErrorKind::order, "jet order mismatch: " + std::to_string(order_) + " vs " +
                                   std::to_string(o.order_));
}

double Jet::partial(std::span<const int> a) const {
    const auto& t = JetTables::get(dim_);
    int idx = t.index_of(a);
    if (idx < 0 || idx >= t.count_at[order_])
        fail(ErrorKind::order, "partial request exceeds jet order");
    return c_[static_cast<std::size_t>(idx)];
}

Jet Jet::truncated(int order) const {
    if (order > order_)
        fail(ErrorKind::order, "cannot raise jet order by truncation (" +
                                   std::to_string(order_) + " -> " + std::to_string(order) + ")");
    if (order == order_) return *this;
    Jet r(dim_, order);
    std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
    return r;
}

Jet Jet::derivative(int var) const {
    if (order_ < 1) fail(ErrorKind::order, "derivative of an order-0 jet");
    if (var < 0 || var >= dim_) fail(ErrorKind::order, "derivative index out of range");
    const auto& t = JetTables::get(dim_);
    Jet r(dim_, order_ - 1);
    const int nshift = t.count_at[kMaxJetOrder - 1];
    const std::int32_t* sh = t.shift.data() + static_cast<std::size_t>(var) * nshift;
    for (std::size_t i = 0; i < r.c_.size(); ++i)
        r.c_[i] = c_[static_cast<std::size_t>(sh[i])];
    return r;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    check_match(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    check_match(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
}

Jet operator-(Jet a, double s) {
    a.c_[0] -= s;
    return a;
}

Jet operator-(double s, const Jet& a) {
    Jet r = -a;
    r.c_[0] += s;
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    a.check_match(b);
    const auto& t = JetTables::get(a.dim_);
    Jet r(a.dim_, a.order_);
    const std::size_t nterms = t.mul_end[a.order_];
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    double* pr = r.c_.data();
    for (std::size_t i = 0; i < nterms; ++i) {
        const auto& m = t.mul[i];
        pr[m.t] += m.c * pa[m.a] * pb[m.b];
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    return a * jet_reciprocal(b);
}

double Jet::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

Jet jet_compose(const Jet& inner, std::span<const double> derivs) {
    const int K = inner.order();
    if (static_cast<int>(derivs.size()) < K + 1)
        fail(ErrorKind::order, "compose needs order+1 outer derivatives");
    Jet w = inner;
    w.c_[0] = 0.0;
    double fact = 1.0;
    std::array<double, kMaxJetOrder + 1> taylor{};
    for (int k = 0; k <= K; ++k) {
        taylor[static_cast<std::size_t>(k)] = derivs[static_cast<std::size_t>(k)] / fact;
        fact *= (k + 1);
    }
    Jet res = Jet::constant(inner.dim(), K, taylor[static_cast<std::size_t>(K)]);
    for (int k = K - 1; k >= 0; --k)
        res = res * w + taylor[static_cast<std::size_t>(k)];
    return res;
}

Jet jet_reciprocal(const Jet& a) {
    const double v = a.value();
    if (v == 0.0) fail(ErrorKind::domain, "reciprocal of a jet with zero value");
    std::array<double, kMaxJetOrder + 1> d{};
    double cur = 1.0 / v, fact = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        d[static_cast<std::size_t>(k)] = fact * cur;
        fact *= -(k + 1);
        cur /= v;
    }
    return jet_compose(a, {d.data(), static_cast<std::size_t>(a.order() + 1)});
}

Jet jet_sqrt(const Jet& a) {
    const double v = a.value();
    if (v <= 0.0) fail(ErrorKind::domain, "sqrt of a jet with non-positive value");
    std::array<double, kMaxJetOrder + 1> d{};
    double coef = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        d[static_cast<std::size_t>(k)] = coef * std::pow(v, 0.5 - k);
        coef *= (0.5 - k);
    }
    return jet_compose(a, {d.data(), static_cast<std::size_t>(a.order() + 1)});
}

Jet jet_exp(const Jet& a) {
    std::array<double, kMaxJetOrder + 1> d{};
    const double e = std::exp(a.value());
    for (int k = 0; k <= a.order(); ++k) d[static_cast<std::size_t>(k)] = e;
    return jet_compose(a, {d.data(), static_cast<std::size_t>(a.order() + 1)});
}

Jet jet_log(const Jet& a) {
    const double v = a.value();
    if (v <= 0.0) fail(ErrorKind::domain, "log of a jet with non-positive value");
    std::array<double, kMaxJetOrder + 1> d{};
    d[0] = std::log(v);
    double cur = 1.0 / v, fact = 1.0;
    for (int k = 1; k <= a.order(); ++k) {
        d[static_cast<std::size_t>(k)] = fact * cur;
        fact *= -k;
        cur /= v;
    }
    return jet_compose(a, {d.data(), static_cast<std::size_t>(a.order() + 1)});
}

Jet jet_pow(const Jet& a, double p) {
    const bool integral = std::nearbyint(p) == p && std::abs(p) <= 32.0;
    if (integral) {
        const int ip = static_cast<int>(p);
        if (ip == 0) return Jet::constant(a.dim(), a.order(), 1.0);
        Jet base = ip > 0 ? a : jet_reciprocal(a);
        Jet r = base;
        for (int i = 1; i < std::abs(ip); ++i) r = r * base;
        return r;
    }
    const double v = a.value();
    if (v <= 0.0)
        fail(ErrorKind::domain, "pow with non-integer exponent requires positive base value");
    std::array<double, kMaxJetOrder + 1> d{};
    double coef = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        d[static_cast<std::size_t>(k)] = coef * std::pow(v, p - k);
        coef *= (p - k);
    }
    return jet_compose(a, {d.data(), static_cast<std::size_t>(a.order() + 1)});
}

} // namespace aecurv
