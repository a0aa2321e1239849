#pragma once

#include "dyadic/padic2.hpp"
#include "dyadic/rational2.hpp"

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dyadic {

/**
 * Dense univariate polynomial over Rational2. Trailing zero coefficients are
 * stripped; the zero polynomial has an empty coefficient vector (degree -1 as
 * a sentinel for "minus infinity").
 */
class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<Rational2> coeffs) : c_(coeffs) { strip(); }
    explicit Poly(std::vector<Rational2> coeffs) : c_(std::move(coeffs)) { strip(); }

    static Poly constant(const Rational2& c) { return Poly({c}); }
    static Poly identity() { return Poly({Rational2(0), Rational2(1)}); }

    const std::vector<Rational2>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    Rational2 coeff(size_t i) const { return i < c_.size() ? c_[i] : Rational2(); }

    Rational2 eval(const Rational2& x) const {
        Rational2 r;
        for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    Padic2 eval(const Padic2& x, long prec) const {
        Padic2 r = Padic2::exact_zero();
        for (size_t i = c_.size(); i-- > 0;) r = r * x + trunc(c_[i], prec);
        return r;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<Rational2> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Rational2(static_cast<long>(i));
        return Poly(std::move(d));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Rational2> r(std::max(a.c_.size(), b.c_.size()));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<Rational2> r(std::max(a.c_.size(), b.c_.size()));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<Rational2> r(a.c_.size() + b.c_.size() - 1);
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(r));
    }
    friend Poly operator*(const Rational2& s, const Poly& p) {
        std::vector<Rational2> r(p.c_);
        for (auto& x : r) x *= s;
        return Poly(std::move(r));
    }
    Poly operator-() const { return Rational2(-1) * *this; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    // q with q(x) = p(a + x), by repeated synthetic division by (x - a);
    // coefficient k of the result is p^{(k)}(a)/k!, computed without factorials.
    Poly taylor_shift(const Rational2& a) const {
        std::vector<Rational2> b(c_);
        size_t n = b.size();
        for (size_t i = 0; i + 1 < n; ++i)
            for (size_t j = n - 1; j-- > i;) b[j] += a * b[j + 1];
        return Poly(std::move(b));
    }

    // p(q(x)), Horner on polynomials
    Poly compose(const Poly& q) const {
        Poly r;
        for (size_t i = c_.size(); i-- > 0;) r = r * q + Poly::constant(c_[i]);
        return r;
    }

    // exact division; returns nullopt when the remainder is nonzero
    std::optional<Poly> divide_exact(const Poly& d) const {
        if (d.is_zero()) throw std::domain_error("Poly: division by zero polynomial");
        if (is_zero()) return Poly();
        if (degree() < d.degree()) return std::nullopt;
        std::vector<Rational2> rem(c_);
        std::vector<Rational2> quot(c_.size() - d.c_.size() + 1);
        const Rational2& lead = d.c_.back();
        for (size_t i = quot.size(); i-- > 0;) {
            Rational2 q = rem[i + d.c_.size() - 1] / lead;
            quot[i] = q;
            if (!q.is_zero())
                for (size_t j = 0; j < d.c_.size(); ++j) rem[i + j] -= q * d.c_[j];
        }
        for (const auto& r : rem)
            if (!r.is_zero()) return std::nullopt;
        return Poly(std::move(quot));
    }

    std::string to_string(const std::string& var = "z") const {
        if (c_.empty()) return "0";
        std::string s;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += c_[i].to_string();
            if (i >= 1) s += "*" + var + (i > 1 ? "^" + std::to_string(i) : "");
        }
        return s;
    }

private:
    void strip() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    std::vector<Rational2> c_;
};

/**
 * One member of the cubic family 3t z^3 - (9/2)t z^2 + 1. Critical points are
 * 0 and 1 with the single critical orbit starting at f(0) = 1.
 */
struct FamilyMember {
    Rational2 t;
    Poly poly;

    explicit FamilyMember(Rational2 param)
        : t(std::move(param)),
          poly({Rational2(1), Rational2(0), Rational2(-9, 2) * t, Rational2(3) * t}) {}

    Rational2 operator()(const Rational2& z) const { return poly.eval(z); }
};

inline FamilyMember family_member(const Rational2& t) { return FamilyMember(t); }

// Critical-orbit parameter polynomial g_n(s) = f_{s+1}^n(0), built by the
// recurrence g_1 = 1, g_{m+1} = 3(s+1) g^3 - (9/2)(s+1) g^2 + 1. Degrees obey
// deg g_{m+1} = 3 deg g_m + 1 (so 0, 1, 4, 13, 40, 121, ...).
inline Poly build_gn(long n) {
    if (n < 1) throw std::domain_error("build_gn: n must be >= 1");
    Poly g = Poly::constant(Rational2(1));
    Poly s1({Rational2(1), Rational2(1)});  // s + 1
    for (long m = 1; m < n; ++m) {
        Poly g2 = g * g;
        Poly g3 = g2 * g;
        g = Rational2(3) * (s1 * g3) - Rational2(9, 2) * (s1 * g2) + Poly::constant(Rational2(1));
    }
    return g;
}

struct GaussPoint {
    long index;
    long val;
    friend bool operator==(const GaussPoint&, const GaussPoint&) = default;
};

// (i, v2(coeff_i)) for every nonzero coefficient, the Newton polygon input.
inline std::vector<GaussPoint> gauss_valuations(const Poly& p) {
    std::vector<GaussPoint> pts;
    const auto& c = p.coeffs();
    for (size_t i = 0; i < c.size(); ++i)
        if (!c[i].is_zero()) pts.push_back({static_cast<long>(i), c[i].val2().finite()});
    return pts;
}

}  // namespace dyadic
