#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dyadic {

using Int = boost::multiprecision::cpp_int;

inline Int pow2(long e) {
    if (e < 0) throw std::domain_error("pow2: negative exponent");
    return Int(1) << static_cast<unsigned>(e);
}

// 2-adic valuation of a nonzero integer.
inline long v2_int(const Int& x) {
    if (x == 0) throw std::domain_error("v2_int: zero has no finite valuation");
    return static_cast<long>(boost::multiprecision::lsb(boost::multiprecision::abs(x)));
}

// Inverse of an odd integer modulo 2^bits, by Newton doubling.
inline Int inv_mod_pow2(const Int& u, long bits) {
    if (bits <= 0) return Int(0);
    if ((u & 1) == 0) throw std::domain_error("inv_mod_pow2: even unit");
    Int x = 1;
    for (long have = 1; have < bits; have *= 2) {
        long next = std::min(2 * have, bits);
        Int mask = pow2(next) - 1;
        x = (x * (2 - ((u & mask) * x & mask))) & mask;
    }
    return x & (pow2(bits) - 1);
}

/**
 * Exponent of a 2-adic absolute value: an integer value v meaning |x| = 2^{-v},
 * or +infinity for x = 0. Total order has the infinite element largest.
 */
struct ValExp {
    long v = 0;
    bool infinite = false;

    ValExp() = default;
    ValExp(long value) : v(value) {}
    static ValExp inf() {
        ValExp e;
        e.infinite = true;
        return e;
    }

    bool is_finite() const { return !infinite; }
    long finite() const {
        if (infinite) throw std::domain_error("ValExp: infinite valuation");
        return v;
    }

    friend bool operator==(const ValExp& a, const ValExp& b) {
        return a.infinite == b.infinite && (a.infinite || a.v == b.v);
    }
    friend bool operator<(const ValExp& a, const ValExp& b) {
        if (a.infinite) return false;
        if (b.infinite) return true;
        return a.v < b.v;
    }
    friend bool operator<=(const ValExp& a, const ValExp& b) { return a < b || a == b; }
    friend bool operator>(const ValExp& a, const ValExp& b) { return b < a; }
    friend bool operator>=(const ValExp& a, const ValExp& b) { return b <= a; }
    friend ValExp operator+(const ValExp& a, const ValExp& b) {
        if (a.infinite || b.infinite) return inf();
        return ValExp(a.v + b.v);
    }
    friend ValExp operator+(const ValExp& a, long b) { return a.infinite ? inf() : ValExp(a.v + b); }

    std::string to_string() const { return infinite ? std::string("inf") : std::to_string(v); }
};

inline ValExp min(const ValExp& a, const ValExp& b) { return a < b ? a : b; }

/**
 * Exact rational number with its 2-adic valuation cached on construction.
 *
 * Invariants: gcd(num, den) = 1, den > 0, and val = v2(num) - v2(den)
 * (meaningful only when num != 0). The normalized absolute value is
 * |x| = 2^{-val}.
 */
class Rational2 {
public:
    Rational2() : num_(0), den_(1), val_(0) {}
    Rational2(long n) : num_(n), den_(1) { cache_val(); }
    Rational2(Int n) : num_(std::move(n)), den_(1) { cache_val(); }
    Rational2(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_ == 0) throw std::domain_error("Rational2: zero denominator");
        normalize();
    }

    static Rational2 from_string(std::string_view s);

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    // true iff x lies in Z_2 (odd denominator)
    bool is_2integral() const { return num_ == 0 || val_ >= 0; }

    ValExp val2() const { return num_ == 0 ? ValExp::inf() : ValExp(val_); }

    friend Rational2 operator+(const Rational2& a, const Rational2& b) {
        return Rational2(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational2 operator-(const Rational2& a, const Rational2& b) {
        return Rational2(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational2 operator*(const Rational2& a, const Rational2& b) {
        return Rational2(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational2 operator/(const Rational2& a, const Rational2& b) {
        if (b.num_ == 0) throw std::domain_error("Rational2: division by zero");
        return Rational2(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational2 operator-() const {
        Rational2 r(*this);
        r.num_ = -r.num_;
        return r;
    }
    Rational2& operator+=(const Rational2& o) { return *this = *this + o; }
    Rational2& operator-=(const Rational2& o) { return *this = *this - o; }
    Rational2& operator*=(const Rational2& o) { return *this = *this * o; }

    friend bool operator==(const Rational2& a, const Rational2& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational2& a, const Rational2& b) { return !(a == b); }
    // total order usable as a container key (not the 2-adic order)
    friend bool operator<(const Rational2& a, const Rational2& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }

    // x * 2^e for any integer e
    Rational2 scale_pow2(long e) const {
        if (num_ == 0) return Rational2();
        if (e >= 0) return Rational2(num_ * pow2(e), den_);
        return Rational2(num_, den_ * pow2(-e));
    }

    Rational2 pow(long k) const {
        if (k < 0) throw std::domain_error("Rational2::pow: negative exponent");
        Rational2 r(1), b(*this);
        while (k) {
            if (k & 1) r *= b;
            b *= b;
            k >>= 1;
        }
        return r;
    }

    // Canonical representative of x mod 2^r. For v2(x) = -m < 0 the
    // representative lives in 2^{-m} * [0, 2^{r+m}); for 2-integral x it is the
    // usual residue in [0, 2^r). Returns 0 when the modulus covers everything.
    Rational2 canonical_residue(long r) const {
        if (num_ == 0) return Rational2();
        long m = val_ < 0 ? -val_ : 0;
        long bits = r + m;
        if (bits <= 0) return Rational2();
        Rational2 y = scale_pow2(m);  // 2-integral, odd denominator
        Int mod = pow2(bits);
        Int rep = ((y.num_ % mod) + mod) % mod;
        if (y.den_ != 1) rep = rep * inv_mod_pow2(y.den_, bits) % mod;
        return Rational2(rep, 1).scale_pow2(-m);
    }

    // total size in bits, used by the orbit height cap
    long height_bits() const {
        namespace mp = boost::multiprecision;
        long nb = num_ == 0 ? 1 : static_cast<long>(mp::msb(mp::abs(num_))) + 1;
        long db = static_cast<long>(mp::msb(den_)) + 1;
        return nb + db;
    }

    std::string to_string() const {
        std::string s = num_.str();
        if (den_ != 1) s += "/" + den_.str();
        return s;
    }

private:
    void normalize() {
        if (num_ == 0) {
            den_ = 1;
            val_ = 0;
            return;
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Int g = boost::multiprecision::gcd(boost::multiprecision::abs(num_), den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        cache_val();
    }
    void cache_val() {
        if (num_ == 0) {
            val_ = 0;
            return;
        }
        val_ = (num_ & 1) != 0 ? 0 : v2_int(num_);
        if ((den_ & 1) == 0) val_ -= v2_int(den_);
    }

    Int num_;
    Int den_;
    long val_ = 0;
};

inline ValExp val2(const Rational2& x) { return x.val2(); }

// z ≡ a mod 2^r, i.e. membership in the closed disk of radius 2^{-r} around a.
inline bool congruent(const Rational2& x, const Rational2& y, long r) {
    return val2(x - y) >= ValExp(r);
}

inline Rational2 Rational2::from_string(std::string_view s) {
    auto bad = [&] { throw std::invalid_argument("malformed rational literal: " + std::string(s)); };
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) bad();
    Int n(std::string(s.substr(start, i - start)));
    Int d = 1;
    if (i < s.size()) {
        if (s[i] != '/') bad();
        ++i;
        size_t dstart = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == dstart || i != s.size()) bad();
        d = Int(std::string(s.substr(dstart, i - dstart)));
        if (d == 0) bad();
    }
    return Rational2(neg ? -n : n, d);
}

}  // namespace dyadic
