#pragma once

#include "dyadic/rational2.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

namespace dyadic {

struct precision_exhausted_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Truncated 2-adic number: the ball 2^val * (unit + 2^prec * Z_2) with the
 * valuation exact and the odd unit known modulo 2^prec. Every arithmetic
 * result is a ball guaranteed to contain the exact result; cancellation in
 * sums shows up as reduced precision, and a total cancellation collapses to a
 * "zero at this absolute precision" ball 2^floor * Z_2 rather than silently
 * pretending a valuation is known.
 */
class Padic2 {
public:
    enum class Kind { exact_zero, zero_to_prec, regular };

    Padic2() : kind_(Kind::exact_zero) {}

    static Padic2 exact_zero() { return Padic2(); }

    // the ball 2^floor * Z_2: indistinguishable from 0 below 2^floor
    static Padic2 zero_at(long abs_floor) {
        Padic2 x;
        x.kind_ = Kind::zero_to_prec;
        x.val_ = abs_floor;
        return x;
    }

    static Padic2 regular(long val, Int unit, long prec) {
        if (prec <= 0) return zero_at(val);
        Padic2 x;
        x.kind_ = Kind::regular;
        x.val_ = val;
        x.prec_ = prec;
        x.unit_ = std::move(unit);
        x.reduce_unit();
        return x;
    }

    // trunc: the ball containing x at relative precision `prec`
    static Padic2 from_rational(const Rational2& x, long prec) {
        if (x.is_zero()) return exact_zero();
        if (prec <= 0) throw std::domain_error("Padic2: nonpositive precision");
        long v = x.val2().finite();
        Rational2 u = x.scale_pow2(-v);  // odd/odd unit
        Int mod = pow2(prec);
        Int rep = ((u.num() % mod) + mod) % mod;
        if (u.den() != 1) rep = rep * inv_mod_pow2(u.den(), prec) % mod;
        return regular(v, rep, prec);
    }

    Kind kind() const { return kind_; }
    bool is_exact_zero() const { return kind_ == Kind::exact_zero; }
    bool is_zero_to_prec() const { return kind_ != Kind::regular; }

    // exact valuation, when known
    std::optional<long> val() const {
        if (kind_ == Kind::regular) return val_;
        return std::nullopt;
    }
    // lower bound for the valuation of every element of the ball
    ValExp val_floor() const {
        if (kind_ == Kind::exact_zero) return ValExp::inf();
        return ValExp(val_);
    }
    const Int& unit() const {
        if (kind_ != Kind::regular) throw std::domain_error("Padic2::unit: no unit on a zero ball");
        return unit_;
    }
    long prec() const { return kind_ == Kind::regular ? prec_ : 0; }
    // absolute precision: the ball is (known value) + 2^{abs_prec} * Z_2
    ValExp abs_prec() const {
        if (kind_ == Kind::exact_zero) return ValExp::inf();
        if (kind_ == Kind::zero_to_prec) return ValExp(val_);
        return ValExp(val_ + prec_);
    }

    // value modulo 2^r as a canonical 2-integral pair (num, scale): defined
    // when the ball determines the residue, i.e. abs_prec >= r >= ... callers
    // use residue_known to test decidability first.
    bool residue_known(long r) const { return abs_prec() >= ValExp(r); }

    friend Padic2 operator+(const Padic2& a, const Padic2& b) {
        if (a.kind_ == Kind::exact_zero) return b;
        if (b.kind_ == Kind::exact_zero) return a;
        if (a.kind_ == Kind::zero_to_prec || b.kind_ == Kind::zero_to_prec) {
            long floor = std::min(a.abs_prec().finite(), b.abs_prec().finite());
            const Padic2& reg = a.kind_ == Kind::regular ? a : b;
            if (reg.kind_ != Kind::regular || reg.val_ >= floor) return zero_at(floor);
            return regular(reg.val_, reg.unit_, floor - reg.val_);
        }
        long va = a.val_, vb = b.val_;
        if (va > vb) return b + a;
        long abs_cap = std::min(va + a.prec_, vb + b.prec_);
        long rel = abs_cap - va;
        if (rel <= 0) return zero_at(abs_cap);
        Int mask = pow2(rel) - 1;
        Int s = (a.unit_ + ((vb - va) >= rel ? Int(0) : (b.unit_ << static_cast<unsigned>(vb - va)))) & mask;
        if (s == 0) return zero_at(abs_cap);
        long tz = v2_int(s);
        if (tz >= rel) return zero_at(abs_cap);
        return regular(va + tz, s >> static_cast<unsigned>(tz), rel - tz);
    }
    friend Padic2 operator-(const Padic2& a, const Padic2& b) { return a + (-b); }
    Padic2 operator-() const {
        if (kind_ != Kind::regular) return *this;
        return regular(val_, pow2(prec_) - unit_, prec_);
    }

    friend Padic2 operator*(const Padic2& a, const Padic2& b) {
        if (a.kind_ == Kind::exact_zero || b.kind_ == Kind::exact_zero) return exact_zero();
        if (a.kind_ == Kind::zero_to_prec || b.kind_ == Kind::zero_to_prec) {
            // 2^m Z_2 * 2^v(u + ...) ⊆ 2^{m+v} Z_2
            return zero_at(a.val_ + b.val_);
        }
        long prec = std::min(a.prec_, b.prec_);
        return regular(a.val_ + b.val_, (a.unit_ * b.unit_) & (pow2(prec) - 1), prec);
    }

    friend Padic2 operator/(const Padic2& a, const Padic2& b) {
        if (b.kind_ != Kind::regular)
            throw precision_exhausted_error("Padic2: division by a ball containing 0");
        if (a.kind_ == Kind::exact_zero) return exact_zero();
        if (a.kind_ == Kind::zero_to_prec) return zero_at(a.val_ - b.val_);
        long prec = std::min(a.prec_, b.prec_);
        Int inv = inv_mod_pow2(b.unit_, prec);
        return regular(a.val_ - b.val_, (a.unit_ * inv) & (pow2(prec) - 1), prec);
    }

    Padic2& operator+=(const Padic2& o) { return *this = *this + o; }
    Padic2& operator*=(const Padic2& o) { return *this = *this * o; }

    // same ball, exactly
    friend bool operator==(const Padic2& a, const Padic2& b) {
        if (a.kind_ != b.kind_) return false;
        if (a.kind_ == Kind::exact_zero) return true;
        if (a.kind_ == Kind::zero_to_prec) return a.val_ == b.val_;
        return a.val_ == b.val_ && a.prec_ == b.prec_ && a.unit_ == b.unit_;
    }

    // true iff the exact rational lies inside this ball
    bool contains(const Rational2& x) const {
        if (kind_ == Kind::exact_zero) return x.is_zero();
        if (kind_ == Kind::zero_to_prec) return x.val2() >= ValExp(val_);
        if (x.is_zero() || x.val2() != ValExp(val_)) return false;
        Rational2 u = x.scale_pow2(-val_);
        Int mod = pow2(prec_);
        Int rep = ((u.num() % mod) + mod) % mod;
        if (u.den() != 1) rep = rep * inv_mod_pow2(u.den(), prec_) % mod;
        return rep == unit_;
    }

    // forget precision beyond `prec` relative bits
    Padic2 capped(long prec) const {
        if (kind_ != Kind::regular || prec_ <= prec) return *this;
        return regular(val_, unit_ & (pow2(prec) - 1), prec);
    }

    std::string to_string() const {
        if (kind_ == Kind::exact_zero) return "0";
        if (kind_ == Kind::zero_to_prec) return "O(2^" + std::to_string(val_) + ")";
        return unit_.str() + "*2^" + std::to_string(val_) + " + O(2^" + std::to_string(val_ + prec_) + ")";
    }

private:
    void reduce_unit() {
        Int mask = pow2(prec_) - 1;
        unit_ &= mask;
        if (unit_ == 0) {
            // not actually a unit: demote
            kind_ = Kind::zero_to_prec;
            val_ = val_ + prec_;
            return;
        }
        if ((unit_ & 1) == 0) {
            long tz = v2_int(unit_);
            val_ += tz;
            prec_ -= tz;
            unit_ >>= static_cast<unsigned>(tz);
            if (prec_ <= 0) {
                kind_ = Kind::zero_to_prec;
                val_ += prec_;  // == original abs cap
            }
        }
    }

    Kind kind_;
    long val_ = 0;   // regular: valuation; zero_to_prec: absolute floor
    long prec_ = 0;  // regular only: relative precision in bits
    Int unit_;       // regular only: odd, in [1, 2^prec)
};

inline Padic2 trunc(const Rational2& x, long prec) { return Padic2::from_rational(x, prec); }

}  // namespace dyadic
