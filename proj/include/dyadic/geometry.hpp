#pragma once

#include "dyadic/poly.hpp"
#include "dyadic/rational2.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyadic {

/**
 * Closed 2-adic disk D(center, 2^{-rexp}). Membership is the congruence
 * z ≡ center mod 2^rexp; any member is an equally valid center, so equality
 * compares canonical residues.
 */
struct Disk {
    Rational2 center;
    long rexp = 0;

    Disk() = default;
    Disk(Rational2 c, long r) : center(std::move(c)), rexp(r) {}

    bool contains(const Rational2& z) const { return congruent(z, center, rexp); }
    bool contains(const Disk& d) const { return d.rexp >= rexp && contains(d.center); }

    Disk canonical() const { return Disk(center.canonical_residue(rexp), rexp); }

    // the two residue sub-disks at radius 2^{-(rexp+1)}
    std::pair<Disk, Disk> split() const {
        return {Disk(center, rexp + 1), Disk(center + Rational2(1).scale_pow2(rexp), rexp + 1)};
    }

    // every element of the disk has this exact valuation, when the center
    // dominates the radius; otherwise the valuation varies over the disk
    std::optional<long> uniform_valuation() const {
        if (!center.is_zero() && center.val2() < ValExp(rexp)) return center.val2().finite();
        return std::nullopt;
    }

    friend bool operator==(const Disk& a, const Disk& b) {
        return a.rexp == b.rexp && congruent(a.center, b.center, a.rexp);
    }
    friend bool operator!=(const Disk& a, const Disk& b) { return !(a == b); }

    std::string to_string() const { return center.to_string() + ":" + std::to_string(rexp); }

    static Disk from_string(std::string_view s) {
        auto pos = s.rfind(':');
        if (pos == std::string_view::npos)
            throw std::invalid_argument("disk literal must be center:radius-exponent");
        return Disk(Rational2::from_string(s.substr(0, pos)),
                    std::stol(std::string(s.substr(pos + 1))));
    }
};

/** Exact fraction used for Newton polygon slopes (plain rational order). */
struct Slope {
    long num = 0;
    long den = 1;

    Slope() = default;
    Slope(long n, long d) : num(n), den(d) {
        if (den == 0) throw std::domain_error("Slope: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    friend bool operator==(const Slope&, const Slope&) = default;
    friend bool operator<(const Slope& a, const Slope& b) { return a.num * b.den < b.num * a.den; }
    bool is_integer() const { return den == 1; }
    std::string to_string() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

/**
 * Lower convex hull of the coefficient valuation points (i, v2(a_i)). A
 * segment of slope s and horizontal length l certifies exactly l roots of
 * valuation -s over C_2, counted with multiplicity.
 */
struct NewtonPolygon {
    std::vector<GaussPoint> vertices;  // strict hull vertices, indices increasing
    struct Segment {
        Slope slope;
        long length;
        friend bool operator==(const Segment&, const Segment&) = default;
    };
    std::vector<Segment> segments;  // slopes strictly increasing

    // (root valuation, multiplicity), left to right
    std::vector<std::pair<Slope, long>> root_valuations() const {
        std::vector<std::pair<Slope, long>> r;
        for (const auto& s : segments) r.push_back({Slope(-s.slope.num, s.slope.den), s.length});
        return r;
    }
};

inline NewtonPolygon newton_polygon(const Poly& p) {
    if (p.is_zero()) throw std::domain_error("newton_polygon: zero polynomial");
    std::vector<GaussPoint> pts = gauss_valuations(p);
    // lower hull, monotone chain; collinear middle points are not vertices
    std::vector<GaussPoint> hull;
    for (const auto& q : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // cross product of (b-a) x (q-a); keep only strictly convex turns
            Int cross = Int(b.index - a.index) * (q.val - a.val) - Int(b.val - a.val) * (q.index - a.index);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    NewtonPolygon np;
    np.vertices = std::move(hull);
    for (size_t i = 0; i + 1 < np.vertices.size(); ++i) {
        const auto& a = np.vertices[i];
        const auto& b = np.vertices[i + 1];
        np.segments.push_back({Slope(b.val - a.val, b.index - a.index), b.index - a.index});
    }
    return np;
}

/**
 * Image of a closed disk under a polynomial, read off the Taylor expansion at
 * the center: radius exponent = min_{k>=1} (v2(c_k) + k*rexp). Over C_2 this
 * is the exact image disk; over Q_2 it is a certified superset.
 */
struct DiskImage {
    Disk disk;
    bool exact_over_c2 = true;
    std::vector<std::pair<long, long>> term_exponents;  // (k, v2(c_k) + k*rexp)
};

inline DiskImage disk_image(const Poly& p, const Disk& d) {
    if (p.degree() < 1) throw std::domain_error("disk_image: constant polynomial has a degenerate image");
    Poly sh = p.taylor_shift(d.center);
    DiskImage out;
    ValExp rad = ValExp::inf();
    for (long k = 1; k <= sh.degree(); ++k) {
        Rational2 ck = sh.coeff(static_cast<size_t>(k));
        if (ck.is_zero()) continue;
        long e = ck.val2().finite() + k * d.rexp;
        out.term_exponents.push_back({k, e});
        rad = min(rad, ValExp(e));
    }
    out.disk = Disk(sh.coeff(0), rad.finite());
    return out;
}

// sup over the disk (in C_2) of |p(z)|, returned as the valuation exponent e
// with sup = 2^{-e}; +infinity for the zero polynomial.
inline ValExp disk_sup_norm(const Poly& p, const Disk& d) {
    if (p.is_zero()) return ValExp::inf();
    Poly sh = p.taylor_shift(d.center);
    ValExp e = ValExp::inf();
    for (long k = 0; k <= sh.degree(); ++k) {
        Rational2 ck = sh.coeff(static_cast<size_t>(k));
        if (ck.is_zero()) continue;
        e = min(e, ValExp(ck.val2().finite() + k * d.rexp));
    }
    return e;
}

/**
 * Decision of "h(k) ≡ 0 mod 2^r for every k in Z_2" by finite differences:
 * h maps Z_2 into 2^r Z_2 iff every iterated difference Δ^j h(0) has
 * valuation >= r (the binomial coefficients form an orthonormal basis for
 * continuous functions on Z_2). On failure a concrete integer witness is
 * produced.
 */
struct CongruenceCheck {
    bool holds = false;
    long r = 0;
    std::vector<std::pair<long, ValExp>> difference_valuations;  // (j, v2(Δ^j h(0)))
    std::optional<long> failing_j;
    std::optional<Int> witness_k;
    std::optional<Rational2> witness_value;  // h(witness_k), with v2 < r
};

inline CongruenceCheck z2_congruence_check(const Poly& h, long r) {
    CongruenceCheck out;
    out.r = r;
    long d = std::max<long>(h.degree(), 0);
    // clear the dyadic denominator so differences run over 2-integral data
    long m = 0;
    for (const auto& c : h.coeffs())
        if (!c.is_zero()) m = std::max(m, -std::min(0L, c.val2().finite()));
    Poly hc = Rational2(1).scale_pow2(m) * h;
    long rc = r + m;

    std::vector<Rational2> row;
    for (long k = 0; k <= d; ++k) row.push_back(hc.eval(Rational2(k)));
    bool ok = true;
    for (long j = 0; j <= d; ++j) {
        ValExp v = row.front().val2();
        ValExp v_orig = v.is_finite() ? ValExp(v.finite() - m) : v;
        out.difference_valuations.push_back({j, v_orig});
        if (v < ValExp(rc)) {
            ok = false;
            if (!out.failing_j) out.failing_j = j;
        }
        for (size_t i = 0; i + 1 < row.size(); ++i) row[i] = row[i + 1] - row[i];
        row.pop_back();
    }
    out.holds = ok;
    if (!ok) {
        // Binary descent to a concrete witness: if sup |p| over Z_2 exceeds
        // 2^{-rc}, the same holds on at least one of the sub-progressions
        // 2k and 2k+1, and restriction multiplies the j-th difference by a
        // factor divisible by 2^j, so the failure eventually sits in the
        // constant term.
        auto fails = [&](const Poly& p) {
            long dp = std::max<long>(p.degree(), 0);
            std::vector<Rational2> w;
            for (long k = 0; k <= dp; ++k) w.push_back(p.eval(Rational2(k)));
            for (long j = 0; j <= dp; ++j) {
                if (w.front().val2() < ValExp(rc)) return true;
                for (size_t i = 0; i + 1 < w.size(); ++i) w[i] = w[i + 1] - w[i];
                w.pop_back();
            }
            return false;
        };
        Int k0 = 0;
        Poly p = hc;
        for (long b = 0; b < rc + 2 * d + 8; ++b) {
            if (p.eval(Rational2(0)).val2() < ValExp(rc)) break;
            Poly even = p.compose(Poly({Rational2(0), Rational2(2)}));
            if (fails(even)) {
                p = std::move(even);
            } else {
                p = p.compose(Poly({Rational2(1), Rational2(2)}));
                k0 += pow2(b);
            }
        }
        out.witness_k = k0;
        out.witness_value = h.eval(Rational2(k0));
    }
    return out;
}

/**
 * Certificate that f maps every Q_2 point of src into tgt, i.e. that
 * h(k) = f(src.center + 2^{src.rexp} k) - tgt.center ≡ 0 mod 2^{tgt.rexp}
 * for all k in Z_2. A false verdict carries a witness point of src.
 */
struct MapCertificate {
    Disk source;
    Disk target;
    bool certified = false;
    CongruenceCheck check;
    std::optional<Rational2> witness_point;
};

inline MapCertificate residue_disk_map(const Poly& f, const Disk& src, const Disk& tgt) {
    MapCertificate cert;
    cert.source = src;
    cert.target = tgt;
    Poly param({src.center, Rational2(1).scale_pow2(src.rexp)});  // z(k) = c + 2^rexp k
    Poly h = f.compose(param) - Poly::constant(tgt.center);
    cert.check = z2_congruence_check(h, tgt.rexp);
    cert.certified = cert.check.holds;
    if (!cert.certified && cert.check.witness_k)
        cert.witness_point = src.center + Rational2(*cert.check.witness_k).scale_pow2(src.rexp);
    return cert;
}

}  // namespace dyadic
