#pragma once

#include "dyadic/geometry.hpp"
#include "dyadic/padic2.hpp"
#include "dyadic/poly.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dyadic {

struct no_convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct wrong_period_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct certification_error : std::runtime_error {
    certification_error(std::string msg, MapCertificate failed)
        : std::runtime_error(std::move(msg)), failed_edge(std::move(failed)) {}
    MapCertificate failed_edge;
};

/**
 * A cyclic chain of residue disks, each edge certified by a finite-difference
 * map certificate, so every Q_2 point of any disk in the chain has a forward
 * orbit confined to the union of the disks. Disks before `cycle_start` form an
 * entry tail; from `cycle_start` on they close into a loop.
 */
struct TrapCertificate {
    std::vector<Disk> disks;
    std::vector<MapCertificate> edges;  // edges[i]: disks[i] -> next disk
    size_t cycle_start = 0;
    Rational2 t;  // parameter the edges were certified at
    // when set, the certificate is additionally valid for every parameter in
    // this disk (perturbation bounded through the sup norm of -2z^3+3z^2)
    std::optional<Disk> t_scope;
    std::string id;

    bool member(const Rational2& z) const {
        for (const auto& d : disks)
            if (d.contains(z)) return true;
        return false;
    }
    bool member(const Disk& d) const {
        for (const auto& trap : disks)
            if (trap.contains(d)) return true;
        return false;
    }
    // membership of a truncated value, decidable only at sufficient precision
    bool member(const Padic2& z, long prec) const {
        for (const auto& d : disks) {
            Padic2 diff = z - trunc_center(d, prec);
            if (diff.val_floor() >= ValExp(d.rexp)) return true;
        }
        return false;
    }

private:
    static Padic2 trunc_center(const Disk& d, long prec) {
        return d.center.is_zero() ? Padic2::exact_zero() : trunc(d.center, prec);
    }
};

/** Append-only library of trap certificates; readers take a snapshot. */
class TrapLibrary {
public:
    using Snapshot = std::shared_ptr<const std::vector<TrapCertificate>>;

    TrapLibrary() : snap_(std::make_shared<std::vector<TrapCertificate>>()) {}

    Snapshot snapshot() const {
        std::lock_guard<std::mutex> lock(mu_);
        return snap_;
    }
    void publish(TrapCertificate cert) {
        std::lock_guard<std::mutex> lock(mu_);
        auto next = std::make_shared<std::vector<TrapCertificate>>(*snap_);
        cert.id = "trap-" + std::to_string(next->size());
        next->push_back(std::move(cert));
        snap_ = std::move(next);
    }

private:
    mutable std::mutex mu_;
    Snapshot snap_;
};

/** Orbit classification of a single point, with the evidence that fired. */
struct OrbitClass {
    enum class Tag { escapes, preperiodic, trapped_q2, unknown };
    Tag tag = Tag::unknown;
    long at_iterate = 0;           // escapes: first certified iterate
    long preperiod = 0, period = 0;
    std::string trap_id;
    long entry_iterate = 0;
    long max_iterates_used = 0;
    std::string diagnostic;
    std::vector<std::string> iterates;  // exact orbit prefix, capped for logs

    bool certified() const { return tag != Tag::unknown; }
    static const char* tag_name(Tag t) {
        switch (t) {
            case Tag::escapes: return "Escapes";
            case Tag::preperiodic: return "Preperiodic";
            case Tag::trapped_q2: return "TrappedQ2";
            default: return "Unknown";
        }
    }
};

struct ClassifyOptions {
    long max_iters = 10000;
    long precision = 128;
    long height_cap_bits = 4096;
    TrapLibrary::Snapshot traps;  // optional; empty means no trap lookup
};

// Certified escape test: once v(z) <= -2 and v(t) + 2 v(z) < 0, the cubic
// term dominates forever and |f^k(z)| grows monotonically. For |t| = 1 this
// is exactly "absolute value greater than 2".
inline bool escape_certified(const ValExp& vt, const ValExp& vz) {
    if (!vz.is_finite()) return false;
    return vz.finite() <= -2 && vt.is_finite() && vt.finite() + 2 * vz.finite() < 0;
}

inline OrbitClass classify_point_orbit(const FamilyMember& f, const Rational2& z0,
                                       const ClassifyOptions& opts = {}) {
    OrbitClass out;
    ValExp vt = f.t.val2();
    auto log_iterate = [&](const Rational2& z) {
        if (out.iterates.size() < 64) out.iterates.push_back(z.to_string());
    };

    // exact phase
    std::map<std::pair<Int, Int>, long> seen;
    Rational2 z = z0;
    long i = 0;
    bool truncated = false;
    for (; i <= opts.max_iters; ++i) {
        log_iterate(z);
        if (escape_certified(vt, z.val2())) {
            out.tag = OrbitClass::Tag::escapes;
            out.at_iterate = i;
            out.max_iterates_used = i;
            return out;
        }
        if (opts.traps) {
            for (const auto& trap : *opts.traps) {
                if ((trap.t_scope ? trap.t_scope->contains(f.t) : trap.t == f.t) && trap.member(z)) {
                    out.tag = OrbitClass::Tag::trapped_q2;
                    out.trap_id = trap.id;
                    out.entry_iterate = i;
                    out.max_iterates_used = i;
                    return out;
                }
            }
        }
        auto [it, fresh] = seen.try_emplace({z.num(), z.den()}, i);
        if (!fresh) {
            out.tag = OrbitClass::Tag::preperiodic;
            out.preperiod = it->second;
            out.period = i - it->second;
            out.max_iterates_used = i;
            return out;
        }
        if (z.height_bits() > opts.height_cap_bits) {
            truncated = true;
            break;
        }
        if (i == opts.max_iters) break;
        z = f(z);
    }

    if (truncated) {
        // truncated phase: ball arithmetic keeps valuations exact until
        // cancellation eats the precision
        Padic2 zb = z.is_zero() ? Padic2::exact_zero() : trunc(z, opts.precision);
        for (; i <= opts.max_iters; ++i) {
            if (zb.val() && escape_certified(vt, ValExp(*zb.val()))) {
                out.tag = OrbitClass::Tag::escapes;
                out.at_iterate = i;
                out.max_iterates_used = i;
                return out;
            }
            if (opts.traps) {
                for (const auto& trap : *opts.traps) {
                    if ((trap.t_scope ? trap.t_scope->contains(f.t) : trap.t == f.t) &&
                        trap.member(zb, opts.precision)) {
                        out.tag = OrbitClass::Tag::trapped_q2;
                        out.trap_id = trap.id;
                        out.entry_iterate = i;
                        out.max_iterates_used = i;
                        return out;
                    }
                }
            }
            if (zb.is_zero_to_prec() || zb.prec() < 8) {
                out.diagnostic = "precision exhausted at working precision " +
                                 std::to_string(opts.precision);
                break;
            }
            if (i == opts.max_iters) break;
            zb = f.poly.eval(zb, opts.precision);
        }
    }
    out.tag = OrbitClass::Tag::unknown;
    out.max_iterates_used = i;
    if (out.diagnostic.empty()) out.diagnostic = "no certificate within iteration budget";
    return out;
}

// ----------------------------------------------------------------------------
// trap certification

// Parameter-perturbation bound: if every edge src -> tgt of a certificate at
// parameter t0 satisfies v(3/2) + v(t - t0) + inf_valuation(-2z^3+3z^2 on src)
// >= tgt.rexp for all t in t_disk, the certified maps hold for the whole
// parameter disk. The source disks must sit inside D(1/2, 2^0), where the
// cubic factor is bounded by 2.
inline bool trap_extends_over(const TrapCertificate& cert, const Disk& t_disk) {
    Poly w({Rational2(0), Rational2(0), Rational2(3), Rational2(-2)});
    for (size_t i = 0; i < cert.edges.size(); ++i) {
        const Disk& src = cert.edges[i].source;
        const Disk& tgt = cert.edges[i].target;
        if (!Disk(Rational2(1, 2), 0).contains(src)) return false;
        ValExp dt = t_disk.center == cert.t && t_disk.contains(cert.t)
                        ? ValExp(t_disk.rexp)
                        : min((t_disk.center - cert.t).val2(), ValExp(t_disk.rexp));
        ValExp bound = ValExp(-1) + dt + disk_sup_norm(w, src);
        if (bound < ValExp(tgt.rexp)) return false;
    }
    return true;
}

// Certify a closed cycle of disks: edge i goes disks[i] -> disks[(i+1) % L].
inline TrapCertificate certify_trap_cycle(const FamilyMember& f, const std::vector<Disk>& disks) {
    if (disks.empty()) throw std::domain_error("certify_trap_cycle: empty disk sequence");
    TrapCertificate cert;
    cert.disks = disks;
    cert.t = f.t;
    for (size_t i = 0; i < disks.size(); ++i) {
        MapCertificate edge = residue_disk_map(f.poly, disks[i], disks[(i + 1) % disks.size()]);
        if (!edge.certified)
            throw certification_error("trap edge " + disks[i].to_string() + " -> " +
                                          disks[(i + 1) % disks.size()].to_string() + " failed",
                                      edge);
        cert.edges.push_back(std::move(edge));
    }
    return cert;
}

// Certify a rho-shaped chain: consecutive edges along `disks`, where the last
// disk must equal an earlier one, closing the loop.
inline TrapCertificate certify_trap_chain(const FamilyMember& f, const std::vector<Disk>& disks) {
    if (disks.size() < 2) throw std::domain_error("certify_trap_chain: need at least two disks");
    size_t loop = disks.size();
    for (size_t i = 0; i + 1 < disks.size(); ++i)
        if (disks[i] == disks.back()) {
            loop = i;
            break;
        }
    if (loop == disks.size())
        throw std::domain_error("certify_trap_chain: chain does not close into a loop");
    TrapCertificate cert;
    cert.t = f.t;
    cert.cycle_start = loop;
    cert.disks.assign(disks.begin(), disks.end() - 1);
    for (size_t i = 0; i + 1 < disks.size(); ++i) {
        MapCertificate edge = residue_disk_map(f.poly, disks[i], disks[i + 1]);
        if (!edge.certified)
            throw certification_error("trap edge " + disks[i].to_string() + " -> " +
                                          disks[i + 1].to_string() + " failed",
                                      edge);
        cert.edges.push_back(std::move(edge));
    }
    return cert;
}

// The standard repelling 2-cycle trap of the paper family near z = -1/2:
// D(19/2, 2^-4) <-> D(3, 2^-2), entered from D(27/2, 2^-4) via D(2, 2^-2).
// Valid for every parameter congruent to 1 mod 32.
inline std::optional<TrapCertificate> standard_trap(const FamilyMember& f) {
    if (!congruent(f.t, Rational2(1), 5)) return std::nullopt;
    std::vector<Disk> chain = {Disk(Rational2(27, 2), 4), Disk(Rational2(2), 2), Disk(Rational2(3), 2),
                               Disk(Rational2(19, 2), 4), Disk(Rational2(3), 2)};
    try {
        TrapCertificate cert = certify_trap_chain(f, chain);
        Disk scope(Rational2(1), 5);
        if (trap_extends_over(cert, scope)) cert.t_scope = scope;
        return cert;
    } catch (const certification_error&) {
        return std::nullopt;
    }
}

inline TrapLibrary::Snapshot default_traps(const FamilyMember& f) {
    TrapLibrary lib;
    if (auto cert = standard_trap(f)) lib.publish(std::move(*cert));
    return lib.snapshot();
}

// ----------------------------------------------------------------------------
// disk classification

struct DiskClass {
    enum class Tag { all_escape, trapped_q2, boundary, unknown };
    Tag tag = Tag::unknown;
    std::vector<Disk> chain;              // iterated disk chain used as evidence
    std::vector<MapCertificate> edges;    // present for the trapped case
    std::string trap_id;
    long steps = 0;
    bool exact_over_c2 = false;           // all_escape certificates hold over C_2
    std::string note;

    static const char* tag_name(Tag t) {
        switch (t) {
            case Tag::all_escape: return "AllEscape";
            case Tag::trapped_q2: return "TrappedQ2";
            case Tag::boundary: return "Boundary";
            default: return "Unknown";
        }
    }
};

// entire disk certified outside absolute value 2, with the cubic term dominant
inline bool disk_escape_certified(const ValExp& vt, const Disk& d) {
    auto uv = d.uniform_valuation();
    return uv && escape_certified(vt, ValExp(*uv));
}

namespace detail {
// Try to sharpen a C_2 image disk into a Q_2 target via the finite-difference
// certificate; returns the tightest certified edge.
inline std::optional<MapCertificate> refine_image(const Poly& f, const Disk& src, const Disk& img,
                                                  long extra = 4) {
    std::optional<MapCertificate> best;
    for (long d = extra; d >= 0; --d) {
        Disk tgt(img.center, img.rexp + d);
        MapCertificate cert = residue_disk_map(f, src, tgt);
        if (cert.certified) return cert;
    }
    return std::nullopt;
}
}  // namespace detail

inline DiskClass classify_disk(const FamilyMember& f, const Disk& d0,
                               const ClassifyOptions& opts = {}, long step_cap = 24) {
    DiskClass out;
    ValExp vt = f.t.val2();

    // escape chain over C_2: iterate exact disk images
    {
        Disk d = d0;
        std::vector<Disk> chain = {d};
        for (long s = 0; s <= step_cap; ++s) {
            if (disk_escape_certified(vt, d)) {
                out.tag = DiskClass::Tag::all_escape;
                out.chain = chain;
                out.steps = s;
                out.exact_over_c2 = true;
                return out;
            }
            if (d.rexp < -4) break;  // radius blowing up, give up on this route
            d = disk_image(f.poly, d).disk;
            chain.push_back(d);
        }
    }

    // trapped chain over Q_2: follow sharpened residue-disk images into a trap
    if (opts.traps && !opts.traps->empty()) {
        Disk d = d0.canonical();
        std::vector<Disk> chain = {d};
        std::vector<MapCertificate> edges;
        for (long s = 0; s <= step_cap; ++s) {
            for (const auto& trap : *opts.traps) {
                bool applies = trap.t_scope ? trap.t_scope->contains(f.t) : trap.t == f.t;
                if (applies && trap.member(d)) {
                    out.tag = DiskClass::Tag::trapped_q2;
                    out.chain = chain;
                    out.edges = edges;
                    out.trap_id = trap.id;
                    out.steps = s;
                    return out;
                }
            }
            bool revisit = false;
            for (size_t i = 0; i + 1 < chain.size(); ++i)
                if (chain[i] == d) revisit = true;
            if (revisit) break;  // a fresh loop; callers may publish it as a trap
            DiskImage img = disk_image(f.poly, d);
            if (img.disk.rexp < 2) break;  // too coarse to ever fit a trap disk
            auto edge = detail::refine_image(f.poly, d, img.disk);
            if (!edge) break;
            d = edge->target.canonical();
            edges.push_back(std::move(*edge));
            chain.push_back(d);
        }
    }

    // boundary probe: certified escaping sub-disk plus a trapped/repeating point
    {
        bool has_escape_subdisk = false;
        Disk probe = d0;
        for (long depth = 0; depth < 8 && !has_escape_subdisk; ++depth) {
            auto [lo, hi] = probe.split();
            for (const Disk& child : {lo, hi}) {
                DiskClass sub;
                Disk c = child;
                for (long s = 0; s <= 6; ++s) {
                    if (disk_escape_certified(vt, c)) {
                        has_escape_subdisk = true;
                        break;
                    }
                    if (c.rexp < -4) break;
                    c = disk_image(f.poly, c).disk;
                }
            }
            probe = probe.split().first;
        }
        if (has_escape_subdisk) {
            OrbitClass center = classify_point_orbit(f, d0.center, opts);
            if (center.tag == OrbitClass::Tag::preperiodic ||
                center.tag == OrbitClass::Tag::trapped_q2) {
                out.tag = DiskClass::Tag::boundary;
                out.note = "contains certified escaping sub-disks and the " +
                           std::string(OrbitClass::tag_name(center.tag)) +
                           " point " + d0.center.to_string();
                return out;
            }
        }
    }

    out.tag = DiskClass::Tag::unknown;
    return out;
}

// ----------------------------------------------------------------------------
// cycles: Hensel lifting and multipliers

struct CycleRecord {
    long period = 0;
    std::vector<Padic2> points;
    Padic2 multiplier;
    ValExp multiplier_val;  // |multiplier| = 2^{-multiplier_val}
    enum class Nature { attracting, neutral, repelling } nature = Nature::neutral;

    static const char* nature_name(Nature n) {
        switch (n) {
            case Nature::attracting: return "attracting";
            case Nature::neutral: return "neutral";
            default: return "repelling";
        }
    }
};

inline CycleRecord::Nature nature_of(const ValExp& mult_val) {
    if (!mult_val.is_finite() || mult_val.finite() > 0) return CycleRecord::Nature::attracting;
    if (mult_val.finite() == 0) return CycleRecord::Nature::neutral;
    return CycleRecord::Nature::repelling;
}

// multiplier of a verified cycle: product of derivative values along it
inline std::pair<Padic2, ValExp> cycle_multiplier(const FamilyMember& f,
                                                  const std::vector<Padic2>& points, long prec) {
    Poly df = f.poly.derivative();
    Padic2 prod = trunc(Rational2(1), prec);
    bool exact_zero = false;
    ValExp val(0);
    for (size_t i = 0; i < points.size(); ++i) {
        // points must actually cycle at working precision
        Padic2 next = f.poly.eval(points[i], prec);
        const Padic2& expect = points[(i + 1) % points.size()];
        Padic2 diff = next - expect;
        ValExp gap = diff.val_floor();
        ValExp need = min(next.abs_prec(), expect.abs_prec());
        if (gap < need)
            throw std::domain_error("cycle_multiplier: points are not a cycle at working precision");
        Padic2 dv = df.eval(points[i], prec);
        if (dv.is_exact_zero()) exact_zero = true;
        else if (dv.is_zero_to_prec())
            throw precision_exhausted_error("cycle_multiplier: derivative indistinguishable from 0");
        else {
            prod = prod * dv;
            val = val + ValExp(*dv.val());
        }
    }
    if (exact_zero) return {Padic2::exact_zero(), ValExp::inf()};
    return {prod, val};
}

struct HenselSeed {
    // a residue class "res mod 2^bits", or an exact rational starting point
    std::optional<std::pair<Int, long>> residue;
    std::optional<Rational2> exact;

    static HenselSeed from_residue(Int res, long bits) { return {std::pair{std::move(res), bits}, {}}; }
    static HenselSeed from_exact(Rational2 x) { return {{}, std::move(x)}; }
};

namespace detail {
// Exact-rational Newton iteration for a 2-adic simple root. Starting from z0
// with v(g(z0)) > 2 v(g'(z0)), each step at least doubles v(g(z)) - v(g'(z));
// the iterate is reduced to its canonical residue to keep heights flat.
// Returns (z, agreement) with |z - root| <= 2^{-agreement} >= 2^{-(target)}.
inline std::pair<Rational2, long> hensel_newton(const Poly& g, const Rational2& z0, long target,
                                                const std::string& who) {
    Poly dg = g.derivative();
    Rational2 z = z0;
    Rational2 gz = g.eval(z);
    if (gz.is_zero()) return {z, target + 64};  // exact root
    Rational2 dgz = dg.eval(z);
    if (dgz.is_zero()) throw no_convergence_error(who + ": derivative vanishes at the seed");
    long vd = dgz.val2().finite();
    long m = gz.val2().finite();
    if (!(m > 2 * vd))
        throw no_convergence_error(who + ": Hensel criterion v(g) > 2 v(g') fails at seed " +
                                   z0.to_string() + " (v(g)=" + std::to_string(m) +
                                   ", v(g')=" + std::to_string(vd) + ")");
    long goal = target + vd;
    long guard = goal + vd + 8;
    for (int it = 0; it < 128 && m < goal; ++it) {
        z = (z - gz / dgz).canonical_residue(guard);
        gz = g.eval(z);
        if (gz.is_zero()) return {z, target + 64};
        m = gz.val2().finite();
        dgz = dg.eval(z);
    }
    if (m < goal) throw no_convergence_error(who + ": Newton iteration failed to converge");
    return {z, m - vd};
}
}  // namespace detail

/**
 * Newton-iterate on g(z) = f^period(z) - z, with lower-period factors removed
 * by exact polynomial division where they divide, starting from the seed
 * residue. The Hensel hypothesis v(g(z0)) > 2 v(g'(z0)) is checked at runtime
 * and failure reported as no_convergence_error.
 */
inline CycleRecord find_cycle_hensel(const FamilyMember& f, long period, const HenselSeed& seed,
                                     long precision = 128) {
    if (period < 1) throw std::domain_error("find_cycle_hensel: period must be >= 1");
    Poly iter = Poly::identity();
    std::vector<Poly> iterates;  // f^1 .. f^period
    for (long i = 0; i < period; ++i) {
        iter = f.poly.compose(iter);
        iterates.push_back(iter);
    }
    Poly g = iter - Poly::identity();
    for (long m = 1; m < period; ++m) {
        if (period % m != 0) continue;
        Poly gm = iterates[static_cast<size_t>(m - 1)] - Poly::identity();
        if (auto q = g.divide_exact(gm)) g = std::move(*q);
    }

    if (!seed.exact && !seed.residue)
        throw std::domain_error("find_cycle_hensel: seed must be a residue class or a rational");
    Rational2 z0 = seed.exact ? *seed.exact : Rational2(seed.residue->first);
    auto [z, agree] = detail::hensel_newton(g, z0, precision + 8, "find_cycle_hensel");
    if (seed.residue &&
        !congruent(z, Rational2(seed.residue->first), std::min(agree, seed.residue->second)))
        throw no_convergence_error("find_cycle_hensel: refined root left the seed residue class");

    long work = precision + 16;
    long zval = z.is_zero() ? 0 : z.val2().finite();
    Padic2 zb = z.is_zero() ? Padic2::exact_zero()
                            : trunc(z, work).capped(std::min(work, agree - zval));

    // verify the exact period at working precision
    CycleRecord rec;
    rec.period = period;
    Padic2 w = zb;
    for (long m = 1; m <= period; ++m) {
        rec.points.push_back(w);
        w = f.poly.eval(w, work);
        Padic2 diff = w - zb;
        bool returns = diff.is_exact_zero() || diff.val_floor() >= ValExp(precision / 2);
        if (m < period && returns)
            throw wrong_period_error("root has exact period " + std::to_string(m) +
                                     " < " + std::to_string(period));
        if (m == period && !returns)
            throw no_convergence_error("refined point does not close up at working precision");
    }
    auto [mult, mval] = cycle_multiplier(f, rec.points, work);
    rec.multiplier = mult;
    rec.multiplier_val = mval;
    rec.nature = nature_of(mval);
    return rec;
}

// ----------------------------------------------------------------------------
// post-critically finite parameters

struct PcfResult {
    long n = 0;
    Padic2 t;             // t_n = 1 + s_n
    long s_valuation = 0; // v(s_n) = 2n - 4
    NewtonPolygon polygon;
    std::vector<ValExp> orbit_return_vals;  // v(f^m(0)) for m = 1..n
    CycleRecord cycle;
};

/**
 * Locate the parameter t_n = 1 + s_n with a periodic critical orbit of length
 * n: the leftmost Newton polygon segment of g_n must have length 1 and slope
 * 4-2n, isolating a Q_2 root s_n with |s_n| = 2^{4-2n}; the rescaled unit root
 * is Hensel-lifted and the orbit return is verified at working precision.
 */
inline PcfResult pcf_parameter(long n, long precision = 128) {
    if (n < 2) throw std::domain_error("pcf_parameter: n must be >= 2");
    PcfResult out;
    out.n = n;
    Poly g = build_gn(n);
    out.polygon = newton_polygon(g);
    if (out.polygon.segments.empty() || out.polygon.segments.front().length != 1 ||
        !(out.polygon.segments.front().slope == Slope(4 - 2 * n, 1))) {
        std::string got;
        for (const auto& s : out.polygon.segments)
            got += " (" + s.slope.to_string() + "," + std::to_string(s.length) + ")";
        throw std::domain_error("pcf_parameter: unexpected Newton polygon shape:" + got);
    }
    long sval = 2 * n - 4;
    out.s_valuation = sval;

    // H(w) = 2 g(2^{2n-4} w) has integral coefficients, odd constant and odd
    // linear term; its single unit root is the rescaled s_n
    std::vector<Rational2> hc;
    for (long i = 0; i <= g.degree(); ++i)
        hc.push_back(g.coeff(static_cast<size_t>(i)).scale_pow2(sval * i + 1));
    Poly H(hc);
    long work = precision + 2 * n + 16;
    auto [wroot, agree] = detail::hensel_newton(H, Rational2(1), work, "pcf_parameter");
    Padic2 w = trunc(wroot, work + 8).capped(std::min(work, agree));
    Padic2 s = w * trunc(Rational2(1).scale_pow2(sval), work);
    Padic2 t = trunc(Rational2(1), work) + s;
    out.t = t;

    // critical orbit must return to 0 after exactly n steps at this precision
    Padic2 three_t = trunc(Rational2(3), work) * t;
    Padic2 half9_t = trunc(Rational2(-9, 2), work) * t;
    Padic2 one = trunc(Rational2(1), work);
    auto step = [&](const Padic2& z) { return three_t * z * z * z + half9_t * z * z + one; };
    Padic2 z = Padic2::exact_zero();
    for (long m = 1; m <= n; ++m) {
        z = step(z);
        out.orbit_return_vals.push_back(z.val_floor());
    }

    // the critical cycle record: points 0, 1, c_2, ..., multiplier exactly 0
    CycleRecord cyc;
    cyc.period = n;
    Padic2 p = Padic2::exact_zero();
    for (long m = 0; m < n; ++m) {
        cyc.points.push_back(p);
        p = step(p);
    }
    cyc.multiplier = Padic2::exact_zero();
    cyc.multiplier_val = ValExp::inf();
    cyc.nature = CycleRecord::Nature::attracting;
    out.cycle = cyc;
    return out;
}

}  // namespace dyadic
