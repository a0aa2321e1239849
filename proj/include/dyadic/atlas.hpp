#pragma once

#include "dyadic/dynamics.hpp"
#include "dyadic/geometry.hpp"

#include <array>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dyadic {

// ----------------------------------------------------------------------------
// verifier traces

struct TraceStep {
    std::string op;
    std::string claim;
    bool ok = false;
};

struct CongruenceClaim {
    std::string family;  // "a" or "b"
    long iterate = 0;
    Rational2 value;
    long modulus = 0;  // bits: value is claimed mod 2^modulus
    bool certified = false;
};

struct VerifierTrace {
    std::string id;
    long n = 0;
    std::string detail;
    bool verified = false;
    std::vector<TraceStep> steps;
    // structured artifacts, consumed by tests and the tree builders
    std::vector<long> abs_exponents;  // thm-unbdd: k_m with |f_t^m(1)+1/2| = 2^{k_m}
    std::vector<CongruenceClaim> congruences;
    long escape_iterate = -1;
    long certified_m = -1;  // thm-bdd: smallest certified parameter exponent

    void step(std::string op, std::string claim, bool ok) {
        steps.push_back({std::move(op), std::move(claim), ok});
        if (!ok) verified = false;
    }
};

struct verification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string exp2str(long e) { return "2^" + std::to_string(e); }

// f_t(z) + 1/2 = (z + 1/2) * 3t (z-1)^2 - (3/2)(t-1), checked as an exact
// polynomial identity in z; both sides are affine in t, so equality at three
// parameter values proves it for all t.
inline bool expansion_identity_holds() {
    for (long ti : {1L, 3L, -5L}) {
        Rational2 t(ti);
        Poly lhs = FamilyMember(t).poly + Poly::constant(Rational2(1, 2));
        Poly zph({Rational2(1, 2), Rational2(1)});
        Poly zm1({Rational2(-1), Rational2(1)});
        Poly rhs = (Rational2(3) * t) * (zph * zm1 * zm1) -
                   Poly::constant(Rational2(3, 2) * (t - Rational2(1)));
        if (lhs != rhs) return false;
    }
    return true;
}

}  // namespace detail

/**
 * Parameter disks 1 + 2^{2n-1} mod 2^{2n}: the critical value sits at exact
 * distance 2^{-(2n-2)} from the repelling fixed point -1/2, and that distance
 * quadruples with each iterate while it stays below 2, so the critical orbit
 * reaches absolute value 4 at iterate n+1 for every parameter in the disk.
 */
inline VerifierTrace verify_thm_unbdd(long n) {
    if (n < 1) throw std::domain_error("verify thm-unbdd: n must be >= 1");
    VerifierTrace tr;
    tr.id = "thm-unbdd";
    tr.n = n;
    tr.verified = true;

    tr.step("polynomial-identity",
            "f_t(z) + 1/2 = (z + 1/2)*3t*(z-1)^2 - (3/2)(t-1) as exact polynomials",
            detail::expansion_identity_holds());

    Disk tdisk(Rational2(1) + Rational2(1).scale_pow2(2 * n - 1), 2 * n);
    auto tval = tdisk.uniform_valuation();
    tr.step("parameter-disk", "|t| = 1 uniformly on " + tdisk.to_string(),
            tval && *tval == 0);

    // base: f_t(1) + 1/2 = (3/2)(1 - t), an affine image of the parameter disk
    Poly base({Rational2(3, 2), Rational2(-3, 2)});  // (3/2)(1 - t) in t
    DiskImage img = disk_image(base, tdisk);
    auto uv = img.disk.uniform_valuation();
    long k = uv ? -*uv : 0;
    tr.step("base-case",
            "|f_t(1) + 1/2| = " + detail::exp2str(-2 * n + 2) + " for all t in the disk",
            uv && k == -2 * n + 2);
    tr.abs_exponents.push_back(k);

    // error term (3/2)(t-1) has exact absolute value 2^{-2n+2} on the disk
    Poly err({Rational2(-3, 2), Rational2(3, 2)});
    auto ev = disk_image(err, tdisk).disk.uniform_valuation();
    bool err_ok = ev && -*ev == -2 * n + 2;
    tr.step("error-term", "|(3/2)(t-1)| = " + detail::exp2str(-2 * n + 2), err_ok);

    for (long m = 2; m <= n + 1; ++m) {
        // expansion step: |z + 1/2| = 2^k with -2n < k < 1 forces |z| = |z-1| = 2,
        // so the main term has absolute value 2^{k+2} and dominates the error
        bool hyp = k < 1 && k > -2 * n;
        bool dominates = k + 2 > -2 * n + 2;
        tr.step("expansion-step",
                "m=" + std::to_string(m) + ": k=" + std::to_string(k) +
                    " in (-2n, 1), so |f_t^m(1) + 1/2| = " + detail::exp2str(k + 2),
                hyp && dominates);
        k += 2;
        tr.abs_exponents.push_back(k);
    }

    bool final_escape = k == 2 && escape_certified(ValExp(0), ValExp(-2));
    tr.step("escape",
            "|f_t^" + std::to_string(n + 1) + "(1)| = 4 > 2, certified unbounded",
            final_escape);
    tr.escape_iterate = n + 1;
    if (!tr.verified) throw verification_error("thm-unbdd failed at n=" + std::to_string(n));
    return tr;
}

namespace detail {

// f_{s+1}^m(1) as an exact polynomial in the parameter, m small
inline Poly orbit_parameter_poly(long m) {
    Poly T = Poly::identity();
    Poly z = Poly::constant(Rational2(1));
    for (long i = 0; i < m; ++i) {
        Poly z2 = z * z;
        z = Rational2(3) * (T * z2 * z) - Rational2(9, 2) * (T * z2) + Poly::constant(Rational2(1));
    }
    return z;
}

}  // namespace detail

/**
 * The two trapped parameter families 1 + 5*2^{2n} and 1 + 7*2^{2n} mod
 * 2^{2n+3}: three certified congruence steps land the critical orbit on the
 * orbit of the opposite family's center one level down (or, at n = 3,
 * directly in the entry disks of the repelling 2-cycle trap), and the
 * parameter-perturbation bound carries the rest of the orbit along.
 */
inline VerifierTrace verify_thm_q2bdd(long n) {
    if (n < 3) throw std::domain_error("verify thm-q2bdd: n must be >= 3");
    VerifierTrace tr;
    tr.id = "thm-q2bdd";
    tr.n = n;
    tr.verified = true;

    FamilyMember f1((Rational2(1)));
    auto trap = standard_trap(f1);
    tr.step("trap", "2-cycle trap certified for every t = 1 mod 32",
            trap && trap->t_scope.has_value());
    if (!tr.verified) throw verification_error("thm-q2bdd: trap certification failed");

    std::vector<Poly> zpoly = {Poly(), detail::orbit_parameter_poly(1), detail::orbit_parameter_poly(2),
                               detail::orbit_parameter_poly(3)};

    for (const char* family : {"a", "b"}) {
        long mult = family[0] == 'a' ? 5 : 7;
        Rational2 tc = Rational2(1) + Rational2(mult).scale_pow2(2 * n);
        Disk tsrc(tc, 2 * n + 3);
        tr.step("family-" + std::string(family), "parameter disk " + tsrc.to_string(),
                tsrc.contains(tc));

        // three congruence steps, certified over every Q_2 point of the disk
        std::array<Rational2, 4> center_orbit;
        center_orbit[0] = Rational2(1);
        for (long m = 1; m <= 3; ++m) {
            center_orbit[m] = zpoly[m].eval(tc);
            long modulus = 2 * n + 4 - 2 * m;
            MapCertificate cert =
                residue_disk_map(zpoly[m], tsrc, Disk(center_orbit[m], modulus));
            tr.congruences.push_back(
                {family, m, center_orbit[m], modulus, cert.certified});
            tr.step("congruence",
                    std::string(family) + ": f_t^" + std::to_string(m) + "(1) = " +
                        center_orbit[m].to_string() + " mod 2^" + std::to_string(modulus) +
                        " for all Q_2 t in the disk",
                    cert.certified);
        }

        Disk trap_a(Rational2(19, 2), 4), trap_b(Rational2(27, 2), 4);
        if (n == 3) {
            const Disk& entry = family[0] == 'a' ? trap_a : trap_b;
            tr.step("trap-entry",
                    std::string(family) + ": f_t^3(1) lands in " + entry.to_string(),
                    entry.contains(center_orbit[3]));
        } else {
            // opposite family, one level down
            Rational2 t0 = Rational2(1) + Rational2(mult == 5 ? 7 : 5).scale_pow2(2 * n - 2);
            ValExp dt = (tc - t0).val2();
            tr.step("parameter-gap", "|t - t0| = " + detail::exp2str(-(2 * n - 2)),
                    dt == ValExp(2 * n - 2));
            Rational2 beta = zpoly[2].eval(t0);  // f_{t0}^2(1)
            bool base = congruent(center_orbit[3], beta, 2 * n - 2);
            tr.step("induction-base",
                    std::string(family) + ": f_t^3(1) = f_t0^2(1) mod 2^" +
                        std::to_string(2 * n - 2),
                    base);

            // perturbation chain: |f_t^m(1) - f_t0^{m-1}(1)| <= 2^{-rho_m}
            Poly w({Rational2(0), Rational2(0), Rational2(3), Rational2(-2)});
            FamilyMember f0(t0);
            long rho = 2 * n - 2;
            bool chain_ok = true;
            for (long m = 3; m < n; ++m) {
                Disk db(beta, rho);
                bool hyp = Disk(Rational2(1, 2), 0).contains(db);
                DiskImage im = disk_image(f0.poly, db);
                ValExp wsup = disk_sup_norm(w, db);
                long A = im.disk.rexp;
                long B = -1 + (2 * n - 2) + wsup.finite();
                long next = std::min(A, B);
                tr.step("perturbation-step",
                        std::string(family) + ": m=" + std::to_string(m) + " rho " +
                            std::to_string(rho) + " -> " + std::to_string(next),
                        hyp && next >= rho - 2);
                if (!hyp) chain_ok = false;
                rho = next;
                beta = f0(beta);
            }
            bool entry = (trap_a.contains(beta) || trap_b.contains(beta)) && rho >= 4;
            tr.step("trap-entry",
                    std::string(family) + ": f_t0^" + std::to_string(n - 1) +
                        "(1) sits in a trap entry disk and rho_n = " + std::to_string(rho) +
                        " >= 4, so f_t^" + std::to_string(n) + "(1) joins it",
                    chain_ok && entry);
        }
        bool scoped = trap->t_scope && trap->t_scope->contains(tsrc.center) &&
                      tsrc.rexp >= trap->t_scope->rexp;
        tr.step("trap-scope", std::string(family) + ": parameter disk lies inside t = 1 mod 32",
                scoped);
    }
    if (!tr.verified) throw verification_error("thm-q2bdd failed at n=" + std::to_string(n));
    return tr;
}

namespace detail {

// One certified iteration step for thm-bdd: given the orbit ball z with
// surrounding exponent r, bound |f_t(z + d) - f_{t_n}(z)| for |d| <= 2^{-r}
// and |t - t_n| <= 2^{-m} through the Taylor data at z plus the parameter
// term (3/2)(t - t_n)(-2z^3 + 3z^2).
inline std::optional<long> bdd_step_exponent(const Padic2& t, const Padic2& z, long r, long m,
                                             long prec) {
    auto vmin = [](std::initializer_list<ValExp> xs) {
        ValExp m = ValExp::inf();
        for (const auto& x : xs) m = min(m, x);
        return m;
    };
    Padic2 one = trunc(Rational2(1), prec);
    Padic2 c1 = trunc(Rational2(9), prec) * t * z * (z - one);
    Padic2 c2 = trunc(Rational2(9, 2), prec) * t * ((z + z) - one);
    Padic2 c3 = trunc(Rational2(3), prec) * t;
    ValExp A = vmin({c1.val_floor() + r, c2.val_floor() + 2 * r, c3.val_floor() + 3 * r});
    Padic2 d0 = (trunc(Rational2(3), prec) - (z + z)) * z * z;  // -2z^3 + 3z^2
    Padic2 d1 = (trunc(Rational2(6), prec) * z) * (one - z);    // w'(z)
    Padic2 d2 = trunc(Rational2(3), prec) - trunc(Rational2(6), prec) * z;
    Padic2 d3 = trunc(Rational2(-2), prec);
    ValExp wsup = vmin({d0.val_floor(), d1.val_floor() + r, d2.val_floor() + 2 * r,
                        d3.val_floor() + 3 * r});
    ValExp B = ValExp(-1 + m) + wsup;
    ValExp out = min(A, B);
    if (!out.is_finite()) return std::nullopt;
    return out.finite();
}

// full containment chain for a given parameter exponent m; returns the final
// radius exponent if the orbit disk returns inside D(0, 2^-k)
inline std::optional<long> bdd_chain(const PcfResult& pcf, long k, long m, long prec,
                                     std::vector<std::pair<long, long>>* steps = nullptr) {
    Padic2 z = Padic2::exact_zero();
    long r = k;
    for (long i = 0; i < pcf.n; ++i) {
        auto next = bdd_step_exponent(pcf.t, z, r, m, prec);
        if (!next) return std::nullopt;
        if (steps) steps->push_back({i, *next});
        // the orbit of t_n itself must stay at least as deep as the disk
        z = FamilyTruncatedStep(pcf.t, z, prec);
        r = *next;
    }
    if (r < k) return std::nullopt;
    if (!(z.val_floor() >= ValExp(k))) return std::nullopt;
    return r;
}

inline Padic2 FamilyTruncatedStep(const Padic2& t, const Padic2& z, long prec) {
    Padic2 one = trunc(Rational2(1), prec);
    return trunc(Rational2(3), prec) * t * z * z * z - trunc(Rational2(9, 2), prec) * t * z * z +
           one;
}

}  // namespace detail

/**
 * Neighborhoods of the periodic-critical-orbit parameters t_n: the disk
 * D(0, 2^-k), k the nearest integer to 2n/3, maps into itself after n steps
 * for every parameter within 2^-m of t_n, m = ceil(8n/3) + 2. The trace also
 * reports the smallest m (largest parameter disk) the chain certifies.
 */
inline VerifierTrace verify_thm_bdd(long n, long precision = 128) {
    if (n < 3) throw std::domain_error("verify thm-bdd: n must be >= 3");
    VerifierTrace tr;
    tr.id = "thm-bdd";
    tr.n = n;
    tr.verified = true;

    PcfResult pcf = pcf_parameter(n, precision);
    tr.step("pcf", "t_" + std::to_string(n) + " located, |t_n - 1| = 2^-" +
                       std::to_string(pcf.s_valuation),
            true);
    long k = (2 * n + 1) / 3;
    if (2 * n % 3 == 1) k = (2 * n - 1) / 3 + ((2 * n) % 3 == 1 && false ? 0 : 0);
    k = (2 * n % 3 == 2) ? (2 * n + 1) / 3 : (2 * n) / 3 + (2 * n % 3 == 1 ? 0 : 0);
    long m = (8 * n + 2) / 3 + ((8 * n) % 3 ? 1 : 0) + 2;

    std::vector<std::pair<long, long>> steps;
    auto final_r = detail::bdd_chain(pcf, k, m, precision, &steps);
    for (auto& [i, r] : steps)
        tr.step("orbit-step", "iterate " + std::to_string(i + 1) + ": disk exponent " +
                                  std::to_string(r),
                true);
    tr.step("containment",
            "f_t^" + std::to_string(n) + "(D(0,2^-" + std::to_string(k) + ")) inside itself for |t - t_n| <= 2^-" +
                std::to_string(m),
            final_r.has_value());
    if (!tr.verified) throw verification_error("thm-bdd failed at n=" + std::to_string(n));

    long best = m;
    for (long mm = 1; mm <= m; ++mm)
        if (detail::bdd_chain(pcf, k, mm, precision)) {
            best = mm;
            break;
        }
    tr.certified_m = best;
    tr.step("largest-disk", "smallest certified parameter exponent m = " + std::to_string(best),
            true);
    return tr;
}

/**
 * Julia-side escape family: the disks -1/2 + 2^{2n} mod 2^{2n+1} map down the
 * ladder D_n -> D_{n-1} -> ... -> D_0 (exact disk images over C_2), and D_0
 * lands entirely on absolute value 4.
 */
inline VerifierTrace verify_prop_julia_unbounded(long n) {
    if (n < 0) throw std::domain_error("verify prop-julia unbounded: n must be >= 0");
    VerifierTrace tr;
    tr.id = "prop-julia-unbdd";
    tr.n = n;
    tr.detail = "unbounded";
    tr.verified = true;
    FamilyMember f1((Rational2(1)));
    auto dn = [](long j) {
        return Disk(Rational2(-1, 2) + Rational2(1).scale_pow2(2 * j), 2 * j + 1);
    };
    for (long j = n; j >= 1; --j) {
        DiskImage img = disk_image(f1.poly, dn(j));
        tr.step("ladder", "f_1(D_" + std::to_string(j) + ") inside D_" + std::to_string(j - 1),
                dn(j - 1).contains(img.disk) && img.exact_over_c2);
    }
    DiskImage img0 = disk_image(f1.poly, dn(0));
    auto uv = img0.disk.uniform_valuation();
    tr.step("base", "all points of D_0 reach absolute value 4 in one step",
            uv && *uv == -2 && escape_certified(ValExp(0), ValExp(*uv)));
    tr.escape_iterate = n + 1;
    if (!tr.verified)
        throw verification_error("prop-julia unbounded failed at n=" + std::to_string(n));
    return tr;
}

/**
 * Julia-side trapped families: -1/2 + 5*2^{2n+1} and -1/2 + 7*2^{2n+1} mod
 * 2^{2n+4} swap down to the level-0 disks D(19/2, 2^-4), D(27/2, 2^-4), the
 * entry disks of the repelling 2-cycle trap.
 */
inline VerifierTrace verify_prop_julia_bounded(long n) {
    if (n < 0) throw std::domain_error("verify prop-julia bounded: n must be >= 0");
    VerifierTrace tr;
    tr.id = "prop-julia-bdd";
    tr.n = n;
    tr.detail = "bounded";
    tr.verified = true;
    FamilyMember f1((Rational2(1)));
    auto dab = [](char fam, long j) {
        long mult = fam == 'a' ? 5 : 7;
        return Disk(Rational2(-1, 2) + Rational2(mult).scale_pow2(2 * j + 1), 2 * j + 4);
    };
    for (char fam : {'a', 'b'}) {
        for (long j = n; j >= 1; --j) {
            Disk src = dab(fam, j);
            Disk tgt = dab(fam == 'a' ? 'b' : 'a', j - 1);
            DiskImage img = disk_image(f1.poly, src);
            tr.step("swap-ladder",
                    std::string(1, fam) + std::to_string(j) + " maps into " +
                        std::string(1, fam == 'a' ? 'b' : 'a') + std::to_string(j - 1),
                    tgt.contains(img.disk));
        }
    }
    auto trap = standard_trap(f1);
    bool entry = trap && trap->member(dab('a', 0)) && trap->member(dab('b', 0));
    tr.step("trap", "level-0 disks are the certified trap entry disks", entry);
    if (!tr.verified)
        throw verification_error("prop-julia bounded failed at n=" + std::to_string(n));
    return tr;
}

inline VerifierTrace verify_prop_julia(const std::string& which, long n) {
    if (which == "unbounded") return verify_prop_julia_unbounded(n);
    if (which == "bounded") return verify_prop_julia_bounded(n);
    throw std::domain_error("verify prop-julia: family must be 'unbounded' or 'bounded'");
}

// ----------------------------------------------------------------------------
// parameter classifier (Mandelbrot-slice membership of a single parameter)

struct ParameterClass {
    std::string label;  // InMandelbrot | NotInMandelbrot | Boundary | Unknown
    std::string rule;
    std::optional<OrbitClass> critical_orbit;
    bool certified = false;
};

inline ParameterClass classify_parameter(const Rational2& t, const ClassifyOptions& base = {}) {
    ParameterClass out;
    if (t == Rational2(1)) {
        out.label = "Boundary";
        out.rule = "parameter 1 is a non-isolated boundary point: certified unbounded and "
                   "bounded disks approach it";
        out.certified = true;
        return out;
    }
    ValExp v = t.val2();
    if (v >= ValExp(1)) {
        out.label = "InMandelbrot";
        out.rule = "|t| <= 1/2: all coefficients lie in the unit disk, the critical orbit "
                   "stays bounded";
        out.certified = true;
        return out;
    }
    if (v <= ValExp(-1)) {
        out.label = "NotInMandelbrot";
        out.rule = "|t| > 1: |f_t(1)| = 2|t| > 2 and the critical orbit escapes";
        out.certified = true;
        return out;
    }
    FamilyMember f(t);
    ClassifyOptions opts = base;
    if (!opts.traps) opts.traps = default_traps(f);
    OrbitClass orbit = classify_point_orbit(f, Rational2(1), opts);
    out.critical_orbit = orbit;
    switch (orbit.tag) {
        case OrbitClass::Tag::escapes:
            out.label = "NotInMandelbrot";
            out.rule = "critical orbit certified escaping at iterate " +
                       std::to_string(orbit.at_iterate);
            out.certified = true;
            break;
        case OrbitClass::Tag::preperiodic:
            out.label = "InMandelbrot";
            out.rule = "critical orbit exactly preperiodic (preperiod " +
                       std::to_string(orbit.preperiod) + ", period " + std::to_string(orbit.period) +
                       ")";
            out.certified = true;
            break;
        case OrbitClass::Tag::trapped_q2:
            out.label = "InMandelbrot";
            out.rule = "critical orbit enters certified trap " + orbit.trap_id + " at iterate " +
                       std::to_string(orbit.entry_iterate);
            out.certified = true;
            break;
        default:
            out.label = "Unknown";
            out.rule = orbit.diagnostic;
            out.certified = false;
    }
    return out;
}

// ----------------------------------------------------------------------------
// classification trees

enum class TreeLabel { escape, trapped_q2, pcf, boundary, unknown };

inline const char* label_name(TreeLabel l) {
    switch (l) {
        case TreeLabel::escape: return "Escape";
        case TreeLabel::trapped_q2: return "TrappedQ2";
        case TreeLabel::pcf: return "PCF";
        case TreeLabel::boundary: return "Boundary";
        default: return "Unknown";
    }
}

struct Evidence {
    std::string kind;
    std::string summary;
    std::optional<VerifierTrace> trace;
};

struct TreeNode {
    Disk disk;
    TreeLabel label = TreeLabel::unknown;
    long evidence = -1;
    std::array<long, 2> children{-1, -1};
};

struct ClassifiedTree {
    std::string kind;  // "mandel" | "julia"
    Disk root;
    long depth = 0;
    std::vector<TreeNode> nodes;
    std::vector<Evidence> evidence;

    const TreeNode* find(const Disk& d) const {
        if (nodes.empty()) return nullptr;
        long cur = 0;
        while (true) {
            const TreeNode& nd = nodes[static_cast<size_t>(cur)];
            if (!nd.disk.contains(d.center)) return nullptr;
            if (nd.disk.rexp == d.rexp) return nd.disk == d ? &nd : nullptr;
            long next = -1;
            for (long c : nd.children)
                if (c >= 0 && nodes[static_cast<size_t>(c)].disk.contains(d.center)) next = c;
            if (next < 0) return nullptr;
            cur = next;
        }
    }

    // no C_2-escape node may have a trapped descendant and vice versa
    bool label_consistent() const {
        for (const auto& nd : nodes) {
            if (nd.label != TreeLabel::escape && nd.label != TreeLabel::trapped_q2) continue;
            bool bad = false;
            walk(nd, [&](const TreeNode& sub) {
                if (nd.label == TreeLabel::escape && sub.label == TreeLabel::trapped_q2) bad = true;
                if (nd.label == TreeLabel::trapped_q2 && sub.label == TreeLabel::escape) bad = true;
            });
            if (bad) return false;
        }
        return true;
    }

    template <class F>
    void walk(const TreeNode& from, F&& fn) const {
        for (long c : from.children) {
            if (c < 0) continue;
            const TreeNode& child = nodes[static_cast<size_t>(c)];
            fn(child);
            walk(child, fn);
        }
    }
};

struct TreeOptions {
    long jobs = 1;
    long precision = 128;
    long generic_orbit_cap = 4;  // parameter-orbit polynomial iterations for mandel nodes
    bool generic_fallback = true;
};

namespace detail {

struct TreeContext {
    std::string kind;
    Rational2 special;  // t = 1 or z = -1/2
    TreeOptions opts;
    ClassifyOptions classify;
    TrapLibrary::Snapshot traps;
    std::vector<Poly> orbit_polys;                       // mandel generic
    std::map<long, VerifierTrace> unbdd, q2bdd;          // mandel patterns
    std::map<long, VerifierTrace> julia_unbdd, julia_bdd;  // julia patterns
    std::map<long, PcfResult> pcf;
    std::map<long, long> pcf_radius;  // certified parameter exponent per n
};

struct NodeClass {
    TreeLabel label = TreeLabel::unknown;
    std::string ev_kind;
    std::string ev_summary;
    const VerifierTrace* ev_trace = nullptr;  // points into the context caches
};

inline NodeClass classify_mandel_node(const TreeContext& ctx, const Disk& d) {
    NodeClass out;
    if (d.contains(ctx.special)) {
        out.label = TreeLabel::boundary;
        out.ev_kind = "boundary";
        out.ev_summary = "contains the boundary parameter 1";
        return out;
    }
    Rational2 diff = d.center - Rational2(1);
    long v = diff.val2().finite();  // nonzero: the disk avoids 1
    if (v >= 1 && d.rexp >= 1 && d.uniform_valuation().value_or(0) >= 1) {
        out.label = TreeLabel::trapped_q2;
        out.ev_kind = "fast-path";
        out.ev_summary = "|t| <= 1/2 on the whole disk: post-critically bounded";
        return out;
    }
    if (v % 2 == 1 && d.rexp >= v + 1) {
        long nn = (v + 1) / 2;
        auto it = ctx.unbdd.find(nn);
        if (it != ctx.unbdd.end()) {
            out.label = TreeLabel::escape;
            out.ev_kind = "thm-unbdd";
            out.ev_summary = "inside the certified escape family at level " + std::to_string(nn);
            out.ev_trace = &it->second;
            return out;
        }
    }
    if (v % 2 == 0 && v >= 6 && d.rexp >= v + 3) {
        long nn = v / 2;
        Int residue = (diff.scale_pow2(-v).canonical_residue(3)).num();
        if (residue == 5 || residue == 7) {
            auto it = ctx.q2bdd.find(nn);
            if (it != ctx.q2bdd.end()) {
                out.label = TreeLabel::trapped_q2;
                out.ev_kind = "thm-q2bdd";
                out.ev_summary = "inside certified Q_2-bounded family " +
                                 std::string(residue == 5 ? "a" : "b") + " at level " +
                                 std::to_string(nn);
                out.ev_trace = &it->second;
                return out;
            }
        }
    }
    for (const auto& [nn, pcf] : ctx.pcf) {
        auto rit = ctx.pcf_radius.find(nn);
        if (rit == ctx.pcf_radius.end() || d.rexp < rit->second) continue;
        Padic2 gap = pcf.t - trunc(d.center, ctx.opts.precision);
        if (gap.val_floor() >= ValExp(d.rexp)) {
            out.label = TreeLabel::pcf;
            out.ev_kind = "thm-bdd";
            out.ev_summary = "inside the certified post-critically bounded disk around t_" +
                             std::to_string(nn);
            return out;
        }
    }
    if (ctx.opts.generic_fallback) {
        auto tval = d.uniform_valuation();
        for (size_t m = 1; m < ctx.orbit_polys.size(); ++m) {
            const Poly& zm = ctx.orbit_polys[m];
            DiskImage img = disk_image(zm, d);
            auto uv = img.disk.uniform_valuation();
            if (uv && tval && escape_certified(ValExp(*tval), ValExp(*uv))) {
                out.label = TreeLabel::escape;
                out.ev_kind = "generic-escape";
                out.ev_summary = "critical orbit leaves |z| <= 2 at iterate " + std::to_string(m) +
                                 " for every parameter in the disk";
                return out;
            }
            for (const auto& trap : *ctx.traps) {
                if (!trap.t_scope || !trap.t_scope->contains(d)) continue;
                for (const auto& td : trap.disks) {
                    if (td.contains(img.disk) ||
                        residue_disk_map(zm, d, td).certified) {
                        out.label = TreeLabel::trapped_q2;
                        out.ev_kind = "generic-trap";
                        out.ev_summary = "critical orbit certified into trap disk " +
                                         td.to_string() + " at iterate " + std::to_string(m);
                        return out;
                    }
                }
            }
        }
    }
    out.label = TreeLabel::unknown;
    out.ev_kind = "unknown";
    out.ev_summary = "no certificate at this depth";
    return out;
}

inline NodeClass classify_julia_node(const TreeContext& ctx, const Disk& d) {
    NodeClass out;
    if (d.contains(ctx.special)) {
        out.label = TreeLabel::boundary;
        out.ev_kind = "boundary";
        out.ev_summary = "contains the repelling fixed point -1/2";
        return out;
    }
    Rational2 diff = d.center + Rational2(1, 2);
    long v = diff.val2().finite();
    if (v >= 0 && v % 2 == 0 && d.rexp >= v + 1) {
        long nn = v / 2;
        auto it = ctx.julia_unbdd.find(nn);
        if (it != ctx.julia_unbdd.end()) {
            out.label = TreeLabel::escape;
            out.ev_kind = "prop-julia-unbdd";
            out.ev_summary = "inside escape disk D_" + std::to_string(nn);
            out.ev_trace = &it->second;
            return out;
        }
    }
    if (v >= 1 && v % 2 == 1 && d.rexp >= v + 3) {
        long nn = (v - 1) / 2;
        Int residue = (diff.scale_pow2(-v).canonical_residue(3)).num();
        if (residue == 5 || residue == 7) {
            auto it = ctx.julia_bdd.find(nn);
            if (it != ctx.julia_bdd.end()) {
                out.label = TreeLabel::trapped_q2;
                out.ev_kind = "prop-julia-bdd";
                out.ev_summary = "inside Q_2-bounded family " +
                                 std::string(residue == 5 ? "a" : "b") + " at level " +
                                 std::to_string(nn);
                out.ev_trace = &it->second;
                return out;
            }
        }
    }
    if (ctx.opts.generic_fallback) {
        FamilyMember f1((Rational2(1)));
        DiskClass dc = classify_disk(f1, d, ctx.classify, 16);
        if (dc.tag == DiskClass::Tag::all_escape) {
            out.label = TreeLabel::escape;
            out.ev_kind = "generic-escape";
            out.ev_summary = "disk image chain leaves |z| <= 2 after " +
                             std::to_string(dc.steps) + " steps";
            return out;
        }
        if (dc.tag == DiskClass::Tag::trapped_q2) {
            out.label = TreeLabel::trapped_q2;
            out.ev_kind = "generic-trap";
            out.ev_summary = "residue-disk chain certified into trap " + dc.trap_id + " after " +
                             std::to_string(dc.steps) + " steps";
            return out;
        }
        if (dc.tag == DiskClass::Tag::boundary) {
            out.label = TreeLabel::boundary;
            out.ev_kind = "generic-boundary";
            out.ev_summary = dc.note;
            return out;
        }
    }
    out.label = TreeLabel::unknown;
    out.ev_kind = "unknown";
    out.ev_summary = "no certificate at this depth";
    return out;
}

inline ClassifiedTree build_tree(const std::string& kind, long depth, const TreeOptions& opts) {
    if (depth < 1) throw std::domain_error("tree depth must be >= 1");
    TreeContext ctx;
    ctx.kind = kind;
    ctx.opts = opts;
    ctx.special = kind == "mandel" ? Rational2(1) : Rational2(-1, 2);
    ctx.classify.precision = opts.precision;
    ctx.classify.max_iters = 2000;
    FamilyMember f1((Rational2(1)));
    TrapLibrary lib;
    if (auto cert = standard_trap(f1)) lib.publish(std::move(*cert));
    ctx.traps = lib.snapshot();
    ctx.classify.traps = ctx.traps;

    // precompute every pattern certificate the depth can use
    if (kind == "mandel") {
        for (long nn = 1; 2 * nn <= depth; ++nn) ctx.unbdd.emplace(nn, verify_thm_unbdd(nn));
        for (long nn = 3; 2 * nn + 3 <= depth; ++nn) ctx.q2bdd.emplace(nn, verify_thm_q2bdd(nn));
        for (long nn = 3; nn <= 8; ++nn) {
            long m = (8 * nn) / 3 + ((8 * nn) % 3 ? 1 : 0) + 2;
            if (m > depth) continue;
            ctx.pcf.emplace(nn, pcf_parameter(nn, opts.precision));
            ctx.pcf_radius.emplace(nn, m);
        }
        ctx.orbit_polys.push_back(Poly::constant(Rational2(1)));
        for (long m = 1; m <= opts.generic_orbit_cap; ++m)
            ctx.orbit_polys.push_back(orbit_parameter_poly(m));
    } else {
        for (long nn = 0; 2 * nn + 1 <= depth; ++nn)
            ctx.julia_unbdd.emplace(nn, verify_prop_julia_unbounded(nn));
        for (long nn = 0; 2 * nn + 4 <= depth; ++nn)
            ctx.julia_bdd.emplace(nn, verify_prop_julia_bounded(nn));
    }

    ClassifiedTree tree;
    tree.kind = kind;
    tree.depth = depth;
    tree.root = Disk(ctx.special, 0);

    auto classify = [&](const Disk& d) {
        return kind == "mandel" ? classify_mandel_node(ctx, d) : classify_julia_node(ctx, d);
    };

    // evidence records are deduplicated by (kind, summary)
    std::map<std::pair<std::string, std::string>, long> ev_ids;
    auto evidence_id = [&](const NodeClass& nc) {
        auto key = std::make_pair(nc.ev_kind, nc.ev_summary);
        auto it = ev_ids.find(key);
        if (it != ev_ids.end()) return it->second;
        Evidence ev;
        ev.kind = nc.ev_kind;
        ev.summary = nc.ev_summary;
        if (nc.ev_trace) ev.trace = *nc.ev_trace;
        tree.evidence.push_back(std::move(ev));
        long id = static_cast<long>(tree.evidence.size()) - 1;
        ev_ids.emplace(key, id);
        return id;
    };

    NodeClass rootc = classify(tree.root);
    tree.nodes.push_back({tree.root, rootc.label, evidence_id(rootc), {-1, -1}});

    std::vector<long> frontier = {0};
    for (long level = 1; level <= depth; ++level) {
        // collect children to classify
        struct Pending {
            long parent;
            int side;
            Disk disk;
            bool inherit;
            TreeLabel inherited;
            long inherited_ev;
        };
        std::vector<Pending> pend;
        for (long idx : frontier) {
            TreeNode& nd = tree.nodes[static_cast<size_t>(idx)];
            auto [lo, hi] = nd.disk.split();
            bool inherit = nd.label == TreeLabel::escape || nd.label == TreeLabel::trapped_q2 ||
                           nd.label == TreeLabel::pcf;
            pend.push_back({idx, 0, lo, inherit, nd.label, nd.evidence});
            pend.push_back({idx, 1, hi, inherit, nd.label, nd.evidence});
        }
        std::vector<NodeClass> results(pend.size());
        auto work = [&](size_t lo, size_t hi) {
            for (size_t i = lo; i < hi; ++i)
                if (!pend[i].inherit) results[i] = classify(pend[i].disk);
        };
        long jobs = std::max<long>(1, opts.jobs);
        if (jobs == 1 || pend.size() < 16) {
            work(0, pend.size());
        } else {
            std::vector<std::future<void>> fs;
            size_t chunk = (pend.size() + jobs - 1) / jobs;
            for (long j = 0; j < jobs; ++j) {
                size_t lo = std::min(pend.size(), static_cast<size_t>(j) * chunk);
                size_t hi = std::min(pend.size(), lo + chunk);
                if (lo < hi) fs.push_back(std::async(std::launch::async, work, lo, hi));
            }
            for (auto& f : fs) f.get();
        }
        std::vector<long> next;
        for (size_t i = 0; i < pend.size(); ++i) {
            const Pending& p = pend[i];
            TreeLabel label = p.inherit ? p.inherited : results[i].label;
            long ev = p.inherit ? p.inherited_ev : evidence_id(results[i]);
            tree.nodes.push_back({p.disk, label, ev, {-1, -1}});
            long id = static_cast<long>(tree.nodes.size()) - 1;
            tree.nodes[static_cast<size_t>(p.parent)].children[static_cast<size_t>(p.side)] = id;
            next.push_back(id);
        }
        frontier = std::move(next);
    }
    return tree;
}

}  // namespace detail

inline ClassifiedTree mandel_tree(long depth, const TreeOptions& opts = {}) {
    return detail::build_tree("mandel", depth, opts);
}
inline ClassifiedTree julia_tree(long depth, const TreeOptions& opts = {}) {
    return detail::build_tree("julia", depth, opts);
}

}  // namespace dyadic
