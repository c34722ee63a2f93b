#pragma once

// Packing lower bound ℓ²m⁴ ≥ B for families of polytopes, the two standard
// families (0/1-polytopes, polygons on the parabola) with exact separation
// and radius certificates, and the threshold formulas derived from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <mpfr.h>

#include "extcomplex/distance.hpp"

namespace extcomplex {

namespace detail {

// Working precision in bits: EXTCOMPLEX_PRECISION if set, else 64 (x87 extended).
inline mpfr_prec_t working_precision() {
    if (const char* env = std::getenv("EXTCOMPLEX_PRECISION")) {
        char* end = nullptr;
        long bits = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || bits < MPFR_PREC_MIN || bits > 1 << 20)
            throw InvalidInput("EXTCOMPLEX_PRECISION must be a bit count");
        return static_cast<mpfr_prec_t>(bits);
    }
    return 64;
}

class Real {
public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    long double ld() const { return mpfr_get_ld(v_, MPFR_RNDN); }

    std::string str() const {
        // enough digits to round-trip the working precision
        const auto digits = static_cast<int>(mpfr_get_prec(v_) * 0.30103) + 2;
        std::vector<char> buf(static_cast<size_t>(digits) + 32);
        mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
        return buf.data();
    }

private:
    mpfr_t v_;
};

inline Real log2_of(const Integer& z, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_z(r.get(), z.get_mpz_t(), MPFR_RNDN);
    mpfr_log2(r.get(), r.get(), MPFR_RNDN);
    return r;
}

inline Real log2_of(const Rational& q, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_q(r.get(), q.get_mpq_t(), MPFR_RNDN);
    mpfr_log2(r.get(), r.get(), MPFR_RNDN);
    return r;
}

inline uint64_t ceil_root(const Real& b, unsigned long k) {
    Real r(mpfr_get_prec(b.get()));
    mpfr_rootn_ui(r.get(), b.get(), k, MPFR_RNDU);
    mpfr_ceil(r.get(), r.get());
    return mpfr_get_ui(r.get(), MPFR_RNDU);
}

}  // namespace detail

/// Radius and separation enter only through their squares, so exact family
/// data and decimal inputs are both represented without loss.
struct BoundInputs {
    size_t d = 0;
    Rational rho_sq;    // ρ²
    Rational delta_sq;  // Δ²
    Integer N;          // |family|
};

struct BoundResult {
    long double B = 0;
    std::string B_decimal;  // at the working precision
    uint64_t sxc_floor = 0;  // ⌈B^{1/4}⌉
    uint64_t xc_floor = 0;   // ⌈B^{1/2}⌉
    long precision_bits = 0;
};

inline void check_bound_inputs(const BoundInputs& in) {
    if (in.d < 1) throw InvalidInput("dimension must be at least 1");
    if (sgn(in.rho_sq) <= 0) throw InvalidInput("radius must be positive");
    if (sgn(in.delta_sq) <= 0) throw InvalidInput("separation must be positive");
    if (in.delta_sq > 4 * in.rho_sq) throw InvalidInput("separation exceeds the diameter bound 2ρ");
    if (in.N < 2) throw InvalidInput("family needs at least two members");
}

/// B = log N / (8d(1 + log(2ρ/Δ) + log log N)), logarithms base 2.
inline BoundResult theorem1_bound(const BoundInputs& in) {
    check_bound_inputs(in);
    const mpfr_prec_t prec = detail::working_precision();
    detail::Real logn = detail::log2_of(in.N, prec);
    detail::Real loglog(prec);
    mpfr_log2(loglog.get(), logn.get(), MPFR_RNDN);
    // log(2ρ/Δ) = log(4ρ²/Δ²) / 2
    Rational ratio = 4 * in.rho_sq / in.delta_sq;
    detail::Real lr = detail::log2_of(ratio, prec);
    mpfr_div_ui(lr.get(), lr.get(), 2, MPFR_RNDN);

    detail::Real den(prec);
    mpfr_add_ui(den.get(), lr.get(), 1, MPFR_RNDN);
    mpfr_add(den.get(), den.get(), loglog.get(), MPFR_RNDN);
    mpfr_mul_ui(den.get(), den.get(), 8 * static_cast<unsigned long>(in.d), MPFR_RNDN);
    detail::Real b(prec);
    mpfr_div(b.get(), logn.get(), den.get(), MPFR_RNDN);

    BoundResult out;
    out.B = b.ld();
    out.B_decimal = b.str();
    out.sxc_floor = detail::ceil_root(b, 4);
    out.xc_floor = detail::ceil_root(b, 2);
    out.precision_bits = static_cast<long>(prec);
    return out;
}

// ---------------------------------------------------------------------------
// Families

struct FamilySpec {
    enum class Kind { zero_one, parabola, explicit_list };
    Kind kind = Kind::zero_one;
    size_t d = 0;                    // zero_one
    size_t s = 0, n = 0;             // parabola: n-subsets of {1, …, s}
    std::vector<VPolytope> members;  // explicit_list

    static FamilySpec zero_one(size_t d) { return {Kind::zero_one, d, 0, 0, {}}; }
    static FamilySpec parabola(size_t s, size_t n) { return {Kind::parabola, 0, s, n, {}}; }
    static FamilySpec explicit_list(std::vector<VPolytope> ps) { return {Kind::explicit_list, 0, 0, 0, std::move(ps)}; }
};

/// Which members to emit. `all` enumerates every member in a fixed order;
/// `random` draws `count` distinct members from `seed`.
struct FamilySelector {
    enum class Mode { all, random };
    Mode mode = Mode::all;
    size_t count = 0;
    uint64_t seed = 0;
    bool skip_points = false;  // drop members of dimension 0

    static FamilySelector all() { return {}; }
    static FamilySelector random(size_t count, uint64_t seed) { return {Mode::random, count, seed, false}; }
};

inline RVector parabola_point(unsigned long t) {
    Rational x(t);
    return {x, x * x};
}

namespace detail {

inline VPolytope zero_one_member(size_t d, const std::vector<bool>& pick) {
    std::vector<RVector> pts;
    for (size_t code = 0; code < pick.size(); ++code) {
        if (!pick[code]) continue;
        RVector p(d);
        for (size_t i = 0; i < d; ++i) p[i] = (code >> (d - 1 - i)) & 1U;
        pts.push_back(std::move(p));
    }
    return VPolytope::from_points(d, std::move(pts));
}

inline VPolytope parabola_member(const std::vector<unsigned long>& ts) {
    std::vector<RVector> pts;
    for (auto t : ts) pts.push_back(parabola_point(t));
    return VPolytope::from_points(2, std::move(pts));
}

}  // namespace detail

/// Members of a family. 0/1: conv(V) for non-empty V ⊆ {0,1}^d, subsets
/// ordered by their bit pattern over the lexicographic point order.
/// Parabola: conv{(t, t²) : t ∈ I} for n-subsets I of {1, …, s} in
/// lexicographic order.
inline std::vector<VPolytope> generate_family(const FamilySpec& spec, const FamilySelector& sel = {}) {
    std::vector<VPolytope> out;
    auto keep = [&](VPolytope p) {
        if (sel.skip_points && p.affine_dimension() < 1) return;
        out.push_back(std::move(p));
    };
    switch (spec.kind) {
        case FamilySpec::Kind::explicit_list: {
            if (sel.mode != FamilySelector::Mode::all) throw InvalidInput("explicit families support only 'all'");
            for (const auto& p : spec.members) keep(p);
            return out;
        }
        case FamilySpec::Kind::zero_one: {
            const size_t d = spec.d;
            if (d < 1) throw InvalidInput("0/1 family needs d >= 1");
            if (sel.mode == FamilySelector::Mode::all) {
                if (d > 4) throw InvalidInput("exhaustive 0/1 family beyond d = 4");
                const size_t k = size_t{1} << d;
                for (uint64_t mask = 1; mask < (uint64_t{1} << k); ++mask) {
                    std::vector<bool> pick(k);
                    for (size_t c = 0; c < k; ++c) pick[c] = (mask >> (k - 1 - c)) & 1U;
                    keep(detail::zero_one_member(d, pick));
                }
                return out;
            }
            if (d > 16) throw InvalidInput("random 0/1 family beyond d = 16");
            const size_t k = size_t{1} << d;
            std::mt19937_64 rng(sel.seed);
            std::set<std::vector<bool>> seen;
            size_t attempts = 0;
            while (out.size() < sel.count) {
                if (++attempts > 100 * sel.count + 1000) throw InvalidInput("could not draw enough distinct members");
                std::vector<bool> pick(k);
                bool any = false;
                for (size_t c = 0; c < k; ++c) any |= (pick[c] = (rng() & 1U) != 0);
                if (!any || !seen.insert(pick).second) continue;
                keep(detail::zero_one_member(d, pick));
            }
            return out;
        }
        case FamilySpec::Kind::parabola: {
            const size_t s = spec.s, n = spec.n;
            if (n < 2 || s < n) throw InvalidInput("parabola family needs s >= n >= 2");
            if (sel.mode == FamilySelector::Mode::all) {
                std::vector<unsigned long> ts(n);
                std::iota(ts.begin(), ts.end(), 1UL);
                while (true) {
                    keep(detail::parabola_member(ts));
                    size_t i = n;
                    while (i > 0 && ts[i - 1] == s - n + i) --i;
                    if (i == 0) break;
                    ++ts[i - 1];
                    for (size_t j = i; j < n; ++j) ts[j] = ts[j - 1] + 1;
                }
                return out;
            }
            Integer total;
            mpz_bin_uiui(total.get_mpz_t(), s, n);
            if (Integer(sel.count) > total) throw InvalidInput("more members requested than the family has");
            std::mt19937_64 rng(sel.seed);
            std::set<std::vector<unsigned long>> seen;
            std::vector<unsigned long> pool(s);
            std::iota(pool.begin(), pool.end(), 1UL);
            while (out.size() < sel.count) {
                std::shuffle(pool.begin(), pool.end(), rng);
                std::vector<unsigned long> ts(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
                std::sort(ts.begin(), ts.end());
                if (!seen.insert(ts).second) continue;
                keep(detail::parabola_member(ts));
            }
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Certificates

struct SeparationResult {
    Rational min_sq;
    size_t i = 0, j = 0;  // lexicographically first pair attaining it
    size_t pairs_pruned = 0;
};

namespace detail {

// Support function difference along coordinate directions and the all-ones
// direction: |h_P(u) − h_Q(u)| ≤ ‖u‖·dist_H(P, Q).
inline std::vector<Rational> support_profile(const VPolytope& p) {
    const size_t d = p.dim();
    std::vector<Rational> out;
    for (size_t k = 0; k < d; ++k) {
        Rational hi = p.vertices()[0][k], lo = hi;
        for (const auto& v : p.vertices()) {
            hi = std::max(hi, v[k]);
            lo = std::min(lo, v[k]);
        }
        out.push_back(hi);
        out.push_back(-lo);
    }
    Rational hi, lo;
    bool first = true;
    for (const auto& v : p.vertices()) {
        Rational s = std::accumulate(v.begin(), v.end(), Rational(0));
        if (first || s > hi) hi = s;
        if (first || s < lo) lo = s;
        first = false;
    }
    out.push_back(hi);
    out.push_back(-lo);
    return out;
}

inline Rational separation_lower_sq(const std::vector<Rational>& a, const std::vector<Rational>& b, size_t d) {
    Rational best = 0;
    for (size_t k = 0; k < a.size(); ++k) {
        Rational diff = a[k] - b[k];
        Rational sq = diff * diff;
        if (k >= 2 * d) sq /= static_cast<unsigned long>(d);  // ‖(1, …, 1)‖² = d
        best = std::max(best, sq);
    }
    return best;
}

// Hausdorff distance squared, abandoning once it exceeds `cap`.
inline std::optional<Rational> hausdorff_sq_capped(const PreparedPolytope& a, const PreparedPolytope& b,
                                                   const std::optional<Rational>& cap) {
    Rational best = 0;
    for (const auto* pair : {&a, &b}) {
        const PreparedPolytope& from = *pair;
        const PreparedPolytope& to = pair == &a ? b : a;
        for (const auto& v : from.polytope().vertices()) {
            best = std::max(best, to.distance_sq(v));
            if (cap && best > *cap) return std::nullopt;
        }
    }
    return best;
}

}  // namespace detail

/// Exact minimum squared Hausdorff distance over unordered pairs. Pairs whose
/// support-function lower bound already exceeds the running minimum are
/// skipped; the result does not depend on `jobs`.
inline SeparationResult min_pairwise_separation_sq(const std::vector<VPolytope>& family, unsigned jobs = 1) {
    const size_t k = family.size();
    if (k < 2) throw InvalidInput("separation needs at least two members");
    const size_t d = family.front().dim();
    for (const auto& p : family) {
        if (p.empty()) throw EmptySetError("family member is empty");
        if (p.dim() != d) throw DimensionMismatch("family members live in different spaces");
    }
    std::vector<std::optional<PreparedPolytope>> prepared(k);
    std::vector<std::vector<Rational>> profile(k);
    jobs = std::max(1U, jobs);

    auto run = [&](auto&& body) {
        if (jobs == 1) {
            body(0U);
            return;
        }
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(body, w);
        for (auto& t : pool) t.join();
    };
    run([&](unsigned w) {
        for (size_t i = w; i < k; i += jobs) {
            prepared[i].emplace(family[i]);
            profile[i] = detail::support_profile(family[i]);
        }
    });

    std::mutex mu;
    SeparationResult global;
    bool have = false;
    run([&](unsigned w) {
        size_t pruned = 0;
        for (size_t i = w; i < k; i += jobs)
            for (size_t j = i + 1; j < k; ++j) {
                std::optional<Rational> cap;
                {
                    std::lock_guard lock(mu);
                    if (have) cap = global.min_sq;
                }
                if (cap && detail::separation_lower_sq(profile[i], profile[j], d) > *cap) {
                    ++pruned;
                    continue;
                }
                auto h = detail::hausdorff_sq_capped(*prepared[i], *prepared[j], cap);
                if (!h) {
                    ++pruned;
                    continue;
                }
                std::lock_guard lock(mu);
                if (!have || *h < global.min_sq || (*h == global.min_sq && std::pair(i, j) < std::pair(global.i, global.j))) {
                    global.min_sq = *h;
                    global.i = i;
                    global.j = j;
                    have = true;
                }
            }
        std::lock_guard lock(mu);
        global.pairs_pruned += pruned;
    });
    return global;
}

/// max squared vertex norm over all members.
inline Rational circumradius_sq(const std::vector<VPolytope>& family) {
    if (family.empty()) throw InvalidInput("radius of an empty family");
    Rational best = 0;
    for (const auto& p : family)
        for (const auto& v : p.vertices()) best = std::max(best, norm_sq(v));
    return best;
}

/// Thresholds for random 0/1-polytopes in dimension d:
/// 2^{d/4}/(3√d) for sxc, 2^{d/2}/(9d) for xc, probability exponent −2^{d−1}.
struct Corollary41Thresholds {
    long double sxc_threshold = 0;
    long double xc_threshold = 0;
    Integer prob_exponent;
};

inline Corollary41Thresholds corollary41_thresholds(size_t d) {
    if (d < 3) throw InvalidInput("thresholds need d >= 3");
    const long double dd = static_cast<long double>(d);
    Corollary41Thresholds out;
    out.sxc_threshold = std::exp2(dd / 4) / (3 * std::sqrt(dd));
    out.xc_threshold = std::exp2(dd / 2) / (9 * dd);
    Integer e;
    mpz_ui_pow_ui(e.get_mpz_t(), 2, d - 1);
    out.prob_exponent = -e;
    return out;
}

/// Parabola n-gons with s = n²: ¼n^{1/4} and √n/15, plus the intermediate
/// steps. B is evaluated with d = 2, ρ = 2s², Δ = 1/(3s), N = C(s, n).
struct Corollary42Bounds {
    long double sxc_lower = 0;  // ¼ n^{1/4}
    long double xc_lower = 0;   // √n / 15
    BoundInputs inputs;
    BoundResult bound;
    bool chain_holds = false;     // B ≥ n/208
    bool estimate_holds = false;  // 5 + 7 log n + log log n ≤ 13 log n
    bool final_holds = false;     // (n/208)^{1/4} ≥ ¼n^{1/4} and (n/208)^{1/2} ≥ √n/15
};

inline Corollary42Bounds corollary42_bounds(size_t n) {
    if (n < 2) throw InvalidInput("n-gon bounds need n >= 2");
    const long double nn = static_cast<long double>(n);
    Corollary42Bounds out;
    out.sxc_lower = std::pow(nn, 0.25L) / 4;
    out.xc_lower = std::sqrt(nn) / 15;

    const Integer s = Integer(n) * n;
    out.inputs.d = 2;
    out.inputs.rho_sq = Rational(4 * s * s * s * s);
    out.inputs.delta_sq = Rational(Integer(1), 9 * s * s);
    mpz_bin_ui(out.inputs.N.get_mpz_t(), s.get_mpz_t(), n);
    out.bound = theorem1_bound(out.inputs);

    const long double target = nn / 208;
    out.chain_holds = out.bound.B >= target;
    const long double lg = std::log2(nn);
    out.estimate_holds = 5 + 7 * lg + std::log2(lg) <= 13 * lg;
    out.final_holds = std::pow(target, 0.25L) >= out.sxc_lower && std::sqrt(target) >= out.xc_lower;
    return out;
}

struct EFSizeClaim {
    size_t l = 1, m = 1;
};

struct CertifiedReport {
    size_t d = 0;
    Rational rho_sq, delta_sq;
    Integer N;
    BoundResult bound;
    EFSizeClaim claim;
    Integer claim_value;  // ℓ²m⁴
    bool violation = false;  // ℓ²m⁴ < B: no such formulations can exist
};

/// Exact ρ² and Δ² of the family, then B, compared with the claimed sizes.
/// Members need dimension ≥ 1 and must be pairwise distinct.
inline CertifiedReport certify_family_bound(const std::vector<VPolytope>& family, EFSizeClaim claim, unsigned jobs = 1) {
    if (family.size() < 2) throw InvalidInput("family needs at least two members");
    if (claim.l < 1 || claim.m < 1) throw InvalidInput("claimed sizes must be positive");
    for (const auto& p : family)
        if (p.empty() || p.affine_dimension() < 1) throw InvalidInput("family members need dimension >= 1");
    CertifiedReport rep;
    rep.d = family.front().dim();
    rep.rho_sq = circumradius_sq(family);
    SeparationResult sep = min_pairwise_separation_sq(family, jobs);
    if (sgn(sep.min_sq) == 0) throw InvalidInput("family members are not pairwise distinct");
    rep.delta_sq = sep.min_sq;
    rep.N = Integer(family.size());
    rep.bound = theorem1_bound({rep.d, rep.rho_sq, rep.delta_sq, rep.N});
    rep.claim = claim;
    Integer l(claim.l), m(claim.m);
    rep.claim_value = l * l * m * m * m * m;
    rep.violation = static_cast<long double>(rep.claim_value.get_d()) < rep.bound.B;
    return rep;
}

/// One claim per member; the family-wide claim takes the largest ℓ and m.
inline CertifiedReport certify_family_bound(const std::vector<VPolytope>& family, const std::vector<EFSizeClaim>& claims,
                                            unsigned jobs = 1) {
    if (claims.size() != family.size()) throw DimensionMismatch("one size claim per member");
    EFSizeClaim c{0, 0};
    for (const auto& x : claims) c = {std::max(c.l, x.l), std::max(c.m, x.m)};
    return certify_family_bound(family, c, jobs);
}

}  // namespace extcomplex
