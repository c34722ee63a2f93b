#pragma once

// Builders for linear extended formulations: the vertex simplex lift,
// disjunctive unions, products, and the prefix/suffix decomposition of 0/1
// point sets.

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "extcomplex/extform.hpp"

namespace extcomplex {

/// λ ≥ 0, Σλ = 1, projected by λ ↦ Σ λ_i v_i.
inline LinearEF trivial_vrep_ef(const VPolytope& v) {
    if (v.empty()) throw EmptySetError("trivial formulation of an empty set");
    const size_t k = v.num_vertices(), d = v.dim();
    HPolyhedron lifted(k);
    for (size_t i = 0; i < k; ++i) {
        RVector e(k);
        e[i] = -1;
        lifted.add_inequality(std::move(e), 0);
    }
    lifted.add_equation(RVector(k, Rational(1)), 1);
    RMatrix m(d, k);
    for (size_t i = 0; i < k; ++i)
        for (size_t r = 0; r < d; ++r) m(r, i) = v.vertices()[i][r];
    return {std::move(lifted), AffineMap(std::move(m), RVector(d))};
}

/// Disjunctive lift of conv(∪ proj_i(Q_i)) over variables (x¹, …, x^ℓ, λ):
/// A_i x^i ≤ λ_i b_i, E_i x^i = λ_i e_i, λ ≥ 0, Σλ = 1.
inline LinearEF balas_union(const std::vector<LinearEF>& efs) {
    if (efs.empty()) throw InvalidInput("union of no formulations");
    const size_t d = efs.front().proj.out_dim();
    size_t total = 0;
    for (const auto& ef : efs) {
        if (ef.proj.out_dim() != d) throw DimensionMismatch("union pieces live in different spaces");
        if (ef.proj.in_dim() != ef.lifted.dim()) throw DimensionMismatch("piece projection vs lifted dimension");
        if (feasible_point(ef.lifted) && !is_bounded(ef.lifted)) throw UnboundedError("union piece is unbounded");
        total += ef.lifted.dim();
    }
    const size_t l = efs.size(), dim = total + l;
    HPolyhedron lifted(dim);
    RMatrix proj(d, dim);
    RVector offset(d);
    size_t base = 0;
    for (size_t i = 0; i < l; ++i) {
        const auto& ef = efs[i];
        const size_t ni = ef.lifted.dim(), lam = total + i;
        auto homogenize = [&](const LinearConstraint& c) {
            RVector row(dim);
            for (size_t j = 0; j < ni; ++j) row[base + j] = c.a[j];
            row[lam] = -c.b;
            return row;
        };
        for (const auto& c : ef.lifted.inequalities()) lifted.add_inequality(homogenize(c), 0);
        for (const auto& c : ef.lifted.equations()) lifted.add_equation(homogenize(c), 0);
        for (size_t r = 0; r < d; ++r) {
            for (size_t j = 0; j < ni; ++j) proj(r, base + j) = ef.proj.matrix()(r, j);
            proj(r, lam) = ef.proj.offset()[r];
        }
        base += ni;
    }
    for (size_t i = 0; i < l; ++i) {
        RVector e(dim);
        e[total + i] = -1;
        lifted.add_inequality(std::move(e), 0);
    }
    RVector ones(dim);
    for (size_t i = 0; i < l; ++i) ones[total + i] = 1;
    lifted.add_equation(std::move(ones), 1);
    return {std::move(lifted), AffineMap(std::move(proj), std::move(offset))};
}

/// Lift of P₁ × P₂ on the concatenated variables.
inline LinearEF product_ef(const LinearEF& a, const LinearEF& b) {
    const size_t n1 = a.lifted.dim(), n2 = b.lifted.dim();
    const size_t d1 = a.proj.out_dim(), d2 = b.proj.out_dim();
    HPolyhedron lifted(n1 + n2);
    auto embed = [&](const RVector& row, size_t at) {
        RVector out(n1 + n2);
        std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
        return out;
    };
    for (const auto& c : a.lifted.inequalities()) lifted.add_inequality(embed(c.a, 0), c.b);
    for (const auto& c : b.lifted.inequalities()) lifted.add_inequality(embed(c.a, n1), c.b);
    for (const auto& c : a.lifted.equations()) lifted.add_equation(embed(c.a, 0), c.b);
    for (const auto& c : b.lifted.equations()) lifted.add_equation(embed(c.a, n1), c.b);
    RMatrix m(d1 + d2, n1 + n2);
    RVector off(d1 + d2);
    for (size_t r = 0; r < d1; ++r) {
        for (size_t j = 0; j < n1; ++j) m(r, j) = a.proj.matrix()(r, j);
        off[r] = a.proj.offset()[r];
    }
    for (size_t r = 0; r < d2; ++r) {
        for (size_t j = 0; j < n2; ++j) m(d1 + r, n1 + j) = b.proj.matrix()(r, j);
        off[d1 + r] = b.proj.offset()[r];
    }
    return {std::move(lifted), AffineMap(std::move(m), std::move(off))};
}

using BitTuple = std::vector<unsigned char>;

/// V = ∪ X_i × Y_i, where the X_i partition the prefixes (first d−s
/// coordinates) by their suffix fibre Y_x = {y : (x, y) ∈ V}.
struct ShannonPlan {
    struct Group {
        std::vector<BitTuple> suffixes;  // Y_i
        std::vector<BitTuple> prefixes;  // X_i
    };
    size_t d = 0;
    size_t s = 0;
    std::vector<Group> groups;  // sorted by suffix pattern
    Integer declared_bound;     // 2^{d−s} + 2^{2^s}(2^s + 1)
};

inline size_t default_suffix_width(size_t d) {
    if (d < 4) return 0;
    return static_cast<size_t>(std::bit_width(d / 4) - 1);  // ⌊log₂(d/4)⌋
}

inline Integer shannon_declared_bound(size_t d, size_t s) {
    if (s > 24) throw InvalidInput("suffix width too large to evaluate the size bound");
    Integer a, l;
    mpz_ui_pow_ui(a.get_mpz_t(), 2, d - s);
    mpz_ui_pow_ui(l.get_mpz_t(), 2, 1UL << s);
    return a + l * ((Integer(1) << static_cast<mp_bitcnt_t>(s)) + 1);
}

inline std::vector<BitTuple> zero_one_points(const VPolytope& v) {
    std::vector<BitTuple> out;
    for (const auto& p : v.vertices()) {
        BitTuple b;
        for (const auto& x : p) {
            if (x != 0 && x != 1) throw InvalidInput("point is not a 0/1 vector");
            b.push_back(x == 1 ? 1 : 0);
        }
        out.push_back(std::move(b));
    }
    return out;
}

inline ShannonPlan shannon_01_plan(const VPolytope& v, std::optional<size_t> s_opt = std::nullopt) {
    if (v.empty()) throw EmptySetError("decomposition of an empty point set");
    const size_t d = v.dim();
    const size_t s = s_opt.value_or(default_suffix_width(d));
    if (s > d) throw InvalidInput("suffix width " + std::to_string(s) + " exceeds dimension " + std::to_string(d));
    ShannonPlan plan{d, s, {}, shannon_declared_bound(d, s)};

    std::map<BitTuple, std::vector<BitTuple>> fibres;
    for (const auto& p : zero_one_points(v)) {
        BitTuple x(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(d - s));
        BitTuple y(p.begin() + static_cast<std::ptrdiff_t>(d - s), p.end());
        fibres[x].push_back(std::move(y));
    }
    std::map<std::vector<BitTuple>, std::vector<BitTuple>> groups;
    for (auto& [x, ys] : fibres) {
        std::sort(ys.begin(), ys.end());
        groups[ys].push_back(x);
    }
    for (auto& [ys, xs] : groups) plan.groups.push_back({ys, xs});
    return plan;
}

inline VPolytope bit_polytope(size_t dim, const std::vector<BitTuple>& pts) {
    std::vector<RVector> rows;
    for (const auto& p : pts) {
        RVector r(dim);
        for (size_t i = 0; i < dim; ++i) r[i] = p[i];
        rows.push_back(std::move(r));
    }
    return VPolytope::from_points(dim, std::move(rows));
}

/// conv(V) as the disjunctive union of the pieces conv(X_i) × conv(Y_i).
/// Size is (#groups) + Σ(|X_i| + |Y_i|).
inline LinearEF shannon_01_ef(const ShannonPlan& plan) {
    std::vector<LinearEF> pieces;
    for (const auto& g : plan.groups)
        pieces.push_back(product_ef(trivial_vrep_ef(bit_polytope(plan.d - plan.s, g.prefixes)),
                                    trivial_vrep_ef(bit_polytope(plan.s, g.suffixes))));
    LinearEF ef = balas_union(pieces);
    if (Integer(ef.size()) > plan.declared_bound) throw CertificateError("decomposition exceeds its declared size bound");
    return ef;
}

inline LinearEF shannon_01_ef(const VPolytope& v, std::optional<size_t> s = std::nullopt) {
    return shannon_01_ef(shannon_01_plan(v, s));
}

}  // namespace extcomplex
