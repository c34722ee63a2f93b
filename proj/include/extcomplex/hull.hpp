#pragma once

// Brute-force facet and vertex enumeration. Both walk over all subsets of
// the right size and keep the ones passing a one-sidedness (resp.
// feasibility) test. The inner loops run on integer data: __int128 when a
// Hadamard-style bound proves every intermediate fits, GMP integers otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "extcomplex/vpolytope.hpp"

namespace extcomplex {

namespace detail {

using i128 = __int128;

inline i128 iabs(i128 x) { return x < 0 ? -x : x; }
inline Integer iabs(const Integer& x) { return abs(x); }
inline int isign(i128 x) { return (x > 0) - (x < 0); }
inline int isign(const Integer& x) { return sgn(x); }

inline i128 igcd(i128 a, i128 b) {
    a = iabs(a);
    b = iabs(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}
inline Integer igcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Integer to_integer(i128 x) {
    bool neg = x < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(x + 1)) + 1 : static_cast<unsigned __int128>(x);
    Integer hi(static_cast<unsigned long>(static_cast<uint64_t>(u >> 64)));
    Integer lo(static_cast<unsigned long>(static_cast<uint64_t>(u)));
    Integer r = (hi << 64) + lo;
    return neg ? Integer(-r) : r;
}
inline Integer to_integer(const Integer& x) { return x; }

template <class Int>
Int from_integer(const Integer& x);
template <>
inline i128 from_integer<i128>(const Integer& x) {
    Integer a = abs(x);
    Integer lo_mask = (Integer(1) << 64) - 1;
    Integer lo = a & lo_mask, hi = a >> 64;
    i128 v = (static_cast<i128>(hi.get_ui()) << 64) | static_cast<i128>(lo.get_ui());
    return sgn(x) < 0 ? -v : v;
}
template <>
inline Integer from_integer<Integer>(const Integer& x) {
    return x;
}

// Determinant by fraction-free (Bareiss) elimination; m is k×k row-major.
template <class Int>
Int bareiss_det(std::vector<Int> m, size_t k) {
    if (k == 0) return Int(1);
    int sign = 1;
    Int prev(1);
    for (size_t c = 0; c + 1 < k; ++c) {
        if (m[c * k + c] == 0) {
            size_t p = c + 1;
            while (p < k && m[p * k + c] == 0) ++p;
            if (p == k) return Int(0);
            for (size_t j = 0; j < k; ++j) std::swap(m[c * k + j], m[p * k + j]);
            sign = -sign;
        }
        for (size_t i = c + 1; i < k; ++i) {
            for (size_t j = c + 1; j < k; ++j) {
                Int v = m[i * k + j] * m[c * k + c] - m[i * k + c] * m[c * k + j];
                m[i * k + j] = v / prev;
            }
            m[i * k + c] = 0;
        }
        prev = m[c * k + c];
    }
    Int d = m[(k - 1) * k + (k - 1)];
    return sign < 0 ? Int(-d) : d;
}

// Whether products of k-minors of integer rows bounded by `max_abs` stay
// comfortably inside 127 bits.
inline bool fits_i128(const Integer& max_abs, size_t k) {
    double m = max_abs.get_d();
    double log2_minor = k * (std::log2(m + 1.0) + 0.5 * std::log2(static_cast<double>(k) + 1.0));
    return 2.0 * log2_minor + 2.0 * std::log2(static_cast<double>(k) + 2.0) + 4.0 < 120.0;
}

inline size_t binomial_capped(size_t n, size_t k, size_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double r = 1;
    for (size_t i = 0; i < k; ++i) {
        r = r * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
        if (r > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<size_t>(r + 0.5L);
}

// Calls f(indices) for every k-subset of [0, n) in lexicographic order.
template <class F>
void for_each_subset(size_t n, size_t k, F&& f) {
    if (k > n) return;
    std::vector<size_t> idx(k);
    for (size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        f(idx);
        if (k == 0) return;
        size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Facets {(n, b) : n·q ≤ b} of the full-dimensional hull of integer points in Z^k, k ≥ 2.
template <class Int>
std::vector<std::pair<std::vector<Int>, Int>> integer_facets(const std::vector<std::vector<Int>>& pts, size_t k) {
    std::set<std::vector<Int>> found;  // normal followed by rhs, primitive
    const size_t npts = pts.size();
    std::vector<Int> minor((k - 1) * (k - 1));
    std::vector<Int> normal(k);
    for_each_subset(npts, k, [&](const std::vector<size_t>& s) {
        const auto& base = pts[s[0]];
        bool zero = true;
        for (size_t col = 0; col < k; ++col) {
            for (size_t r = 1; r < k; ++r)
                for (size_t c = 0, cc = 0; c < k; ++c) {
                    if (c == col) continue;
                    minor[(r - 1) * (k - 1) + cc++] = pts[s[r]][c] - base[c];
                }
            Int d = bareiss_det(minor, k - 1);
            normal[col] = (col % 2 == 0) ? d : Int(-d);
            if (d != 0) zero = false;
        }
        if (zero) return;
        Int b(0);
        for (size_t c = 0; c < k; ++c) b += normal[c] * base[c];
        bool pos = false, neg = false;
        for (size_t j = 0; j < npts; ++j) {
            Int v(0);
            for (size_t c = 0; c < k; ++c) v += normal[c] * pts[j][c];
            int sg = isign(Int(v - b));
            pos = pos || sg > 0;
            neg = neg || sg < 0;
            if (pos && neg) return;
        }
        std::vector<Int> key(normal);
        key.push_back(b);
        if (pos)
            for (auto& x : key) x = -x;
        Int g(0);
        for (size_t c = 0; c < k; ++c) g = igcd(g, key[c]);
        if (g != 1)
            for (auto& x : key) x /= g;
        found.insert(std::move(key));
    });
    std::vector<std::pair<std::vector<Int>, Int>> out;
    for (const auto& key : found) out.emplace_back(std::vector<Int>(key.begin(), key.end() - 1), key.back());
    return out;
}

// Vertices z = num / den of {z : g_i·z ≤ h_i} from every nonsingular k-subset of rows.
template <class Int>
std::vector<RVector> integer_vertices(const std::vector<std::vector<Int>>& g, const std::vector<Int>& h, size_t k) {
    std::set<std::vector<Rational>, decltype(&lex_less)> found(&lex_less);
    const size_t m = g.size();
    std::vector<Int> sub(k * k), rep(k * k);
    std::vector<Int> num(k);
    for_each_subset(m, k, [&](const std::vector<size_t>& s) {
        for (size_t r = 0; r < k; ++r)
            for (size_t c = 0; c < k; ++c) sub[r * k + c] = g[s[r]][c];
        Int den = bareiss_det(sub, k);
        if (den == 0) return;
        for (size_t col = 0; col < k; ++col) {
            rep = sub;
            for (size_t r = 0; r < k; ++r) rep[r * k + col] = h[s[r]];
            num[col] = bareiss_det(rep, k);
        }
        const int ds = isign(den);
        for (size_t i = 0; i < m; ++i) {
            Int lhs(0);
            for (size_t c = 0; c < k; ++c) lhs += g[i][c] * num[c];
            Int diff = h[i] * den - lhs;
            if (isign(diff) * ds < 0) return;
        }
        RVector z(k);
        Integer dz = to_integer(den);
        for (size_t c = 0; c < k; ++c) {
            z[c] = Rational(to_integer(num[c]), dz);
            z[c].canonicalize();
        }
        found.insert(std::move(z));
    });
    return {found.begin(), found.end()};
}

inline Integer common_denominator(const std::vector<RVector>& rows) {
    Integer l = 1;
    for (const auto& r : rows)
        for (const auto& x : r) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    return l;
}

inline constexpr size_t kMaxSubsets = 200'000'000;

}  // namespace detail

/// H-representation of conv(P.vertices()). Inequalities carry primitive
/// integer normals oriented outward; equations (present when P is not
/// full-dimensional) are primitive with positive leading entry. Rows are
/// sorted.
inline HPolyhedron convex_hull_facets(const VPolytope& p) {
    const size_t d = p.dim();
    const auto& pts = p.vertices();
    if (pts.empty()) throw EmptySetError("convex hull of an empty point set");
    HPolyhedron out(d);

    std::vector<RVector> diffs;
    for (size_t i = 1; i < pts.size(); ++i) diffs.push_back(pts[i] - pts[0]);
    RMatrix dmat = RMatrix::from_rows(diffs, d);
    Echelon dir = reduced_row_echelon(dmat);
    const size_t k = dir.rank();

    // affine hull equations: canonical basis of the orthogonal complement
    RMatrix normals = kernel(dmat);
    if (normals.cols() > 0) {
        Echelon eq = reduced_row_echelon(normals.transpose());
        for (size_t i = 0; i < eq.rank(); ++i) {
            RVector a = eq.reduced.row_vector(i);
            make_primitive(a);
            Rational b = dot(a, pts[0]);
            out.add_equation(std::move(a), std::move(b));
        }
    }
    if (k == 0) return out;

    const auto& coords = dir.pivots;  // projection onto these is injective on aff(P)
    const Integer scale = detail::common_denominator(pts);
    std::vector<std::vector<Integer>> q(pts.size(), std::vector<Integer>(k));
    Integer max_abs = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t c = 0; c < k; ++c) {
            Rational v = pts[i][coords[c]] * scale;
            q[i][c] = v.get_num();
            if (abs(q[i][c]) > max_abs) max_abs = abs(q[i][c]);
        }

    std::vector<std::pair<RVector, Rational>> facets;
    auto lift = [&](const auto& normal, const auto& rhs) {
        RVector a(d);
        for (size_t c = 0; c < k; ++c) a[coords[c]] = Rational(detail::to_integer(normal[c]));
        Rational b(detail::to_integer(rhs), scale);
        b.canonicalize();
        facets.emplace_back(std::move(a), std::move(b));
    };
    if (k == 1) {
        auto [lo, hi] = std::minmax_element(q.begin(), q.end(), [](const auto& x, const auto& y) { return x[0] < y[0]; });
        lift(std::vector<Integer>{1}, (*hi)[0]);
        lift(std::vector<Integer>{-1}, Integer(-(*lo)[0]));
    } else {
        if (detail::binomial_capped(pts.size(), k, detail::kMaxSubsets) > detail::kMaxSubsets)
            throw InvalidInput("facet enumeration beyond brute-force scale");
        if (detail::fits_i128(2 * max_abs, k)) {
            std::vector<std::vector<detail::i128>> qi(q.size(), std::vector<detail::i128>(k));
            for (size_t i = 0; i < q.size(); ++i)
                for (size_t c = 0; c < k; ++c) qi[i][c] = detail::from_integer<detail::i128>(q[i][c]);
            for (const auto& [n, b] : detail::integer_facets(qi, k)) lift(n, b);
        } else {
            for (const auto& [n, b] : detail::integer_facets(q, k)) lift(n, b);
        }
    }
    std::sort(facets.begin(), facets.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return lex_less(x.first, y.first);
        return x.second < y.second;
    });
    for (auto& [a, b] : facets) out.add_inequality(std::move(a), std::move(b));
    return out;
}

/// Affine parametrization x = offset + basis·z of the solution set of the
/// equations of h; nullopt when they are inconsistent.
struct EquationSpace {
    RVector offset;
    RMatrix basis;  // n × k, full column rank
};

inline std::optional<EquationSpace> solve_equations(const HPolyhedron& h) {
    const size_t n = h.dim();
    if (h.equations().empty()) return EquationSpace{RVector(n), RMatrix::identity(n)};
    std::vector<RVector> rows;
    RVector rhs;
    for (const auto& c : h.equations()) {
        rows.push_back(c.a);
        rhs.push_back(c.b);
    }
    RMatrix e = RMatrix::from_rows(rows, n);
    auto x0 = particular_solution(e, rhs);
    if (!x0) return std::nullopt;
    return EquationSpace{std::move(*x0), kernel(e)};
}

/// Exact vertex set of a bounded H-polyhedron (empty list when infeasible).
inline VPolytope enumerate_vertices(const HPolyhedron& h) {
    const size_t n = h.dim();
    if (h.flagged_empty() || !feasible_point(h)) return VPolytope(n);
    if (recession_direction(h)) throw UnboundedError("vertex enumeration of an unbounded polyhedron");
    auto space = solve_equations(h);
    if (!space) return VPolytope(n);
    const size_t k = space->basis.cols();
    if (k == 0) return VPolytope::from_canonical(n, {space->offset});

    const RMatrix bt = space->basis.transpose();
    std::vector<RVector> rows;  // [g | h] per inequality, scaled to integers
    for (const auto& c : h.inequalities()) {
        RVector row = bt.apply(c.a);
        if (is_zero(row)) continue;
        row.push_back(c.b - dot(c.a, space->offset));
        make_primitive(row);
        rows.push_back(std::move(row));
    }
    if (detail::binomial_capped(rows.size(), k, detail::kMaxSubsets) > detail::kMaxSubsets)
        throw InvalidInput("vertex enumeration beyond brute-force scale");
    Integer max_abs = 0;
    for (const auto& r : rows)
        for (const auto& x : r)
            if (abs(x.get_num()) > max_abs) max_abs = abs(x.get_num());

    std::vector<RVector> zs;
    auto run = [&]<class Int>(Int) {
        std::vector<std::vector<Int>> g(rows.size(), std::vector<Int>(k));
        std::vector<Int> rhs(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            for (size_t c = 0; c < k; ++c) g[i][c] = detail::from_integer<Int>(rows[i][c].get_num());
            rhs[i] = detail::from_integer<Int>(rows[i][k].get_num());
        }
        zs = detail::integer_vertices(g, rhs, k);
    };
    if (detail::fits_i128(max_abs, k + 1))
        run(detail::i128{});
    else
        run(Integer{});

    std::vector<RVector> xs;
    xs.reserve(zs.size());
    for (const auto& z : zs) xs.push_back(space->offset + space->basis.apply(z));
    std::sort(xs.begin(), xs.end(), lex_less);
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return VPolytope::from_canonical(n, std::move(xs));
}

}  // namespace extcomplex
