#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "extcomplex/lp.hpp"

namespace extcomplex {

/// Convex hull of finitely many rational points, stored by its vertex list
/// (duplicate-free, extreme points only, lexicographically sorted).
class VPolytope {
public:
    VPolytope() = default;
    explicit VPolytope(size_t dim) : dim_(dim) {}

    /// Canonicalizes: drops duplicates and non-extreme points, sorts.
    static VPolytope from_points(size_t dim, std::vector<RVector> points) {
        for (const auto& p : points)
            if (p.size() != dim)
                throw DimensionMismatch("point of length " + std::to_string(p.size()) + " in R^" + std::to_string(dim));
        std::sort(points.begin(), points.end(), lex_less);
        points.erase(std::unique(points.begin(), points.end()), points.end());
        VPolytope v(dim);
        if (all_zero_one(points)) {
            v.vertices_ = std::move(points);
            return v;
        }
        for (size_t i = 0; i < points.size(); ++i)
            if (!in_hull_of_others(points, i)) v.vertices_.push_back(points[i]);
        return v;
    }

    /// Trusts the caller that `vertices` is already canonical.
    static VPolytope from_canonical(size_t dim, std::vector<RVector> vertices) {
        VPolytope v(dim);
        v.vertices_ = std::move(vertices);
        return v;
    }

    size_t dim() const { return dim_; }
    const std::vector<RVector>& vertices() const { return vertices_; }
    size_t num_vertices() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }

    /// Dimension of the affine hull; -1 for the empty polytope.
    int affine_dimension() const {
        if (vertices_.empty()) return -1;
        std::vector<RVector> diffs;
        for (size_t i = 1; i < vertices_.size(); ++i) diffs.push_back(vertices_[i] - vertices_[0]);
        return static_cast<int>(rank(RMatrix::from_rows(diffs, dim_)));
    }

    friend bool operator==(const VPolytope&, const VPolytope&) = default;

private:
    static bool all_zero_one(const std::vector<RVector>& pts) {
        for (const auto& p : pts)
            for (const auto& x : p)
                if (x != 0 && x != 1) return false;
        return true;
    }

    // λ ≥ 0, Σλ = 1, Σ λ_j p_j = p_i over j ≠ i
    static bool in_hull_of_others(const std::vector<RVector>& pts, size_t i) {
        if (pts.size() == 1) return false;
        const size_t k = pts.size() - 1, d = pts[i].size();
        HPolyhedron h(k);
        for (size_t j = 0; j < k; ++j) {
            RVector e(k);
            e[j] = -1;
            h.add_inequality(std::move(e), 0);
        }
        h.add_equation(RVector(k, Rational(1)), 1);
        for (size_t c = 0; c < d; ++c) {
            RVector row(k);
            for (size_t j = 0, col = 0; j < pts.size(); ++j)
                if (j != i) row[col++] = pts[j][c];
            h.add_equation(std::move(row), pts[i][c]);
        }
        return feasible_point(h).has_value();
    }

    size_t dim_ = 0;
    std::vector<RVector> vertices_;
};

}  // namespace extcomplex
