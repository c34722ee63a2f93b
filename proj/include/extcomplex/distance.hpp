#pragma once

// Exact squared Euclidean distances between points and polytopes, and the
// squared Hausdorff distance between two polytopes.

#include <algorithm>
#include <set>
#include <vector>

#include "extcomplex/hull.hpp"

namespace extcomplex {

/// A polytope with its face lattice precomputed: for each face, a base vertex
/// and the orthogonal projector onto the face's direction space.
class PreparedPolytope {
public:
    struct Face {
        std::vector<size_t> vertex_ids;
        RVector base;
        RMatrix projector;  // d×d, zero for vertices
    };

    explicit PreparedPolytope(VPolytope p) : poly_(std::move(p)) {
        if (poly_.empty()) throw EmptySetError("distance to an empty polytope");
        hrep_ = convex_hull_facets(poly_);
        build_faces();
    }

    const VPolytope& polytope() const { return poly_; }
    const HPolyhedron& hrep() const { return hrep_; }
    const std::vector<Face>& faces() const { return faces_; }

    /// Squared distance from p: minimum over faces of the distance to the
    /// orthogonal projection onto the face's affine hull, counted only when
    /// that projection lies in the polytope.
    Rational distance_sq(std::span<const Rational> p) const {
        if (p.size() != poly_.dim()) throw DimensionMismatch("point vs polytope dimension");
        if (hrep_.contains(p)) return 0;
        std::optional<Rational> best;
        RVector rel(p.size()), proj(p.size());
        for (const auto& f : faces_) {
            for (size_t i = 0; i < p.size(); ++i) rel[i] = p[i] - f.base[i];
            for (size_t i = 0; i < p.size(); ++i) proj[i] = f.base[i] + dot(f.projector.row(i), rel);
            Rational dsq = norm_sq(RVector(p.begin(), p.end()) - proj);
            if (best && dsq >= *best) continue;
            if (!hrep_.contains(proj)) continue;
            best = dsq;
        }
        return *best;  // vertices always qualify
    }

private:
    void build_faces() {
        const auto& v = poly_.vertices();
        std::vector<std::vector<size_t>> facet_sets;
        for (const auto& c : hrep_.inequalities()) {
            std::vector<size_t> s;
            for (size_t i = 0; i < v.size(); ++i)
                if (sgn(c.slack(v[i])) == 0) s.push_back(i);
            facet_sets.push_back(std::move(s));
        }
        std::set<std::vector<size_t>> seen;
        std::vector<std::vector<size_t>> queue;
        std::vector<size_t> all(v.size());
        for (size_t i = 0; i < v.size(); ++i) all[i] = i;
        seen.insert(all);
        queue.push_back(all);
        for (size_t i = 0; i < v.size(); ++i)
            if (seen.insert({i}).second) queue.push_back({i});
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            for (const auto& fs : facet_sets) {
                std::vector<size_t> meet;
                std::set_intersection(queue[qi].begin(), queue[qi].end(), fs.begin(), fs.end(), std::back_inserter(meet));
                if (!meet.empty() && seen.insert(meet).second) queue.push_back(meet);
            }
        }
        const size_t d = poly_.dim();
        for (auto& ids : queue) {
            Face f{ids, v[ids[0]], RMatrix(d, d)};
            std::vector<RVector> diffs;
            for (size_t i = 1; i < ids.size(); ++i) diffs.push_back(v[ids[i]] - f.base);
            Echelon e = reduced_row_echelon(RMatrix::from_rows(diffs, d));
            if (e.rank() > 0) {
                const RMatrix& r = e.reduced;  // rank × d, rows span the direction space
                RMatrix gram_inv = *inverse(r * r.transpose());
                f.projector = r.transpose() * gram_inv * r;
            }
            faces_.push_back(std::move(f));
        }
    }

    VPolytope poly_;
    HPolyhedron hrep_;
    std::vector<Face> faces_;
};

inline Rational point_polytope_distance_sq(std::span<const Rational> p, const PreparedPolytope& poly) {
    return poly.distance_sq(p);
}

inline Rational point_polytope_distance_sq(std::span<const Rational> p, const VPolytope& poly) {
    return PreparedPolytope(poly).distance_sq(p);
}

/// max over vertices of each polytope of the squared distance to the other.
inline Rational hausdorff_distance_sq(const PreparedPolytope& a, const PreparedPolytope& b) {
    if (a.polytope().dim() != b.polytope().dim()) throw DimensionMismatch("Hausdorff distance across dimensions");
    Rational best = 0;
    for (const auto& v : a.polytope().vertices()) best = std::max(best, b.distance_sq(v));
    for (const auto& v : b.polytope().vertices()) best = std::max(best, a.distance_sq(v));
    return best;
}

inline Rational hausdorff_distance_sq(const VPolytope& a, const VPolytope& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("Hausdorff distance across dimensions");
    return hausdorff_distance_sq(PreparedPolytope(a), PreparedPolytope(b));
}

}  // namespace extcomplex
