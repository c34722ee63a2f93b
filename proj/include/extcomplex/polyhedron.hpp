#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "extcomplex/rational.hpp"

namespace extcomplex {

/// One row a·x ≤ b (or a·x = b when stored as an equation).
struct LinearConstraint {
    RVector a;
    Rational b;

    Rational slack(std::span<const Rational> x) const { return b - dot(a, x); }
    friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

/// {x ∈ R^n : a·x ≤ b for each inequality, a·x = b for each equation}.
/// size() counts inequalities only; equations are free.
class HPolyhedron {
public:
    HPolyhedron() = default;
    explicit HPolyhedron(size_t dim) : dim_(dim) {}
    HPolyhedron(size_t dim, std::vector<LinearConstraint> ineqs, std::vector<LinearConstraint> eqs = {})
        : dim_(dim) {
        for (auto& c : ineqs) add_inequality(std::move(c.a), std::move(c.b));
        for (auto& c : eqs) add_equation(std::move(c.a), std::move(c.b));
    }

    size_t dim() const { return dim_; }
    size_t size() const { return ineqs_.size(); }
    const std::vector<LinearConstraint>& inequalities() const { return ineqs_; }
    const std::vector<LinearConstraint>& equations() const { return eqs_; }

    /// True when some row is trivially violated (0 ≤ b < 0 or 0 = b ≠ 0).
    bool flagged_empty() const { return flagged_empty_; }

    void add_inequality(RVector a, Rational b) {
        check(a);
        if (is_zero(a) && sgn(b) < 0) flagged_empty_ = true;
        ineqs_.push_back({std::move(a), std::move(b)});
    }
    void add_equation(RVector a, Rational b) {
        check(a);
        if (is_zero(a) && sgn(b) != 0) flagged_empty_ = true;
        eqs_.push_back({std::move(a), std::move(b)});
    }

    bool contains(std::span<const Rational> x) const {
        if (x.size() != dim_) throw DimensionMismatch("point of dimension " + std::to_string(x.size()) +
                                                      " tested against polyhedron in R^" + std::to_string(dim_));
        for (const auto& c : ineqs_)
            if (sgn(c.slack(x)) < 0) return false;
        for (const auto& c : eqs_)
            if (sgn(c.slack(x)) != 0) return false;
        return true;
    }

    /// The same set with extra rows appended.
    HPolyhedron with(std::vector<LinearConstraint> extra_ineqs, std::vector<LinearConstraint> extra_eqs = {}) const {
        HPolyhedron h = *this;
        for (auto& c : extra_ineqs) h.add_inequality(std::move(c.a), std::move(c.b));
        for (auto& c : extra_eqs) h.add_equation(std::move(c.a), std::move(c.b));
        return h;
    }

    friend bool operator==(const HPolyhedron&, const HPolyhedron&) = default;

private:
    void check(const RVector& a) const {
        if (a.size() != dim_)
            throw DimensionMismatch("constraint of length " + std::to_string(a.size()) + " in R^" + std::to_string(dim_));
    }

    size_t dim_ = 0;
    std::vector<LinearConstraint> ineqs_;
    std::vector<LinearConstraint> eqs_;
    bool flagged_empty_ = false;
};

/// x ↦ matrix·x + offset, R^n → R^d.
class AffineMap {
public:
    AffineMap() = default;
    AffineMap(RMatrix matrix, RVector offset) : matrix_(std::move(matrix)), offset_(std::move(offset)) {
        if (offset_.size() != matrix_.rows())
            throw DimensionMismatch("affine map offset length " + std::to_string(offset_.size()) + " vs " +
                                    std::to_string(matrix_.rows()) + " rows");
    }

    static AffineMap identity(size_t n) { return {RMatrix::identity(n), RVector(n)}; }

    size_t in_dim() const { return matrix_.cols(); }
    size_t out_dim() const { return matrix_.rows(); }
    const RMatrix& matrix() const { return matrix_; }
    const RVector& offset() const { return offset_; }

    RVector apply(std::span<const Rational> x) const { return matrix_.apply(x) + offset_; }

    /// this ∘ inner
    AffineMap compose(const AffineMap& inner) const {
        if (inner.out_dim() != in_dim()) throw DimensionMismatch("affine map composition");
        return {matrix_ * inner.matrix_, matrix_.apply(inner.offset_) + offset_};
    }

    friend bool operator==(const AffineMap&, const AffineMap&) = default;

private:
    RMatrix matrix_;
    RVector offset_;
};

/// Pulls the rows of h back along x = map(z): a·(M z + o) ≤ b.
inline HPolyhedron pull_back(const HPolyhedron& h, const AffineMap& map) {
    if (map.out_dim() != h.dim()) throw DimensionMismatch("pull-back of polyhedron");
    const RMatrix mt = map.matrix().transpose();
    HPolyhedron out(map.in_dim());
    for (const auto& c : h.inequalities()) out.add_inequality(mt.apply(c.a), c.b - dot(c.a, map.offset()));
    for (const auto& c : h.equations()) out.add_equation(mt.apply(c.a), c.b - dot(c.a, map.offset()));
    return out;
}

}  // namespace extcomplex
