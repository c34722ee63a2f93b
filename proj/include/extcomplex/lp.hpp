#pragma once

// Exact rational linear programming (two-phase primal simplex with Bland's
// rule on a dense tableau) and the LP-backed queries built on it.

#include <optional>
#include <string>
#include <vector>

#include "extcomplex/polyhedron.hpp"

namespace extcomplex {

enum class Sense { maximize, minimize };
enum class LPStatus { optimal, infeasible, unbounded };

struct LPResult {
    LPStatus status = LPStatus::infeasible;
    Rational value;  // meaningful when optimal
    RVector x;       // basic optimal solution when optimal

    bool optimal() const { return status == LPStatus::optimal; }
};

namespace detail {

class SimplexTableau {
public:
    SimplexTableau(size_t rows, size_t cols) : rows_(rows), cols_(cols), t_(rows * (cols + 1)), basis_(rows) {}

    Rational& at(size_t r, size_t c) { return t_[r * (cols_ + 1) + c]; }
    const Rational& at(size_t r, size_t c) const { return t_[r * (cols_ + 1) + c]; }
    Rational& rhs(size_t r) { return at(r, cols_); }
    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    std::vector<size_t>& basis() { return basis_; }

    // Minimizes cost·y over the current basis, restricted to `allowed` entering
    // columns. Returns false if unbounded.
    bool minimize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
        reduced_.assign(cols_ + 1, Rational(0));
        for (size_t j = 0; j < cols_; ++j) reduced_[j] = cost[j];
        for (size_t r = 0; r < rows_; ++r) {
            const Rational& cb = cost[basis_[r]];
            if (sgn(cb) == 0) continue;
            for (size_t j = 0; j <= cols_; ++j)
                if (sgn(at(r, j)) != 0) reduced_[j] -= cb * at(r, j);
        }
        for (;;) {
            size_t enter = cols_;
            for (size_t j = 0; j < cols_; ++j)
                if (allowed[j] && sgn(reduced_[j]) < 0) {
                    enter = j;
                    break;
                }
            if (enter == cols_) return true;
            size_t leave = rows_;
            Rational best;
            for (size_t r = 0; r < rows_; ++r) {
                if (sgn(at(r, enter)) <= 0) continue;
                Rational ratio = rhs(r) / at(r, enter);
                if (leave == rows_ || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
            if (leave == rows_) return false;
            pivot(leave, enter);
        }
    }

    void pivot(size_t r, size_t c) {
        Rational inv = 1 / at(r, c);
        nz_.clear();
        for (size_t j = 0; j <= cols_; ++j)
            if (sgn(at(r, j)) != 0) {
                at(r, j) *= inv;
                nz_.push_back(j);
            }
        for (size_t i = 0; i < rows_; ++i) {
            if (i == r || sgn(at(i, c)) == 0) continue;
            Rational f = at(i, c);
            for (size_t j : nz_) at(i, j) -= f * at(r, j);
        }
        if (!reduced_.empty() && sgn(reduced_[c]) != 0) {
            Rational f = reduced_[c];
            for (size_t j : nz_) reduced_[j] -= f * at(r, j);
        }
        basis_[r] = c;
    }

    void drop_row(size_t r) {
        std::vector<Rational> t((rows_ - 1) * (cols_ + 1));
        size_t k = 0;
        for (size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            for (size_t j = 0; j <= cols_; ++j) t[k * (cols_ + 1) + j] = std::move(at(i, j));
            ++k;
        }
        t_ = std::move(t);
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

private:
    size_t rows_, cols_;
    std::vector<Rational> t_;
    std::vector<size_t> basis_;
    std::vector<Rational> reduced_;
    std::vector<size_t> nz_;
};

// Walks from an optimal point to a vertex of the optimal face by moving along
// directions that keep every tight row tight. Stops early when the polyhedron
// contains a line through the point.
inline RVector move_to_vertex(RVector x, const HPolyhedron& h) {
    const size_t n = h.dim();
    for (size_t iter = 0; iter <= n; ++iter) {
        std::vector<RVector> tight;
        for (const auto& c : h.equations()) tight.push_back(c.a);
        for (const auto& c : h.inequalities())
            if (sgn(c.slack(x)) == 0) tight.push_back(c.a);
        RMatrix k = kernel(RMatrix::from_rows(tight, n));
        if (k.cols() == 0) return x;
        RVector dir = k.col_vector(0);
        for (int flip = 0; flip < 2; ++flip) {
            std::optional<Rational> step;
            for (const auto& c : h.inequalities()) {
                Rational ad = dot(c.a, dir);
                if (sgn(ad) <= 0) continue;
                Rational s = c.slack(x) / ad;
                if (!step || s < *step) step = s;
            }
            if (step) {
                x = x + scaled(dir, *step);
                break;
            }
            if (flip == 1) return x;
            dir = scaled(dir, Rational(-1));
        }
    }
    return x;
}

}  // namespace detail

/// Exact LP over an H-polyhedron. Optimal solutions are vertices of the
/// optimal face whenever the feasible set is pointed.
inline LPResult solve_lp(const RVector& objective, const HPolyhedron& feasible, Sense sense = Sense::maximize) {
    const size_t n = feasible.dim();
    if (objective.size() != n)
        throw DimensionMismatch("objective of length " + std::to_string(objective.size()) + " over R^" + std::to_string(n));
    if (feasible.flagged_empty()) return {LPStatus::infeasible, 0, {}};

    const auto& ineqs = feasible.inequalities();
    const auto& eqs = feasible.equations();

    // Singleton rows a_j x_j ≤ b with a_j < 0 become lower bounds x_j ≥ b/a_j.
    std::vector<std::optional<Rational>> lower(n);
    std::vector<bool> absorbed(ineqs.size(), false);
    for (size_t i = 0; i < ineqs.size(); ++i) {
        size_t nz = 0, j0 = 0;
        for (size_t j = 0; j < n; ++j)
            if (sgn(ineqs[i].a[j]) != 0) {
                ++nz;
                j0 = j;
            }
        if (nz != 1 || sgn(ineqs[i].a[j0]) > 0) continue;
        Rational lb = ineqs[i].b / ineqs[i].a[j0];
        if (!lower[j0] || lb > *lower[j0]) lower[j0] = lb;
        absorbed[i] = true;
    }

    std::vector<size_t> col_of(n);
    size_t n_struct = 0;
    bool has_free = false;
    for (size_t j = 0; j < n; ++j) {
        col_of[j] = n_struct;
        n_struct += lower[j] ? 1 : 2;
        has_free = has_free || !lower[j];
    }

    struct Row {
        std::vector<Rational> coef;  // over structural columns
        Rational rhs;
        bool has_slack;
    };
    std::vector<Row> rows;
    auto build = [&](const LinearConstraint& c, bool slack) {
        Row r{std::vector<Rational>(n_struct), c.b, slack};
        for (size_t j = 0; j < n; ++j) {
            if (sgn(c.a[j]) == 0) continue;
            r.coef[col_of[j]] = c.a[j];
            if (lower[j])
                r.rhs -= c.a[j] * *lower[j];
            else
                r.coef[col_of[j] + 1] = -c.a[j];
        }
        rows.push_back(std::move(r));
    };
    for (size_t i = 0; i < ineqs.size(); ++i)
        if (!absorbed[i]) build(ineqs[i], true);
    for (const auto& c : eqs) build(c, false);

    const size_t m = rows.size();
    size_t n_slack = 0;
    for (const auto& r : rows) n_slack += r.has_slack ? 1 : 0;
    std::vector<bool> needs_art(m);
    size_t n_art = 0;
    for (size_t i = 0; i < m; ++i) {
        needs_art[i] = !rows[i].has_slack || sgn(rows[i].rhs) < 0;
        n_art += needs_art[i] ? 1 : 0;
    }
    const size_t n_cols = n_struct + n_slack + n_art;
    detail::SimplexTableau tab(m, n_cols);
    size_t slack_col = n_struct, art_col = n_struct + n_slack;
    for (size_t i = 0; i < m; ++i) {
        const bool neg = sgn(rows[i].rhs) < 0;
        for (size_t j = 0; j < n_struct; ++j)
            if (sgn(rows[i].coef[j]) != 0) tab.at(i, j) = neg ? Rational(-rows[i].coef[j]) : rows[i].coef[j];
        tab.rhs(i) = neg ? Rational(-rows[i].rhs) : rows[i].rhs;
        if (rows[i].has_slack) {
            tab.at(i, slack_col) = neg ? -1 : 1;
            if (!needs_art[i]) tab.basis()[i] = slack_col;
            ++slack_col;
        }
        if (needs_art[i]) {
            tab.at(i, art_col) = 1;
            tab.basis()[i] = art_col;
            ++art_col;
        }
    }

    const size_t first_art = n_struct + n_slack;
    if (n_art > 0) {
        std::vector<Rational> cost(n_cols);
        for (size_t j = first_art; j < n_cols; ++j) cost[j] = 1;
        std::vector<bool> allowed(n_cols, true);
        tab.minimize(cost, allowed);
        Rational infeas = 0;
        for (size_t r = 0; r < tab.rows(); ++r)
            if (tab.basis()[r] >= first_art) infeas += tab.rhs(r);
        if (sgn(infeas) > 0) return {LPStatus::infeasible, 0, {}};
        for (size_t r = 0; r < tab.rows();) {
            if (tab.basis()[r] < first_art) {
                ++r;
                continue;
            }
            size_t j = 0;
            while (j < first_art && sgn(tab.at(r, j)) == 0) ++j;
            if (j < first_art) {
                tab.pivot(r, j);
                ++r;
            } else {
                tab.drop_row(r);
            }
        }
    }

    std::vector<Rational> cost(n_cols);
    for (size_t j = 0; j < n; ++j) {
        Rational c = sense == Sense::maximize ? Rational(-objective[j]) : objective[j];
        cost[col_of[j]] = c;
        if (!lower[j]) cost[col_of[j] + 1] = -c;
    }
    std::vector<bool> allowed(n_cols, true);
    for (size_t j = first_art; j < n_cols; ++j) allowed[j] = false;
    if (!tab.minimize(cost, allowed)) return {LPStatus::unbounded, 0, {}};

    std::vector<Rational> y(n_cols);
    for (size_t r = 0; r < tab.rows(); ++r) y[tab.basis()[r]] = tab.rhs(r);
    RVector x(n);
    for (size_t j = 0; j < n; ++j)
        x[j] = lower[j] ? Rational(*lower[j] + y[col_of[j]]) : Rational(y[col_of[j]] - y[col_of[j] + 1]);
    if (has_free) x = detail::move_to_vertex(std::move(x), feasible);
    Rational value = dot(objective, x);
    return {LPStatus::optimal, value, std::move(x)};
}

/// Some point of h, or nullopt when h is empty.
inline std::optional<RVector> feasible_point(const HPolyhedron& h) {
    LPResult r = solve_lp(RVector(h.dim()), h);
    if (!r.optimal()) return std::nullopt;
    return r.x;
}

/// A nonzero u with A·u ≤ 0 and E·u = 0 when the non-empty polyhedron is
/// unbounded; nullopt when it is bounded.
inline std::optional<RVector> recession_direction(const HPolyhedron& c) {
    if (!feasible_point(c)) throw EmptySetError("recession direction of an empty polyhedron");
    const size_t n = c.dim();
    HPolyhedron cone(n);
    for (const auto& row : c.inequalities()) cone.add_inequality(row.a, 0);
    for (const auto& row : c.equations()) cone.add_equation(row.a, 0);
    for (size_t j = 0; j < n; ++j) {
        RVector e(n);
        e[j] = 1;
        cone.add_inequality(e, 1);
        e[j] = -1;
        cone.add_inequality(e, 1);
    }
    for (size_t j = 0; j < n; ++j)
        for (int s : {1, -1}) {
            RVector obj(n);
            obj[j] = s;
            LPResult r = solve_lp(obj, cone);
            if (r.optimal() && sgn(r.value) > 0) return r.x;
        }
    return std::nullopt;
}

inline bool is_bounded(const HPolyhedron& c) { return !recession_direction(c).has_value(); }

/// Indices of inequalities that hold with equality on all of the (non-empty) h.
inline std::vector<size_t> implicit_equalities(const HPolyhedron& h) {
    std::vector<size_t> out;
    const auto& ineqs = h.inequalities();
    std::vector<bool> loose(ineqs.size(), false);
    auto mark = [&](const RVector& x) {
        for (size_t i = 0; i < ineqs.size(); ++i)
            if (sgn(ineqs[i].slack(x)) > 0) loose[i] = true;
    };
    if (auto p = feasible_point(h))
        mark(*p);
    else
        throw EmptySetError("implicit equalities of an empty polyhedron");
    for (size_t i = 0; i < ineqs.size(); ++i) {
        if (loose[i]) continue;
        LPResult r = solve_lp(ineqs[i].a, h, Sense::minimize);
        if (r.status == LPStatus::unbounded) {
            loose[i] = true;
            continue;
        }
        mark(r.x);
        if (!loose[i]) out.push_back(i);
    }
    return out;
}

}  // namespace extcomplex
