#pragma once

// Maximum-volume inscribed ellipsoid of a full-dimensional polytope.
//
// The ellipsoid is c + L·B with L lower triangular. Containment in the facet
// a·x ≤ b reads ‖Lᵀa‖ ≤ b − a·c, a second-order cone constraint, so the
// problem is handled with a barrier method: minimize
//   −t·Σ log L_kk − Σ_i log((b_i − a_i·c)² − ‖Lᵀa_i‖²)
// by damped Newton steps while t grows geometrically.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "extcomplex/hull.hpp"

namespace extcomplex {

struct Ellipsoid {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;  // E = center + shape·B

    double log_volume = 0.0;    // log|det shape|
    double inner_slack = 0.0;   // max_i (h_E(a_i) − b_i) / (‖a_i‖·R); ≤ 0 means inside
    double outer_factor = 0.0;  // max over vertices of ‖shape⁻¹(v − center)‖
    int iterations = 0;

    size_t dim() const { return static_cast<size_t>(center.size()); }

    /// Gauge ‖shape⁻¹(x − center)‖; E is its unit sublevel set.
    double gauge(const Eigen::VectorXd& x) const {
        return shape.fullPivLu().solve(x - center).norm();
    }
};

namespace detail {

struct JohnProblem {
    size_t n = 0;
    std::vector<Eigen::VectorXd> a;  // unit normals
    std::vector<double> b;
    std::vector<std::pair<size_t, size_t>> lower;  // (row, col) of each L variable

    size_t size() const { return n + lower.size(); }

    void unpack(const Eigen::VectorXd& z, Eigen::VectorXd& c, Eigen::MatrixXd& l) const {
        c = z.head(n);
        l = Eigen::MatrixXd::Zero(n, n);
        for (size_t k = 0; k < lower.size(); ++k) l(lower[k].first, lower[k].second) = z(n + k);
    }

    // Objective value, +inf outside the domain.
    double value(const Eigen::VectorXd& z, double t) const {
        Eigen::VectorXd c;
        Eigen::MatrixXd l;
        unpack(z, c, l);
        double f = 0;
        for (size_t k = 0; k < n; ++k) {
            if (l(k, k) <= 0) return std::numeric_limits<double>::infinity();
            f -= t * std::log(l(k, k));
        }
        for (size_t i = 0; i < a.size(); ++i) {
            double s = b[i] - a[i].dot(c);
            double w = (l.transpose() * a[i]).norm();
            if (s <= w) return std::numeric_limits<double>::infinity();
            f -= std::log(s * s - w * w);
        }
        return f;
    }

    void derivatives(const Eigen::VectorXd& z, double t, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
        const size_t dim = size();
        Eigen::VectorXd c;
        Eigen::MatrixXd l;
        unpack(z, c, l);
        g = Eigen::VectorXd::Zero(dim);
        h = Eigen::MatrixXd::Zero(dim, dim);
        for (size_t k = 0; k < lower.size(); ++k) {
            auto [r, col] = lower[k];
            if (r == col) {
                g(n + k) -= t / l(r, r);
                h(n + k, n + k) += t / (l(r, r) * l(r, r));
            }
        }
        Eigen::VectorXd gq(dim);
        for (size_t i = 0; i < a.size(); ++i) {
            const Eigen::VectorXd& ai = a[i];
            double s = b[i] - ai.dot(c);
            Eigen::VectorXd w = l.transpose() * ai;
            double q = s * s - w.squaredNorm();
            gq.head(n) = -2.0 * s * ai;
            for (size_t k = 0; k < lower.size(); ++k) {
                auto [r, col] = lower[k];
                gq(n + k) = -2.0 * w(col) * ai(r);
            }
            g -= gq / q;
            h.noalias() += gq * gq.transpose() / (q * q);
            // −∇²q / q
            h.topLeftCorner(n, n).noalias() -= 2.0 * ai * ai.transpose() / q;
            for (size_t k = 0; k < lower.size(); ++k) {
                auto [r, col] = lower[k];
                for (size_t k2 = 0; k2 < lower.size(); ++k2) {
                    auto [r2, col2] = lower[k2];
                    if (col == col2) h(n + k, n + k2) += 2.0 * ai(r) * ai(r2) / q;
                }
            }
        }
    }
};

}  // namespace detail

/// Maximum-volume ellipsoid inside a bounded full-dimensional polyhedron.
/// The result satisfies E ⊆ P and P ⊆ c + n(E − c), both checked on the
/// vertices and facets of P with relative slack `tol`.
/// `verts` must be the vertex set of p.
inline Ellipsoid john_ellipsoid(const HPolyhedron& p, const VPolytope& verts, double tol = 1e-8,
                                int max_iterations = 10000) {
    const size_t n = p.dim();
    if (n == 0) throw InvalidInput("John ellipsoid in dimension 0");
    if (verts.dim() != n) throw DimensionMismatch("vertex list vs polyhedron dimension");
    if (verts.empty()) throw EmptySetError("John ellipsoid of an empty polyhedron");
    if (verts.affine_dimension() < static_cast<int>(n))
        throw InvalidInput("John ellipsoid needs a full-dimensional polytope");

    // Work in coordinates centred at the vertex centroid and scaled to radius 1.
    std::vector<Eigen::VectorXd> vs;
    for (const auto& v : verts.vertices()) {
        Eigen::VectorXd x(n);
        for (size_t i = 0; i < n; ++i) x(i) = to_double(v[i]);
        vs.push_back(x);
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (const auto& v : vs) centroid += v;
    centroid /= static_cast<double>(vs.size());
    double radius = 0;
    for (const auto& v : vs) radius = std::max(radius, (v - centroid).norm());

    detail::JohnProblem prob;
    prob.n = n;
    for (size_t col = 0; col < n; ++col)
        for (size_t r = col; r < n; ++r) prob.lower.emplace_back(r, col);
    std::vector<Eigen::VectorXd> raw_a;
    std::vector<double> raw_b;
    for (const auto& con : p.inequalities()) {
        Eigen::VectorXd a(n);
        for (size_t i = 0; i < n; ++i) a(i) = to_double(con.a[i]);
        double norm = a.norm();
        if (norm == 0) continue;
        raw_a.push_back(a);
        raw_b.push_back(to_double(con.b));
        prob.a.push_back(a / norm);
        prob.b.push_back((to_double(con.b) - a.dot(centroid)) / (norm * radius));
    }
    const double m = static_cast<double>(prob.a.size());

    double r0 = std::numeric_limits<double>::infinity();
    for (double bi : prob.b) r0 = std::min(r0, bi);
    if (!(r0 > 0)) throw ConvergenceError("vertex centroid is not interior");

    Eigen::VectorXd z = Eigen::VectorXd::Zero(prob.size());
    for (size_t k = 0; k < prob.lower.size(); ++k)
        if (prob.lower[k].first == prob.lower[k].second) z(n + k) = 0.5 * r0;

    Ellipsoid e;
    auto finish = [&](const Eigen::VectorXd& zz) {
        Eigen::VectorXd c;
        Eigen::MatrixXd l;
        prob.unpack(zz, c, l);
        e.center = centroid + radius * c;
        e.shape = radius * l;
        e.log_volume = 0;
        for (size_t k = 0; k < n; ++k) e.log_volume += std::log(e.shape(k, k));
        e.inner_slack = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < raw_a.size(); ++i) {
            double support = raw_a[i].dot(e.center) + (e.shape.transpose() * raw_a[i]).norm();
            e.inner_slack = std::max(e.inner_slack, (support - raw_b[i]) / (raw_a[i].norm() * radius));
        }
        e.outer_factor = 0;
        auto lu = e.shape.triangularView<Eigen::Lower>();
        for (const auto& v : vs) e.outer_factor = std::max(e.outer_factor, lu.solve(v - e.center).norm());
    };
    auto certified = [&] {
        return e.inner_slack <= tol && e.outer_factor <= static_cast<double>(n) * (1.0 + tol);
    };

    const double mu = 8.0;
    const double t_goal = 2.0 * m / tol;
    double t = 1.0;
    int iters = 0;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    while (true) {
        int stage_steps = 0;
        while (true) {  // centering
            if (++iters > max_iterations) throw ConvergenceError("John ellipsoid: iteration cap reached");
            prob.derivatives(z, t, g, h);
            Eigen::VectorXd step = h.ldlt().solve(-g);
            double decrement = -g.dot(step);
            if (!std::isfinite(decrement)) throw ConvergenceError("John ellipsoid: singular Newton system");
            // the barrier gap is about 2m/t; an affine-invariant decrement this
            // small is below rounding in f at large t
            if (decrement < 1e-8 || ++stage_steps > 100) break;
            double f0 = prob.value(z, t);
            double alpha = 1.0;
            int halvings = 0;
            while (prob.value(z + alpha * step, t) > f0 - 0.25 * alpha * decrement) {
                alpha *= 0.5;
                if (++halvings > 60) break;
            }
            if (halvings > 60) break;  // no further progress in floating point
            Eigen::VectorXd next = z + alpha * step;
            if (next == z) break;
            z = std::move(next);
        }
        if (t >= t_goal) {
            finish(z);
            if (certified()) break;
            if (t > 1e6 * t_goal) throw ConvergenceError("John ellipsoid: sandwich certificate not reached");
        }
        t *= mu;
    }
    e.iterations = iters;
    return e;
}

inline Ellipsoid john_ellipsoid(const HPolyhedron& p, double tol = 1e-8, int max_iterations = 10000) {
    if (p.dim() == 0) throw InvalidInput("John ellipsoid in dimension 0");
    return john_ellipsoid(p, enumerate_vertices(p), tol, max_iterations);  // throws on unbounded input
}

/// Affine map x ↦ shape⁻¹(x − center), sending E to the unit ball.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> normalizing_map(const Ellipsoid& e) {
    Eigen::MatrixXd inv = e.shape.inverse();
    return {inv, -inv * e.center};
}

}  // namespace extcomplex
