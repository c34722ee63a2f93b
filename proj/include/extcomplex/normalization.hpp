#pragma once

// Turning an extended formulation into the normalized form
//   P = {φ(x) + t : A(x) + I PSD},  B^n ⊆ Q ⊆ nB^n,
// by restricting to a bounded affine section, recentring on the John
// ellipsoid, and making every block monic.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "extcomplex/ellipsoid.hpp"
#include "extcomplex/extform.hpp"

namespace extcomplex {

/// L = offset + basis·R^{n′}.
struct AffineSection {
    RMatrix basis;  // n × n′, full column rank
    RVector offset;

    size_t ambient_dim() const { return basis.rows(); }
    size_t dim() const { return basis.cols(); }
    AffineMap as_map() const { return AffineMap(basis, offset); }

    static AffineSection whole(size_t n) { return {RMatrix::identity(n), RVector(n)}; }

    /// This section restricted further by an affine map of its own coordinates.
    AffineSection compose(const AffineMap& inner) const {
        AffineMap m = as_map().compose(inner);
        return {m.matrix(), m.offset()};
    }
};

/// A(x) = Σ x_j coeffs[j], symmetric.
struct MonicBlock {
    std::vector<Eigen::MatrixXd> coeffs;
    size_t rank = 0;            // rank of the constant term that was normalized away
    double kernel_residual = 0;
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const RMatrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (size_t r = 0; r < m.rows(); ++r)
        for (size_t c = 0; c < m.cols(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double(m(r, c));
    return out;
}

inline Eigen::VectorXd to_eigen(const RVector& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = to_double(v[i]);
    return out;
}

inline RMatrix to_rational(const Eigen::MatrixXd& m) {
    RMatrix out(static_cast<size_t>(m.rows()), static_cast<size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out(static_cast<size_t>(r), static_cast<size_t>(c)) = rational_from_double(m(r, c));
    return out;
}

// Preimage of v under proj inside h, if any.
inline std::optional<RVector> preimage(const HPolyhedron& h, const AffineMap& proj, const RVector& v) {
    std::vector<LinearConstraint> eqs;
    for (size_t r = 0; r < proj.out_dim(); ++r) eqs.push_back({proj.matrix().row_vector(r), v[r] - proj.offset()[r]});
    return feasible_point(h.with({}, std::move(eqs)));
}

// Block map re-expressed in section coordinates y (x = offset + basis·y).
inline AffineMatrixMap restrict_block(const AffineMatrixMap& b, const AffineSection& sec) {
    AffineMatrixMap out;
    out.constant = b(sec.offset);
    const size_t k = b.size();
    for (size_t j = 0; j < sec.dim(); ++j) {
        RMatrix s(k, k);
        for (size_t i = 0; i < b.in_dim(); ++i) {
            const Rational& w = sec.basis(i, j);
            if (sgn(w) == 0) continue;
            for (size_t r = 0; r < k; ++r)
                for (size_t c = 0; c < k; ++c) s(r, c) += w * b.linear[i](r, c);
        }
        out.linear.push_back(std::move(s));
    }
    return out;
}

}  // namespace detail

/// Affine subspace L meeting the lifted polyhedron in a bounded set that
/// still projects onto conv(target). Each step picks a recession direction u
/// of the current section and cuts with the hyperplane u·x = max_i u·y_i
/// through the preimages y_i of the target vertices; at most n steps.
inline AffineSection bounded_section(const HPolyhedron& lifted, const AffineMap& proj, const VPolytope& target) {
    if (proj.in_dim() != lifted.dim() || proj.out_dim() != target.dim())
        throw DimensionMismatch("formulation vs target dimensions");
    if (target.empty()) throw EmptySetError("bounded section for an empty target");
    const size_t n = lifted.dim();
    AffineSection sec = AffineSection::whole(n);
    for (size_t step = 0; step <= n; ++step) {
        AffineMap to_x = sec.as_map();
        HPolyhedron c = pull_back(lifted, to_x);
        auto u = recession_direction(c);  // throws if c is empty
        if (!u) return sec;
        if (step == n) break;
        AffineMap local_proj = proj.compose(to_x);
        Rational best;
        bool first = true;
        for (const auto& v : target.vertices()) {
            auto y = detail::preimage(c, local_proj, v);
            if (!y) throw InvalidInput("target vertex has no preimage in the lifted set");
            Rational val = dot(*u, *y);
            if (first || val > best) best = val;
            first = false;
        }
        // hyperplane {y : u·y = best} = best·u/‖u‖² + ker(uᵀ)
        const size_t k = sec.dim();
        RMatrix ut(1, k);
        for (size_t j = 0; j < k; ++j) ut(0, j) = (*u)[j];
        RMatrix basis = kernel(ut);
        RVector off = scaled(*u, best / norm_sq(*u));
        sec = sec.compose(AffineMap(basis, off));
    }
    throw ConvergenceError("bounded section did not terminate within n steps");
}

/// Section of a spectrahedral lift: the orthogonal complement of the common
/// kernel of the block coefficient maps (directions that leave every M_i
/// unchanged). Such directions must be annihilated by the projection.
inline AffineSection bounded_section(const SemidefEF& ef) {
    ef.validate();
    const size_t n = ef.n();
    std::vector<RVector> rows;  // one row per matrix entry: coefficient of x_j
    for (const auto& b : ef.blocks)
        for (size_t r = 0; r < b.size(); ++r)
            for (size_t c = r; c < b.size(); ++c) {
                RVector row(n);
                for (size_t j = 0; j < n; ++j) row[j] = b.linear[j](r, c);
                if (!is_zero(row)) rows.push_back(std::move(row));
            }
    RMatrix s = RMatrix::from_rows(rows, n);
    RMatrix k = kernel(s);  // n × dim(ker)
    for (size_t j = 0; j < k.cols(); ++j)
        if (!is_zero(ef.proj.matrix().apply(k.col_vector(j))))
            throw UnboundedError("lifted spectrahedron has a lineality direction with non-zero image");
    if (k.cols() == 0) return AffineSection::whole(n);
    return {kernel(k.transpose()), RVector(n)};
}

/// ψ(y) = center + shape·y with B ⊆ ψ⁻¹(Q) ⊆ n′B.
struct Sandwich {
    Ellipsoid ellipsoid;
    double inner_slack = 0;   // max over facets of (‖shapeᵀa‖ − (b − a·c)) / ‖a‖·scale
    double outer_factor = 0;  // max ‖ψ⁻¹(v)‖ over vertices of Q
    bool certified = false;
};

inline Sandwich sandwich_transform(const HPolyhedron& q, const VPolytope& verts, double tol = 1e-8) {
    Sandwich s;
    s.ellipsoid = john_ellipsoid(q, verts, tol);
    s.inner_slack = s.ellipsoid.inner_slack;
    s.outer_factor = s.ellipsoid.outer_factor;
    const double n = static_cast<double>(q.dim());
    s.certified = s.inner_slack <= tol && s.outer_factor <= n * (1.0 + tol);
    return s;
}

inline Sandwich sandwich_transform(const HPolyhedron& q, double tol = 1e-8) {
    return sandwich_transform(q, enumerate_vertices(q), tol);
}

/// Rewrites one block M(x) = S(x) + T, with o in the interior of its PSD
/// region, as A(x) + I: a congruence U gives UᵀTU = diag(I_r, 0), and the
/// kernel columns of U annihilate every S(e_j). A = diag(UᵀSU restricted to
/// the first r coordinates, 0), so that A(x) + I PSD ⟺ M(x) PSD.
inline MonicBlock helton_vinnikov_reduce(const AffineMatrixMap& block, double rank_cutoff = 1e-9, double kernel_tol = 1e-8) {
    const size_t k = block.size();
    PivotedLdl f = pivoted_ldlt(block.constant, rank_cutoff);
    if (!f.psd) throw InvalidInput("constant term of the block is not positive semidefinite");
    const size_t r = f.rank;
    const auto ki = static_cast<Eigen::Index>(k);

    // T = W D Wᵀ with W = Pᵀ L, so U = W^{-T} diag(d^{-1/2}, 1).
    RMatrix linv = *inverse(f.lower);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(ki, ki);
    for (size_t row = 0; row < k; ++row)
        for (size_t col = 0; col < k; ++col) {
            // (W^{-T})(order[row], col) = (L^{-T})(row, col)
            double scale = col < r ? 1.0 / std::sqrt(to_double(f.pivots[col])) : 1.0;
            u(static_cast<Eigen::Index>(f.order[row]), static_cast<Eigen::Index>(col)) = to_double(linv(col, row)) * scale;
        }

    MonicBlock out;
    out.rank = r;
    for (const auto& s_rat : block.linear) {
        Eigen::MatrixXd s = detail::to_eigen(s_rat);
        if (r < k) {
            Eigen::MatrixXd res = s * u.rightCols(ki - static_cast<Eigen::Index>(r));
            double scale = std::max(1.0, s.norm() * u.rightCols(ki - static_cast<Eigen::Index>(r)).norm());
            out.kernel_residual = std::max(out.kernel_residual, res.norm() / scale);
        }
        Eigen::MatrixXd a = u.transpose() * s * u;
        Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(ki, ki);
        const auto ri = static_cast<Eigen::Index>(r);
        padded.topLeftCorner(ri, ri) = 0.5 * (a.topLeftCorner(ri, ri) + a.topLeftCorner(ri, ri).transpose());
        out.coeffs.push_back(std::move(padded));
    }
    if (out.kernel_residual > kernel_tol)
        throw CertificateError("kernel of the constant term is not annihilated by the linear part; origin is not interior");
    return out;
}

/// Image {φ(y) + t : A(y) + I PSD} of a triple with 1×1 blocks, as the
/// images of the vertices of {y : −a_i·y ≤ 1} (entries read as exact
/// binary rationals). Throws UnboundedError if that body is unbounded.
inline std::vector<Eigen::VectorXd> linear_triple_image(const EncodingTriple& tr) {
    if (tr.m() > 1) throw InvalidInput("image vertices need 1x1 blocks");
    const size_t n = tr.n();
    HPolyhedron q(n);
    for (const auto& b : tr.blocks) {
        RVector a(n);
        for (size_t j = 0; j < n; ++j) a[j] = rational_from_double(-b[j](0, 0));
        q.add_inequality(std::move(a), 1);
    }
    std::vector<Eigen::VectorXd> out;
    const VPolytope verts = enumerate_vertices(q);
    for (const auto& v : verts.vertices()) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(n));
        for (size_t j = 0; j < n; ++j) y(static_cast<Eigen::Index>(j)) = to_double(v[j]);
        out.push_back(tr.phi * y + tr.t);
    }
    return out;
}

enum class SandwichMode { john, box };

struct NormalizeOptions {
    SandwichMode mode = SandwichMode::john;
    double tol = 1e-8;
    unsigned seed = 0;
    std::optional<RVector> interior_hint;  // semidefinite lifts only
};

struct NormalizedEF {
    EncodingTriple triple;
    NormalizationCertificate certificate;
    AffineSection section;  // exact part of the coordinate change
    double rho = 0;         // circumradius of the target
    bool sentinel = false;  // target of dimension ≤ 0: no formulation needed
};

namespace detail {

inline double target_radius(const VPolytope& target) {
    Rational best = 0;
    for (const auto& v : target.vertices()) best = std::max(best, norm_sq(v));
    return std::sqrt(to_double(best));
}

inline NormalizedEF sentinel_result(const VPolytope& target) {
    NormalizedEF out;
    out.sentinel = true;
    const auto d = static_cast<Eigen::Index>(target.dim());
    out.triple.phi = Eigen::MatrixXd::Zero(d, 0);
    out.triple.t = target.empty() ? Eigen::VectorXd::Zero(d) : to_eigen(target.vertices().front());
    out.rho = target.empty() ? 0.0 : target_radius(target);
    out.certificate = validate_normalized(out.triple, out.rho);
    return out;
}

// Largest inscribed cube c + r[−1,1]^n, solved exactly.
inline std::pair<RVector, Rational> inscribed_cube(const HPolyhedron& q) {
    const size_t n = q.dim();
    HPolyhedron lp(n + 1);
    for (const auto& c : q.inequalities()) {
        RVector row(c.a);
        Rational l1 = 0;
        for (const auto& x : c.a) l1 += abs(x);
        row.push_back(l1);
        lp.add_inequality(std::move(row), c.b);
    }
    RVector obj(n + 1);
    obj[n] = 1;
    LPResult res = solve_lp(obj, lp);
    if (!res.optimal()) throw UnboundedError("inscribed cube is unbounded");
    return {RVector(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n)), res.x[n]};
}

}  // namespace detail

/// Normalizes a linear formulation (each inequality is a 1×1 block).
inline NormalizedEF normalize(const LinearEF& ef, const VPolytope& target, const NormalizeOptions& opt = {}) {
    if (target.empty() || target.affine_dimension() < 1) return detail::sentinel_result(target);
    const size_t d = target.dim();
    NormalizedEF out;
    out.rho = detail::target_radius(target);

    // exact: bounded section, then its affine hull
    AffineSection sec = bounded_section(ef.lifted, ef.proj, target);
    HPolyhedron c = pull_back(ef.lifted, sec.as_map());
    HPolyhedron hull_eqs(c.dim(), {}, c.equations());
    for (size_t i : implicit_equalities(c)) hull_eqs.add_equation(c.inequalities()[i].a, c.inequalities()[i].b);
    auto space = solve_equations(hull_eqs);
    if (!space) throw EmptySetError("lifted set is empty");
    sec = sec.compose(AffineMap(space->basis, space->offset));
    out.section = sec;
    HPolyhedron q = pull_back(ef.lifted, sec.as_map());
    const size_t n = sec.dim();
    if (n == 0) throw InvalidInput("section collapsed to a point for a target of positive dimension");

    // floating: ψ(y) = center + shape·y
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;
    if (opt.mode == SandwichMode::john) {
        Sandwich s = sandwich_transform(HPolyhedron(q.dim(), q.inequalities()), opt.tol);
        center = s.ellipsoid.center;
        shape = s.ellipsoid.shape;
    } else {
        auto [cc, r] = detail::inscribed_cube(HPolyhedron(q.dim(), q.inequalities()));
        center = detail::to_eigen(cc);
        shape = to_double(r) * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    }

    const auto ni = static_cast<Eigen::Index>(n);
    EncodingTriple& tr = out.triple;
    for (const auto& con : q.inequalities()) {
        // a·(c + shape·y) ≤ b  ⟺  (b − a·c) − (shapeᵀa)·y ≥ 0, a 1×1 block
        Eigen::VectorXd a = detail::to_eigen(con.a);
        AffineMatrixMap blk;
        blk.constant = RMatrix(1, 1);
        bool zero_row = is_zero(con.a);
        blk.constant(0, 0) = zero_row ? con.b : rational_from_double(to_double(con.b) - a.dot(center));
        Eigen::VectorXd lin = -(shape.transpose() * a);
        for (Eigen::Index j = 0; j < ni; ++j) {
            RMatrix s(1, 1);
            s(0, 0) = zero_row ? Rational(0) : rational_from_double(lin(j));
            blk.linear.push_back(std::move(s));
        }
        tr.blocks.push_back(helton_vinnikov_reduce(blk).coeffs);
    }
    Eigen::MatrixXd phi_sec = detail::to_eigen(ef.proj.matrix()) * detail::to_eigen(sec.basis);
    tr.phi = phi_sec * shape;
    tr.t = detail::to_eigen(ef.proj.apply(sec.offset)) + phi_sec * center;
    if (static_cast<size_t>(tr.t.size()) != d) throw DimensionMismatch("projection output dimension");
    out.certificate = validate_normalized(tr, out.rho, 1e-6, opt.seed);
    return out;
}

namespace detail {

// Smallest eigenvalue over the blocks at y, in floating point.
inline double block_min_eigenvalue(const std::vector<Eigen::MatrixXd>& consts,
                                   const std::vector<std::vector<Eigen::MatrixXd>>& lins, const Eigen::VectorXd& y) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < consts.size(); ++i) {
        Eigen::MatrixXd m = consts[i];
        for (Eigen::Index j = 0; j < y.size(); ++j) m += y(j) * lins[i][static_cast<size_t>(j)];
        best = std::min(best, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0));
    }
    return best;
}

inline Rational round_to_grid(double x, long den) {
    Rational r(static_cast<long>(std::floor(x * static_cast<double>(den) + 0.5)), den);
    r.canonicalize();
    return r;
}

}  // namespace detail

/// Normalizes a semidefinite formulation. The sandwich is taken from the
/// John ellipsoid of an inner polytope spanned by exactly feasible boundary
/// points; the outer inclusion is then checked by sampling only.
inline NormalizedEF normalize(const SemidefEF& ef, const VPolytope& target, const NormalizeOptions& opt = {}) {
    if (target.empty() || target.affine_dimension() < 1) return detail::sentinel_result(target);
    NormalizedEF out;
    out.rho = detail::target_radius(target);
    AffineSection sec = bounded_section(ef);
    const size_t n = sec.dim();
    if (n == 0) throw InvalidInput("lifted spectrahedron is a single point");

    // interior point in section coordinates
    RVector y0(n);
    if (opt.interior_hint) {
        if (opt.interior_hint->size() != ef.n()) throw DimensionMismatch("interior hint length");
        // least-squares coordinates: basisᵀ·basis·y = basisᵀ·x
        RMatrix bt = sec.basis.transpose();
        y0 = *particular_solution(bt * sec.basis, bt.apply(*opt.interior_hint));
    }
    std::vector<AffineMatrixMap> blocks;
    for (const auto& b : ef.blocks) {
        AffineMatrixMap r = detail::restrict_block(b, sec);
        // recentre at y0
        r.constant = r(y0);
        blocks.push_back(std::move(r));
    }
    sec.offset = sec.as_map().apply(y0);

    std::vector<Eigen::MatrixXd> consts;
    std::vector<std::vector<Eigen::MatrixXd>> lins;
    for (const auto& b : blocks) {
        consts.push_back(detail::to_eigen(b.constant));
        std::vector<Eigen::MatrixXd> l;
        for (const auto& s : b.linear) l.push_back(detail::to_eigen(s));
        lins.push_back(std::move(l));
    }
    auto feasible = [&](const Eigen::VectorXd& y) { return detail::block_min_eigenvalue(consts, lins, y) >= 0; };
    auto exact_feasible = [&](const RVector& y) {
        for (const auto& b : blocks)
            if (!is_psd(b(y))) return false;
        return true;
    };
    if (!exact_feasible(RVector(n))) throw InvalidInput("interior point is not feasible");

    // boundary points along fixed and random directions
    const auto ni = static_cast<Eigen::Index>(n);
    std::vector<Eigen::VectorXd> dirs;
    for (Eigen::Index j = 0; j < ni; ++j) {
        dirs.push_back(Eigen::VectorXd::Unit(ni, j));
        dirs.push_back(-Eigen::VectorXd::Unit(ni, j));
    }
    const size_t extra = n == 1 ? 0 : n == 2 ? 62 : n == 3 ? 90 : n == 4 ? 40 : 24;
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    while (dirs.size() < 2 * n + extra) {
        Eigen::VectorXd u(ni);
        for (Eigen::Index j = 0; j < ni; ++j) u(j) = gauss(rng);
        if (u.norm() > 0) dirs.push_back(u.normalized());
    }
    const double far = std::ldexp(1.0, 40);
    std::vector<RVector> pts;
    double min_ray = std::numeric_limits<double>::infinity();
    for (const auto& u : dirs) {
        double hi = 1.0;
        while (feasible(hi * u)) {
            hi *= 2;
            if (hi > far) throw UnboundedError("lifted spectrahedron is unbounded along a non-lineality direction");
        }
        double lo = 0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (feasible(mid * u) ? lo : hi) = mid;
        }
        min_ray = std::min(min_ray, lo);
        // pull inward onto a coarse rational grid until exactly feasible
        RVector p;
        for (double shrink = 1e-7;; shrink *= 10) {
            Eigen::VectorXd y = (lo * (1 - shrink)) * u;
            double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
            long den = static_cast<long>(std::ldexp(1.0, 24) / std::ldexp(1.0, std::ilogb(scale)));
            p.assign(n, Rational(0));
            for (Eigen::Index j = 0; j < ni; ++j) p[static_cast<size_t>(j)] = detail::round_to_grid(y(j), std::max(den, 1L));
            if (exact_feasible(p)) break;
            if (shrink > 0.5) {
                p.assign(n, Rational(0));
                break;
            }
        }
        pts.push_back(std::move(p));
    }
    if (!(min_ray > 1e-9)) throw InvalidInput("interior point lies on the boundary of the lifted spectrahedron");

    VPolytope inner = VPolytope::from_points(n, pts);
    HPolyhedron inner_h = convex_hull_facets(inner);
    Sandwich s = sandwich_transform(inner_h, inner, opt.tol);
    const Eigen::VectorXd& center = s.ellipsoid.center;
    const Eigen::MatrixXd& shape = s.ellipsoid.shape;

    EncodingTriple& tr = out.triple;
    for (size_t i = 0; i < blocks.size(); ++i) {
        Eigen::MatrixXd t = consts[i];
        for (Eigen::Index j = 0; j < ni; ++j) t += center(j) * lins[i][static_cast<size_t>(j)];
        AffineMatrixMap blk;
        blk.constant = detail::to_rational(0.5 * (t + t.transpose()));
        for (Eigen::Index j = 0; j < ni; ++j) {
            Eigen::MatrixXd sj = Eigen::MatrixXd::Zero(t.rows(), t.cols());
            for (Eigen::Index k = 0; k < ni; ++k) sj += shape(k, j) * lins[i][static_cast<size_t>(k)];
            blk.linear.push_back(detail::to_rational(0.5 * (sj + sj.transpose())));
        }
        tr.blocks.push_back(helton_vinnikov_reduce(blk).coeffs);
    }
    out.section = sec;
    Eigen::MatrixXd phi_sec = detail::to_eigen(ef.proj.matrix()) * detail::to_eigen(sec.basis);
    tr.phi = phi_sec * shape;
    tr.t = detail::to_eigen(ef.proj.apply(sec.offset)) + phi_sec * center;
    out.certificate = validate_normalized(tr, out.rho, 1e-6, opt.seed);
    return out;
}

}  // namespace extcomplex
