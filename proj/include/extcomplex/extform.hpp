#pragma once

// Linear and semidefinite extended formulations, their verification, and the
// floating-point normalized encoding (A, φ, t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "extcomplex/hull.hpp"
#include "extcomplex/psd.hpp"

namespace extcomplex {

/// P = proj(lifted).
struct LinearEF {
    HPolyhedron lifted;
    AffineMap proj;

    size_t size() const { return lifted.size(); }
};

/// M(x) = Σ x_j·linear[j] + constant, symmetric m×m.
struct AffineMatrixMap {
    std::vector<RMatrix> linear;
    RMatrix constant;

    size_t size() const { return constant.rows(); }
    size_t in_dim() const { return linear.size(); }

    RMatrix operator()(std::span<const Rational> x) const {
        if (x.size() != linear.size()) throw DimensionMismatch("matrix map input");
        RMatrix out = constant;
        for (size_t j = 0; j < x.size(); ++j) {
            if (sgn(x[j]) == 0) continue;
            for (size_t r = 0; r < out.rows(); ++r)
                for (size_t c = 0; c < out.cols(); ++c) out(r, c) += x[j] * linear[j](r, c);
        }
        return out;
    }
};

/// P = proj({x : every block M_i(x) is PSD}).
struct SemidefEF {
    std::vector<AffineMatrixMap> blocks;
    AffineMap proj;

    size_t n() const { return proj.in_dim(); }
    size_t block_size() const { return blocks.empty() ? 0 : blocks.front().size(); }

    void validate() const {
        for (const auto& b : blocks) {
            if (b.in_dim() != n()) throw DimensionMismatch("block input dimension differs from the projection's");
            if (b.size() != block_size()) throw DimensionMismatch("blocks of different sizes");
            check_symmetric(b.constant, b.size());
            for (const auto& s : b.linear) check_symmetric(s, b.size());
        }
    }

private:
    static void check_symmetric(const RMatrix& mat, size_t size) {
        if (mat.rows() != size || mat.cols() != size) throw DimensionMismatch("block coefficient size");
        for (size_t r = 0; r < size; ++r)
            for (size_t c = r + 1; c < size; ++c)
                if (mat(r, c) != mat(c, r)) throw InvalidInput("block matrix is not symmetric");
    }
};

struct EFShape {
    size_t l = 0, m = 0, n = 0, d = 0;
    friend bool operator==(const EFShape&, const EFShape&) = default;
};

inline EFShape ef_project_size(const LinearEF& ef) { return {ef.lifted.size(), 1, ef.lifted.dim(), ef.proj.out_dim()}; }
inline EFShape ef_project_size(const SemidefEF& ef) { return {ef.blocks.size(), ef.block_size(), ef.n(), ef.proj.out_dim()}; }

inline bool ef_membership(const LinearEF& ef, std::span<const Rational> x) {
    if (x.size() != ef.lifted.dim()) throw DimensionMismatch("point vs lifted dimension");
    return ef.lifted.contains(x);
}

inline bool ef_membership(const SemidefEF& ef, std::span<const Rational> x) {
    if (x.size() != ef.n()) throw DimensionMismatch("point vs lifted dimension");
    return std::all_of(ef.blocks.begin(), ef.blocks.end(), [&](const auto& b) { return is_psd(b(x)); });
}

struct VerificationReport {
    enum class Failure { none, empty_lift, vertex, facet, equation };
    bool verified = true;
    Failure failure = Failure::none;
    RVector vertex;                 // missing target vertex
    LinearConstraint constraint;    // violated facet or equation of the target
    RVector witness;                // lifted point whose image violates it
    RVector witness_image;
    std::string message;
};

inline const char* failure_name(VerificationReport::Failure f) {
    switch (f) {
        case VerificationReport::Failure::none: return "none";
        case VerificationReport::Failure::empty_lift: return "empty_lift";
        case VerificationReport::Failure::vertex: return "vertex";
        case VerificationReport::Failure::facet: return "facet";
        case VerificationReport::Failure::equation: return "equation";
    }
    return "?";
}

/// Exact check that proj(lifted) = conv(target): every target vertex has a
/// preimage, and every facet and hull equation of the target holds on the
/// image (via LP over the lifted set).
inline VerificationReport verify_linear_ef(const LinearEF& ef, const VPolytope& target) {
    using F = VerificationReport::Failure;
    if (target.empty()) throw EmptySetError("verification target is empty");
    if (ef.proj.out_dim() != target.dim() || ef.proj.in_dim() != ef.lifted.dim())
        throw DimensionMismatch("formulation vs target dimensions");
    VerificationReport rep;
    if (!feasible_point(ef.lifted)) {
        rep.verified = false;
        rep.failure = F::empty_lift;
        rep.message = "lifted set is empty";
        return rep;
    }
    if (!is_bounded(ef.lifted)) throw UnboundedError("lifted set is unbounded");

    const RMatrix& mat = ef.proj.matrix();
    const RVector& off = ef.proj.offset();
    for (const auto& v : target.vertices()) {
        std::vector<LinearConstraint> eqs;
        for (size_t r = 0; r < mat.rows(); ++r) eqs.push_back({mat.row_vector(r), v[r] - off[r]});
        if (!feasible_point(ef.lifted.with({}, std::move(eqs)))) {
            rep.verified = false;
            rep.failure = F::vertex;
            rep.vertex = v;
            rep.message = "target vertex has no preimage";
            return rep;
        }
    }

    HPolyhedron facets = convex_hull_facets(target);
    auto pulled = [&](const RVector& a) { return mat.transpose().apply(a); };
    auto fail = [&](F kind, const LinearConstraint& c, RVector x, const char* msg) {
        rep.verified = false;
        rep.failure = kind;
        rep.constraint = c;
        rep.witness_image = ef.proj.apply(x);
        rep.witness = std::move(x);
        rep.message = msg;
        return rep;
    };
    for (const auto& c : facets.inequalities()) {
        LPResult r = solve_lp(pulled(c.a), ef.lifted, Sense::maximize);
        if (r.value + dot(c.a, off) > c.b) return fail(F::facet, c, r.x, "image violates a target facet");
    }
    for (const auto& c : facets.equations()) {
        for (Sense s : {Sense::maximize, Sense::minimize}) {
            LPResult r = solve_lp(pulled(c.a), ef.lifted, s);
            if (r.value + dot(c.a, off) != c.b) return fail(F::equation, c, r.x, "image leaves the target's affine hull");
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Normalized encodings

/// P = {φ(x) + t : A(x) + I PSD}, A linear and block diagonal.
struct EncodingTriple {
    // blocks[i][j] = A_i(e_j), symmetric m×m
    std::vector<std::vector<Eigen::MatrixXd>> blocks;
    Eigen::MatrixXd phi;  // d×n
    Eigen::VectorXd t;    // d

    size_t l() const { return blocks.size(); }
    size_t m() const { return blocks.empty() || blocks[0].empty() ? 0 : static_cast<size_t>(blocks[0][0].rows()); }
    size_t n() const { return static_cast<size_t>(phi.cols()); }
    size_t d() const { return static_cast<size_t>(phi.rows()); }
    EFShape shape() const { return {l(), m(), n(), d()}; }

    Eigen::MatrixXd block_value(size_t i, const Eigen::VectorXd& x) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m()), static_cast<Eigen::Index>(m()));
        for (size_t j = 0; j < n(); ++j) out += x(static_cast<Eigen::Index>(j)) * blocks[i][j];
        return out;
    }

    /// Smallest eigenvalue of A(x) + I over all blocks (+inf without blocks).
    double min_eigenvalue(const Eigen::VectorXd& x) const {
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < l(); ++i) {
            Eigen::MatrixXd mat = block_value(i, x);
            mat += Eigen::MatrixXd::Identity(mat.rows(), mat.cols());
            best = std::min(best, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mat, Eigen::EigenvaluesOnly).eigenvalues()(0));
        }
        return best;
    }

    void validate() const {
        for (const auto& b : blocks) {
            if (b.size() != n()) throw DimensionMismatch("block count of coefficient matrices differs from n");
            for (const auto& s : b)
                if (static_cast<size_t>(s.rows()) != m() || static_cast<size_t>(s.cols()) != m())
                    throw DimensionMismatch("blocks of different sizes");
        }
        if (static_cast<size_t>(t.size()) != d()) throw DimensionMismatch("translation length differs from d");
    }

    friend EncodingTriple operator-(const EncodingTriple& a, const EncodingTriple& b) {
        if (!(a.shape() == b.shape())) throw DimensionMismatch("triples of different shapes");
        EncodingTriple out = a;
        for (size_t i = 0; i < a.l(); ++i)
            for (size_t j = 0; j < a.n(); ++j) out.blocks[i][j] -= b.blocks[i][j];
        out.phi -= b.phi;
        out.t -= b.t;
        return out;
    }
};

struct TripleNorms {
    double norm_A_lower = 0, norm_A_upper = 0, norm_phi = 0, norm_t = 0;
    bool norm_A_exact() const { return norm_A_lower == norm_A_upper; }
};

namespace detail {

/// Brackets sup over the unit sphere of a convex, positively homogeneous f.
/// The sphere is covered by cones over the facets of the cross-polytope,
/// each spanned by n unit rays v_i. With w solving w·v_i = f(v_i),
/// sublinearity gives f(z) ≤ w·z on the cone, hence f ≤ ‖w‖ there. The cone
/// with the largest bound is split at the midpoint of its widest edge until
/// the bound is within rel_gap of the best ray value or the budget is spent.
inline std::pair<double, double> sphere_max_bracket(size_t n, const std::function<double(const Eigen::VectorXd&)>& f,
                                                    double rel_gap, size_t budget) {
    const auto ni = static_cast<Eigen::Index>(n);
    struct Cone {
        double bound;
        std::vector<Eigen::VectorXd> rays;
        std::vector<double> values;
        bool operator<(const Cone& o) const { return bound < o.bound; }
    };
    size_t evals = 0;
    double lower = 0;
    auto eval = [&](const Eigen::VectorXd& u) {
        ++evals;
        double v = f(u);
        lower = std::max(lower, v);
        return v;
    };
    auto finish = [&](Cone c) {
        Eigen::MatrixXd v(ni, ni);
        Eigen::VectorXd rhs(ni);
        for (Eigen::Index i = 0; i < ni; ++i) {
            v.row(i) = c.rays[static_cast<size_t>(i)].transpose();
            rhs(i) = c.values[static_cast<size_t>(i)];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
        c.bound = lu.isInvertible() ? Eigen::VectorXd(lu.solve(rhs)).norm() : std::numeric_limits<double>::infinity();
        return c;
    };

    std::vector<double> axis_value(2 * n);
    for (size_t j = 0; j < 2 * n; ++j)
        axis_value[j] = eval((j % 2 ? -1.0 : 1.0) * Eigen::VectorXd::Unit(ni, static_cast<Eigen::Index>(j / 2)));
    std::priority_queue<Cone> queue;
    for (size_t signs = 0; signs < (size_t{1} << n); ++signs) {
        Cone c;
        for (size_t j = 0; j < n; ++j) {
            const size_t k = 2 * j + ((signs >> j) & 1U);
            c.rays.push_back((k % 2 ? -1.0 : 1.0) * Eigen::VectorXd::Unit(ni, static_cast<Eigen::Index>(j)));
            c.values.push_back(axis_value[k]);
        }
        queue.push(finish(std::move(c)));
    }
    while (true) {
        const Cone& top = queue.top();
        if (top.bound <= lower * (1 + rel_gap) || evals >= budget || n == 1) return {lower, std::max(lower, top.bound)};
        Cone c = top;
        queue.pop();
        size_t a = 0, b = 1;
        double widest = -1;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) {
                double d = (c.rays[i] - c.rays[j]).squaredNorm();
                if (d > widest) widest = d, a = i, b = j;
            }
        Eigen::VectorXd mid = (c.rays[a] + c.rays[b]).normalized();
        const double fm = eval(mid);
        Cone left = c, right = std::move(c);
        left.rays[a] = mid;
        left.values[a] = fm;
        right.rays[b] = std::move(mid);
        right.values[b] = fm;
        queue.push(finish(std::move(left)));
        queue.push(finish(std::move(right)));
    }
}

}  // namespace detail

/// Operator norms of the triple. ‖A‖ = sup over unit x of max_i ‖A_i(x)‖₂ is
/// bracketed: sampled unit directions from below; from above, per block, the
/// smaller of sqrt(Σ_j ‖A_i(e_j)‖²) and the largest singular value of the
/// block's vectorized coefficient matrix. For n ≤ 5 both sides are then
/// tightened by simplicial cone refinement (‖A(x)‖ is convex and homogeneous).
/// Exact for m = 1.
inline TripleNorms triple_norms(const EncodingTriple& tr, unsigned seed = 0, int samples = 1000,
                                size_t refine_budget = 20000) {
    tr.validate();
    TripleNorms out;
    const auto n = static_cast<Eigen::Index>(tr.n());
    if (tr.phi.size() > 0) out.norm_phi = Eigen::JacobiSVD<Eigen::MatrixXd>(tr.phi).singularValues()(0);
    out.norm_t = tr.t.norm();
    if (tr.l() == 0 || n == 0) return out;
    const auto m = static_cast<Eigen::Index>(tr.m());

    if (m == 1) {
        double best = 0;
        for (const auto& b : tr.blocks) {
            Eigen::VectorXd a(n);
            for (Eigen::Index j = 0; j < n; ++j) a(j) = b[static_cast<size_t>(j)](0, 0);
            best = std::max(best, a.norm());
        }
        out.norm_A_lower = out.norm_A_upper = best;
        return out;
    }

    std::vector<Eigen::VectorXd> candidates;
    double upper = 0;
    for (const auto& b : tr.blocks) {
        double sq = 0;
        Eigen::MatrixXd vec(m * m, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& s = b[static_cast<size_t>(j)];
            if (s.size() > 0) {
                double sn = Eigen::JacobiSVD<Eigen::MatrixXd>(s).singularValues()(0);
                sq += sn * sn;
            }
            vec.col(j) = Eigen::Map<const Eigen::VectorXd>(s.data(), m * m);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(vec, Eigen::ComputeThinV);
        upper = std::max(upper, std::min(std::sqrt(sq), svd.singularValues()(0)));
        candidates.push_back(svd.matrixV().col(0));
    }
    out.norm_A_upper = upper;

    auto value = [&](const Eigen::VectorXd& x) {
        double best = 0;
        for (size_t i = 0; i < tr.l(); ++i) {
            Eigen::MatrixXd a = tr.block_value(i, x);
            auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
            best = std::max({best, std::abs(ev(0)), std::abs(ev(ev.size() - 1))});
        }
        return best;
    };
    for (Eigen::Index j = 0; j < n; ++j) candidates.push_back(Eigen::VectorXd::Unit(n, j));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x(n);
        for (Eigen::Index j = 0; j < n; ++j) x(j) = gauss(rng);
        if (x.norm() > 0) candidates.push_back(x.normalized());
    }
    double lower = 0;
    for (const auto& x : candidates) lower = std::max(lower, value(x));
    if (n <= 5 && refine_budget > 0) {
        auto [lo, hi] = detail::sphere_max_bracket(static_cast<size_t>(n), value, 1e-9, refine_budget);
        lower = std::max(lower, lo);
        upper = std::min(upper, hi);
    }
    out.norm_A_upper = upper;
    out.norm_A_lower = std::min(lower, upper);
    return out;
}

/// ρn²·‖A−A′‖ + n‖φ−φ′‖ + ‖t−t′‖, with the upper bracket of the A-norm.
inline double triple_distance_bound(const EncodingTriple& a, const EncodingTriple& b, double rho) {
    TripleNorms diff = triple_norms(a - b, 0, 0);
    const double n = static_cast<double>(a.n());
    return rho * n * n * diff.norm_A_upper + n * diff.norm_phi + diff.norm_t;
}

struct NormalizationCertificate {
    double rho = 0;
    double norm_A_lower = 0, norm_A_upper = 0, norm_phi = 0, norm_t = 0;
    bool norm_A_exact = false;
    bool n_check = false;      // n ≤ ℓm²
    bool inner_ball = false;   // B^n ⊆ Q
    bool outer_ball = false;   // Q ⊆ nB^n
    bool outer_exact = false;  // outer_ball decided exactly (linear case) or by sampling
    bool phi_check = false;    // ‖φ‖ ≤ ρ
    bool t_check = false;      // ‖t‖ ≤ ρ
    double outer_radius = 0;   // largest ‖x‖ found on the boundary of Q

    bool passed() const { return n_check && inner_ball && outer_ball && phi_check && t_check; }
};

namespace detail {

// Largest r ≤ limit with A(r·u) + I PSD, by bisection; limit if none stops it.
inline double spectrahedron_ray(const EncodingTriple& tr, const Eigen::VectorXd& u, double limit) {
    if (tr.min_eigenvalue(limit * u) >= 0) return limit;
    double lo = 0, hi = limit;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (tr.min_eigenvalue(mid * u) >= 0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

/// Checks the bounds a normalized encoding must satisfy. Never throws on
/// failed checks; they are recorded in the certificate.
inline NormalizationCertificate validate_normalized(const EncodingTriple& tr, double rho, double slack = 1e-6,
                                                    unsigned seed = 0) {
    tr.validate();
    NormalizationCertificate cert;
    cert.rho = rho;
    TripleNorms norms = triple_norms(tr, seed);
    cert.norm_A_lower = norms.norm_A_lower;
    cert.norm_A_upper = norms.norm_A_upper;
    cert.norm_A_exact = norms.norm_A_exact();
    cert.norm_phi = norms.norm_phi;
    cert.norm_t = norms.norm_t;
    const size_t n = tr.n();
    cert.n_check = n <= tr.l() * tr.m() * tr.m();
    cert.inner_ball = norms.norm_A_upper <= 1.0 + slack;
    cert.phi_check = norms.norm_phi <= rho * (1.0 + slack);
    cert.t_check = norms.norm_t <= rho * (1.0 + slack);

    const double limit = static_cast<double>(n) * (1.0 + slack);
    if (n == 0) {
        cert.outer_ball = cert.outer_exact = true;
    } else if (tr.m() == 1) {
        // Q = {x : a_i·x ≥ −1}; its vertices decide the outer ball exactly.
        cert.outer_exact = true;
        HPolyhedron q(n);
        for (const auto& b : tr.blocks) {
            RVector a(n);
            for (size_t j = 0; j < n; ++j) a[j] = rational_from_double(-b[j](0, 0));
            q.add_inequality(std::move(a), 1);
        }
        try {
            VPolytope verts = enumerate_vertices(q);
            Rational best = 0;
            for (const auto& v : verts.vertices()) best = std::max(best, norm_sq(v));
            cert.outer_radius = std::sqrt(to_double(best));
            cert.outer_ball = cert.outer_radius <= limit;
        } catch (const UnboundedError&) {
            cert.outer_radius = std::numeric_limits<double>::infinity();
            cert.outer_ball = false;
        }
    } else {
        // Sampled boundary probe; a pass is evidence, not proof.
        cert.outer_exact = false;
        std::mt19937_64 rng(seed + 1);
        std::normal_distribution<double> gauss;
        const auto ni = static_cast<Eigen::Index>(n);
        std::vector<Eigen::VectorXd> dirs;
        for (Eigen::Index j = 0; j < ni; ++j) {
            dirs.push_back(Eigen::VectorXd::Unit(ni, j));
            dirs.push_back(-Eigen::VectorXd::Unit(ni, j));
        }
        for (int s = 0; s < 500; ++s) {
            Eigen::VectorXd u(ni);
            for (Eigen::Index j = 0; j < ni; ++j) u(j) = gauss(rng);
            if (u.norm() > 0) dirs.push_back(u.normalized());
        }
        cert.outer_ball = true;
        for (const auto& u : dirs) {
            double r = detail::spectrahedron_ray(tr, u, 2.0 * limit);
            cert.outer_radius = std::max(cert.outer_radius, r);
            if (r > limit) cert.outer_ball = false;
        }
    }
    return cert;
}

}  // namespace extcomplex
