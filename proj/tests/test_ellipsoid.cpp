#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "extcomplex/ellipsoid.hpp"
#include "test_support.hpp"

using namespace extcomplex;
using namespace extcomplex::test;

namespace {

HPolyhedron cube(size_t n, long r) {
    HPolyhedron h(n);
    for (size_t i = 0; i < n; ++i) {
        RVector e(n);
        e[i] = 1;
        h.add_inequality(e, r);
        e[i] = -1;
        h.add_inequality(e, r);
    }
    return h;
}

Eigen::MatrixXd gram(const Ellipsoid& e) { return e.shape * e.shape.transpose(); }

// log det of the largest ellipsoid c + s·L·B inside h, for the given c, L.
double feasible_log_volume(const HPolyhedron& h, const Eigen::VectorXd& c, const Eigen::MatrixXd& l) {
    double scale = std::numeric_limits<double>::infinity();
    for (const auto& con : h.inequalities()) {
        Eigen::VectorXd a(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) a(i) = to_double(con.a[i]);
        double room = to_double(con.b) - a.dot(c);
        if (room <= 0) return -std::numeric_limits<double>::infinity();
        scale = std::min(scale, room / (l.transpose() * a).norm());
    }
    return std::log(std::abs(l.determinant())) + c.size() * std::log(scale);
}

}  // namespace

TEST(JohnEllipsoid, CubeGivesUnitBall) {
    for (size_t n = 1; n <= 4; ++n) {
        Ellipsoid e = john_ellipsoid(cube(n, 1));
        EXPECT_LT(e.center.norm(), 1e-6);
        EXPECT_LT((gram(e) - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-6) << "n=" << n;
        EXPECT_LE(e.outer_factor, n * (1 + 1e-8));
    }
}

TEST(JohnEllipsoid, TriangleGivesSteinerInellipse) {
    HPolyhedron h = convex_hull_facets(std_triangle());
    Ellipsoid e = john_ellipsoid(h);
    EXPECT_NEAR(e.center(0), 1.0 / 3, 1e-7);
    EXPECT_NEAR(e.center(1), 1.0 / 3, 1e-7);
    // Affine image of the incircle (radius 1/2) of the equilateral triangle
    // with unit circumradius.
    Eigen::Matrix2d u, v;
    const double s3 = std::sqrt(3.0);
    u << -1.5, -1.5, s3 / 2, -s3 / 2;  // columns u1 − u0, u2 − u0 with u0 = (1,0)
    v << 1, 0, 0, 1;                   // columns v1 − v0, v2 − v0 with v0 = (0,0)
    Eigen::Matrix2d t = v * u.inverse();
    Eigen::Matrix2d expected = 0.25 * t * t.transpose();
    EXPECT_LT((gram(e) - expected).norm(), 1e-6);
    // touches each side at its midpoint
    Eigen::Vector2d mids[] = {{0.5, 0}, {0, 0.5}, {0.5, 0.5}};
    for (const auto& m : mids) EXPECT_NEAR(e.gauge(m), 1.0, 1e-6);
}

TEST(JohnEllipsoid, RegularPolygonApproachesInscribedDisc) {
    for (int k : {4, 6, 8, 12}) {
        HPolyhedron h(2);
        for (int j = 0; j < 2 * k; ++j) {
            double th = std::numbers::pi * j / k;
            h.add_inequality({rational_from_double(std::cos(th)), rational_from_double(std::sin(th))}, 1);
        }
        Ellipsoid e = john_ellipsoid(h);
        // the normals above are rounded, so allow for that in the radius
        EXPECT_LT((gram(e) - Eigen::Matrix2d::Identity()).norm(), 1e-6) << "2k=" << 2 * k;
        EXPECT_LT(e.center.norm(), 1e-6);
    }
}

TEST(JohnEllipsoid, SandwichAndLocalOptimalityOnRandomPolytopes) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0, 1);
    const double tol = 1e-8;
    int tested = 0;
    for (int t = 0; t < 24; ++t) {
        size_t n = 2 + t % 3;
        VPolytope p = random_polytope(rng, n, n + 3 + t % 4, 5, 2);
        if (p.affine_dimension() < static_cast<int>(n)) continue;
        HPolyhedron h = convex_hull_facets(p);
        Ellipsoid e = john_ellipsoid(h, tol);
        ++tested;
        EXPECT_LE(e.inner_slack, 10 * tol);
        EXPECT_LE(e.outer_factor, n * (1 + 10 * tol));
        // sampled boundary points of E stay in P
        for (int s = 0; s < 50; ++s) {
            Eigen::VectorXd u(n);
            for (size_t i = 0; i < n; ++i) u(i) = gauss(rng);
            Eigen::VectorXd x = e.center + e.shape * u.normalized();
            for (const auto& con : h.inequalities()) {
                double ax = 0;
                for (size_t i = 0; i < n; ++i) ax += to_double(con.a[i]) * x(i);
                EXPECT_LE(ax - to_double(con.b), 1e-7);
            }
        }
        // no nearby feasible ellipsoid has noticeably larger volume
        double base = feasible_log_volume(h, e.center, e.shape);
        EXPECT_NEAR(base, e.log_volume, 1e-6);
        for (int s = 0; s < 100; ++s) {
            Eigen::VectorXd dc(n);
            Eigen::MatrixXd dl(n, n);
            for (size_t i = 0; i < n; ++i) dc(i) = gauss(rng);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j) dl(i, j) = gauss(rng);
            double eps = 1e-3 * e.shape.norm();
            EXPECT_LE(feasible_log_volume(h, e.center + eps * dc, e.shape + eps * dl), e.log_volume + 1e-7);
        }
    }
    EXPECT_GE(tested, 15);
}

TEST(JohnEllipsoid, RejectsBadInput) {
    HPolyhedron half(1);
    half.add_inequality(rv({1}), 1);
    EXPECT_THROW(john_ellipsoid(half), UnboundedError);
    HPolyhedron flat = cube(2, 1);
    flat.add_equation(rv({0, 1}), 0);
    EXPECT_THROW(john_ellipsoid(flat), InvalidInput);
    HPolyhedron empty(1);
    empty.add_inequality(rv({1}), -1);
    empty.add_inequality(rv({-1}), -1);
    EXPECT_THROW(john_ellipsoid(empty), EmptySetError);
}
