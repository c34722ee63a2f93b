#include <gtest/gtest.h>

#include <random>

#include "extcomplex/constructions.hpp"
#include "extcomplex/extform.hpp"
#include "test_support.hpp"

using namespace extcomplex;
using namespace extcomplex::test;

namespace {

// The 3×3 block with unit diagonal and off-diagonals x₁, x₂, x₃, projected
// to (x₁, x₂): the square [−1,1]².
SemidefEF elliptope_square() {
    AffineMatrixMap b;
    b.constant = RMatrix::identity(3);
    const std::pair<size_t, size_t> pos[] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto [r, c] : pos) {
        RMatrix s(3, 3);
        s(r, c) = s(c, r) = 1;
        b.linear.push_back(s);
    }
    RMatrix p(2, 3);
    p(0, 0) = p(1, 1) = 1;
    return {{b}, AffineMap(p, RVector(2))};
}

Rational det3(const RMatrix& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

EncodingTriple linear_triple(std::vector<std::vector<double>> rows, size_t d = 1) {
    EncodingTriple tr;
    const size_t n = rows.empty() ? 0 : rows[0].size();
    for (const auto& r : rows) {
        std::vector<Eigen::MatrixXd> blk;
        for (double v : r) blk.push_back(Eigen::MatrixXd::Constant(1, 1, v));
        tr.blocks.push_back(blk);
    }
    tr.phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    tr.t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    return tr;
}

}  // namespace

TEST(Membership, ElliptopeAtOriginAndOutside) {
    SemidefEF ef = elliptope_square();
    ef.validate();
    EXPECT_TRUE(ef_membership(ef, rv({0, 0, 0})));
    RVector x = rv({1, 1, -1});
    EXPECT_LT(det3(ef.blocks[0](x)), 0);
    EXPECT_FALSE(ef_membership(ef, x));
    EXPECT_TRUE(ef_membership(ef, rv({1, 1, 1})));  // rank-one boundary point
    EXPECT_THROW(ef_membership(ef, rv({0, 0})), DimensionMismatch);
}

TEST(Membership, LinearSquare) {
    LinearEF sq{convex_hull_facets(unit_square()), AffineMap::identity(2)};
    EXPECT_FALSE(ef_membership(sq, rv({2, 0})));
    EXPECT_TRUE(ef_membership(sq, rv({1, 0})));
}

TEST(ProjectSize, Examples) {
    VPolytope five = poly(2, {{0, 0}, {2, 0}, {3, 1}, {1, 3}, {-1, 1}});
    EFShape s = ef_project_size(trivial_vrep_ef(five));
    EXPECT_EQ(s.l, 5u);
    EXPECT_EQ(s.m, 1u);
    EXPECT_EQ(ef_project_size(elliptope_square()), (EFShape{1, 3, 3, 2}));
    SemidefEF none{{}, AffineMap(RMatrix(1, 0), RVector(1))};
    EXPECT_EQ(ef_project_size(none).l, 0u);
}

TEST(Verify, TrivialSquareAndCounterexample) {
    LinearEF sq = trivial_vrep_ef(unit_square());
    EXPECT_TRUE(verify_linear_ef(sq, unit_square()).verified);
    auto rep = verify_linear_ef(sq, std_triangle());
    ASSERT_FALSE(rep.verified);
    EXPECT_EQ(rep.failure, VerificationReport::Failure::facet);
    EXPECT_EQ(rep.constraint.a, rv({1, 1}));
    EXPECT_EQ(rep.constraint.b, 1);
    EXPECT_EQ(rep.witness_image, rv({1, 1}));
    EXPECT_EQ(sq.proj.apply(rep.witness), rep.witness_image);
    EXPECT_TRUE(ef_membership(sq, rep.witness));
}

TEST(Verify, MissingVertexAndAffineHull) {
    LinearEF tri = trivial_vrep_ef(std_triangle());
    auto rep = verify_linear_ef(tri, unit_square());
    ASSERT_FALSE(rep.verified);
    EXPECT_EQ(rep.failure, VerificationReport::Failure::vertex);
    EXPECT_EQ(rep.vertex, rv({1, 1}));

    VPolytope seg = poly(2, {{0, 0}, {1, 1}});
    LinearEF wide = trivial_vrep_ef(poly(2, {{0, 0}, {1, 1}, {1, 0}}));
    auto r2 = verify_linear_ef(wide, seg);
    ASSERT_FALSE(r2.verified);
    EXPECT_EQ(r2.failure, VerificationReport::Failure::equation);
}

TEST(Verify, UnboundedLiftRejected) {
    HPolyhedron strip(2);
    strip.add_inequality(rv({-1, 0}), 0);
    strip.add_inequality(rv({1, 0}), 1);
    strip.add_inequality(rv({0, -1}), 0);
    RMatrix m(1, 2);
    m(0, 0) = 1;
    LinearEF ef{strip, AffineMap(m, RVector(1))};
    EXPECT_THROW(verify_linear_ef(ef, poly(1, {{0}, {1}})), UnboundedError);
}

TEST(Verify, TrivialEfExhaustiveZeroOneCube) {
    for (unsigned mask = 1; mask < 256; ++mask) {
        VPolytope v = zero_one_subset(3, mask);
        EXPECT_TRUE(verify_linear_ef(trivial_vrep_ef(v), v).verified) << mask;
    }
}

TEST(TripleNorms, Examples) {
    EncodingTriple tr = linear_triple({{0.6, 0.8}, {0, 1}});
    TripleNorms n = triple_norms(tr);
    EXPECT_DOUBLE_EQ(n.norm_A_upper, 1.0);
    EXPECT_TRUE(n.norm_A_exact());

    EncodingTriple zero = linear_triple({{0, 0}}, 2);
    TripleNorms z = triple_norms(zero);
    EXPECT_EQ(z.norm_A_lower, 0);
    EXPECT_EQ(z.norm_A_upper, 0);
    EXPECT_EQ(z.norm_phi, 0);
    EXPECT_EQ(z.norm_t, 0);

    EncodingTriple id = linear_triple({{1, 0}}, 2);
    id.phi = Eigen::Matrix2d::Identity();
    EXPECT_NEAR(triple_norms(id).norm_phi, 1.0, 1e-12);
}

TEST(TripleNorms, BracketContainsBruteForceValue) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        EncodingTriple tr;
        const int n = 2, m = 3;
        for (int b = 0; b < 2; ++b) {
            std::vector<Eigen::MatrixXd> blk;
            for (int j = 0; j < n; ++j) {
                Eigen::MatrixXd s(m, m);
                for (int r = 0; r < m; ++r)
                    for (int c = 0; c <= r; ++c) s(r, c) = s(c, r) = g(rng);
                blk.push_back(s);
            }
            tr.blocks.push_back(blk);
        }
        tr.phi = Eigen::MatrixXd::Zero(1, n);
        tr.t = Eigen::VectorXd::Zero(1);
        TripleNorms nn = triple_norms(tr);
        // dense sweep of the unit circle
        double best = 0;
        for (int k = 0; k < 20000; ++k) {
            double th = 2 * M_PI * k / 20000.0;
            Eigen::Vector2d x(std::cos(th), std::sin(th));
            for (size_t b = 0; b < tr.l(); ++b)
                best = std::max(best, Eigen::JacobiSVD<Eigen::MatrixXd>(tr.block_value(b, x)).singularValues()(0));
        }
        EXPECT_LE(nn.norm_A_lower, best * (1 + 1e-6));  // the grid slightly undershoots the true max
        EXPECT_GE(nn.norm_A_upper, best - 1e-12);
        EXPECT_GE(nn.norm_A_lower, best * (1 - 1e-3));
    }
}

TEST(TripleDistance, Examples) {
    EncodingTriple a = linear_triple({{1, 0}, {0, 1}}, 1);
    EXPECT_EQ(triple_distance_bound(a, a, 3.0), 0.0);
    EncodingTriple b = a;
    b.phi(0, 0) = 0.1;
    EXPECT_NEAR(triple_distance_bound(a, b, 1.0), 0.2, 1e-12);
    EXPECT_THROW(triple_distance_bound(a, linear_triple({{1}}, 1), 1.0), DimensionMismatch);
}

TEST(TripleDistance, SymmetricAndSubadditive) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    auto random_triple = [&] {
        EncodingTriple tr;
        for (int b = 0; b < 2; ++b) {
            std::vector<Eigen::MatrixXd> blk;
            for (int j = 0; j < 2; ++j) {
                Eigen::MatrixXd s(2, 2);
                s << g(rng), 0, 0, g(rng);
                s(0, 1) = s(1, 0) = g(rng);
                blk.push_back(s);
            }
            tr.blocks.push_back(blk);
        }
        tr.phi = Eigen::MatrixXd::Random(2, 2);
        tr.t = Eigen::VectorXd::Random(2);
        return tr;
    };
    for (int i = 0; i < 30; ++i) {
        EncodingTriple a = random_triple(), b = random_triple(), c = random_triple();
        EXPECT_NEAR(triple_distance_bound(a, b, 2.0), triple_distance_bound(b, a, 2.0), 1e-12);
        EXPECT_LE(triple_distance_bound(a, c, 2.0), triple_distance_bound(a, b, 2.0) + triple_distance_bound(b, c, 2.0) + 1e-9);
    }
}

TEST(ValidateNormalized, Examples) {
    EncodingTriple seg = linear_triple({{1}, {-1}}, 1);
    seg.phi(0, 0) = 1;
    auto cert = validate_normalized(seg, 1.0);
    EXPECT_TRUE(cert.passed());
    EXPECT_TRUE(cert.outer_exact);
    EXPECT_DOUBLE_EQ(cert.outer_radius, 1.0);

    EncodingTriple flat = linear_triple({{1, 0}}, 1);
    auto c2 = validate_normalized(flat, 1.0);
    EXPECT_FALSE(c2.n_check);
    EXPECT_FALSE(c2.outer_ball);  // unbounded

    EncodingTriple far = seg;
    far.t(0) = 2.0;
    auto c3 = validate_normalized(far, 1.0);
    EXPECT_FALSE(c3.t_check);
    EXPECT_FALSE(c3.passed());
}

TEST(ValidateNormalized, SemidefiniteProbe) {
    // A(x) = [[0, x1],[x1, 0]] ⊕ [[0, x2],[x2, 0]]: Q = [−1,1]², inside 2B².
    EncodingTriple tr;
    for (int b = 0; b < 2; ++b) {
        std::vector<Eigen::MatrixXd> blk(2, Eigen::MatrixXd::Zero(2, 2));
        blk[b](0, 1) = blk[b](1, 0) = 1;
        tr.blocks.push_back(blk);
    }
    tr.phi = Eigen::Matrix2d::Identity();
    tr.t = Eigen::Vector2d::Zero();
    auto cert = validate_normalized(tr, 1.0);
    EXPECT_TRUE(cert.passed());
    EXPECT_FALSE(cert.outer_exact);
    EXPECT_NEAR(cert.outer_radius, std::sqrt(2.0), 1e-3);
}

// ---------------------------------------------------------------------------

TEST(Constructions, TrivialSinglePointAndRandom) {
    VPolytope pt = poly(2, {{3, 4}});
    LinearEF ef = trivial_vrep_ef(pt);
    EXPECT_EQ(ef.size(), 1u);
    EXPECT_EQ(ef.proj.apply(rv({1})), rv({3, 4}));
    EXPECT_TRUE(verify_linear_ef(ef, pt).verified);
    std::mt19937_64 rng(2);
    VPolytope r = random_polytope(rng, 3, 6);
    LinearEF er = trivial_vrep_ef(r);
    EXPECT_EQ(er.size(), r.num_vertices());
    EXPECT_TRUE(verify_linear_ef(er, r).verified);
    EXPECT_THROW(trivial_vrep_ef(VPolytope(2)), EmptySetError);
}

TEST(Constructions, BalasUnion) {
    LinearEF a = trivial_vrep_ef(poly(1, {{0}})), b = trivial_vrep_ef(poly(1, {{1}}));
    LinearEF seg = balas_union({a, b});
    EXPECT_EQ(seg.size(), 4u);
    EXPECT_TRUE(verify_linear_ef(seg, poly(1, {{0}, {1}})).verified);

    VPolytope sq2 = poly(2, {{2, 0}, {3, 0}, {2, 1}, {3, 1}});
    LinearEF two = balas_union({trivial_vrep_ef(unit_square()), LinearEF{convex_hull_facets(sq2), AffineMap::identity(2)}});
    EXPECT_EQ(two.size(), 2u + 4u + 4u);
    VPolytope both = poly(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {3, 0}, {2, 1}, {3, 1}});
    EXPECT_TRUE(verify_linear_ef(two, both).verified);

    LinearEF tri = trivial_vrep_ef(std_triangle());
    EXPECT_TRUE(verify_linear_ef(balas_union({tri, tri, tri}), std_triangle()).verified);

    HPolyhedron ray(1);
    ray.add_inequality(rv({-1}), 0);
    EXPECT_THROW(balas_union({LinearEF{ray, AffineMap::identity(1)}}), UnboundedError);
}

TEST(Constructions, BalasUnionMatchesHullOfUnionOnRandomPieces) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 15; ++t) {
        std::vector<LinearEF> efs;
        std::vector<RVector> all;
        for (int i = 0; i < 3; ++i) {
            VPolytope p = random_polytope(rng, 2, 3, 4, 1);
            efs.push_back(trivial_vrep_ef(p));
            all.insert(all.end(), p.vertices().begin(), p.vertices().end());
        }
        EXPECT_TRUE(verify_linear_ef(balas_union(efs), VPolytope::from_points(2, all)).verified);
    }
}

TEST(Constructions, Products) {
    LinearEF seg = trivial_vrep_ef(poly(1, {{0}, {1}}));
    LinearEF sq = product_ef(seg, seg);
    EXPECT_EQ(sq.size(), 4u);
    EXPECT_TRUE(verify_linear_ef(sq, unit_square()).verified);
    LinearEF prism = product_ef(trivial_vrep_ef(std_triangle()), seg);
    VPolytope prism_v = poly(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}});
    EXPECT_TRUE(verify_linear_ef(prism, prism_v).verified);
    HPolyhedron pt(0);
    LinearEF point{pt, AffineMap(RMatrix(1, 0), rv({5}))};
    LinearEF emb = product_ef(trivial_vrep_ef(std_triangle()), point);
    EXPECT_EQ(emb.size(), 3u);
    EXPECT_TRUE(verify_linear_ef(emb, poly(3, {{0, 0, 5}, {1, 0, 5}, {0, 1, 5}})).verified);
}

TEST(ShannonPlan, Examples) {
    EXPECT_EQ(shannon_declared_bound(8, default_suffix_width(8)), 140);
    EXPECT_EQ(default_suffix_width(8), 1u);
    EXPECT_EQ(default_suffix_width(3), 0u);
    EXPECT_EQ(default_suffix_width(16), 2u);
    EXPECT_THROW(shannon_01_plan(VPolytope(8)), EmptySetError);

    ShannonPlan full = shannon_01_plan(zero_one_subset(4, 0xFFFF), 0);
    ASSERT_EQ(full.groups.size(), 1u);
    EXPECT_EQ(full.groups[0].prefixes.size(), 16u);
    ASSERT_EQ(full.groups[0].suffixes.size(), 1u);
    EXPECT_TRUE(full.groups[0].suffixes[0].empty());
    EXPECT_EQ(full.declared_bound, 20);

    ShannonPlan diag = shannon_01_plan(poly(2, {{0, 0}, {1, 1}}), 1);
    ASSERT_EQ(diag.groups.size(), 2u);
    EXPECT_EQ(diag.groups[0].suffixes, std::vector<BitTuple>{BitTuple{0}});
    EXPECT_EQ(diag.groups[0].prefixes, std::vector<BitTuple>{BitTuple{0}});
    EXPECT_EQ(diag.groups[1].suffixes, std::vector<BitTuple>{BitTuple{1}});
    EXPECT_EQ(diag.groups[1].prefixes, std::vector<BitTuple>{BitTuple{1}});

    EXPECT_THROW(shannon_01_plan(unit_square(), 3), InvalidInput);
    EXPECT_THROW(shannon_01_plan(poly(1, {{2}})), InvalidInput);
}

TEST(ShannonPlan, BoundFormulaWithinAsymptoticEnvelope) {
    for (size_t d = 4; d <= 30; ++d) {
        size_t s = default_suffix_width(d);
        double lhs = std::ldexp(1.0, static_cast<int>(d - s)) + std::ldexp(1.0, static_cast<int>(2 << s));
        EXPECT_LE(lhs, 9.0 * std::ldexp(1.0, static_cast<int>(d)) / d) << d;
    }
}

TEST(ShannonEf, ExhaustiveCubeThree) {
    for (unsigned mask = 1; mask < 256; ++mask) {
        VPolytope v = zero_one_subset(3, mask);
        for (size_t s = 0; s <= 3; ++s) {
            ShannonPlan plan = shannon_01_plan(v, s);
            LinearEF ef = shannon_01_ef(plan);
            size_t expect = plan.groups.size();
            for (const auto& g : plan.groups) expect += g.prefixes.size() + g.suffixes.size();
            EXPECT_EQ(ef.size(), expect);
            EXPECT_LE(Integer(ef.size()), plan.declared_bound);
            EXPECT_TRUE(verify_linear_ef(ef, v).verified) << "mask " << mask << " s " << s;
        }
    }
}

TEST(ShannonEf, FullCubeAndOrderIndependence) {
    LinearEF ef = shannon_01_ef(zero_one_subset(4, 0xFFFF));
    EXPECT_EQ(ef.size(), 18u);
    std::vector<RVector> pts = zero_one_subset(4, 0x6A5B).vertices();
    std::mt19937_64 rng(1);
    size_t first = shannon_01_ef(VPolytope::from_points(4, pts), 1).size();
    for (int i = 0; i < 5; ++i) {
        std::shuffle(pts.begin(), pts.end(), rng);
        EXPECT_EQ(shannon_01_ef(VPolytope::from_points(4, pts), 1).size(), first);
    }
}

TEST(ShannonEf, RandomSixDimensionalSizes) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
        VPolytope v = zero_one_subset(6, rng());
        if (v.empty()) continue;
        ShannonPlan plan = shannon_01_plan(v);
        LinearEF ef = shannon_01_ef(plan);
        EXPECT_LE(ef.size(), 96u);
        EXPECT_LE(Integer(ef.size()), plan.declared_bound);
    }
}
