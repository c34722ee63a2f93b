// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "extcomplex/extcomplex.hpp"
#include "test_support.hpp"

using namespace extcomplex;
using namespace extcomplex::test;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

// 1. Shannon construction: exact verification and size bounds.
Outcome upper_bound_construction() {
    Outcome o;
    size_t verified = 0;
    auto check = [&](const VPolytope& v, bool want_small) {
        ShannonPlan plan = shannon_01_plan(v);
        LinearEF ef = shannon_01_ef(plan);
        o.require(Integer(ef.size()) <= plan.declared_bound, "size above declared bound");
        if (want_small) o.require(ef.size() <= 96, "d=6 size above 9·2^d/d = 96");
        else {
            o.require(verify_linear_ef(ef, v).verified, "verification failed");
            ++verified;
        }
    };
    for (unsigned long long mask = 1; mask < 256; ++mask) check(zero_one_subset(3, mask), false);
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200;) {
        unsigned long long mask = rng() & 0xffffffffULL;
        if (mask == 0) continue;
        check(zero_one_subset(5, mask), false);
        ++i;
    }
    for (int i = 0; i < 100;) {
        unsigned long long mask = rng();
        if (mask == 0) continue;
        check(zero_one_subset(6, mask), true);
        ++i;
    }
    o.detail = o.pass ? std::to_string(verified) + " formulations verified, 100 d=6 sizes within 96" : o.detail;
    return o;
}

// 2. Bound formula against the hand value and the 32d² chain.
Outcome bound_fidelity() {
    Outcome o;
    BoundResult r = theorem1_bound({3, Rational(3), Rational(1, 3), Integer(256)});
    const long double hand = 8.0L / (24.0L * (4.0L + std::log2(6.0L)));
    o.require(std::fabs(r.B - hand) <= 1e-12L, "hand value mismatch");
    size_t cases = 0;
    for (size_t d = 3; d <= 12; ++d)
        for (size_t k = 1; k <= d; ++k) {  // log log N = k ≤ d
            Integer n;
            mpz_ui_pow_ui(n.get_mpz_t(), 2, 1UL << k);
            BoundResult b = theorem1_bound({d, Rational(d), Rational(1, d), n});
            const long double dd = static_cast<long double>(d);
            o.require(b.B >= std::ldexp(1.0L, static_cast<int>(k)) / (32 * dd * dd), "chain fails at d=" + std::to_string(d));
            ++cases;
        }
    if (o.pass) o.detail = "B = " + r.B_decimal + ", chain holds on " + std::to_string(cases) + " grid points";
    return o;
}

// 3. Exact separation of the two families.
Outcome separation_certificates() {
    Outcome o;
    SeparationResult z = min_pairwise_separation_sq(generate_family(FamilySpec::zero_one(3)));
    o.require(z.min_sq >= Rational(1, 3), "0/1 pair closer than 1/sqrt(3)");
    size_t families = 0;
    for (size_t s = 2; s <= 8; ++s)
        for (size_t n = 2; n <= std::min<size_t>(4, s); ++n) {
            auto fam = generate_family(FamilySpec::parabola(s, n));
            if (fam.size() < 2) continue;
            o.require(min_pairwise_separation_sq(fam).min_sq >= Rational(1, 9 * s * s),
                      "parabola s=" + std::to_string(s) + " n=" + std::to_string(n));
            ++families;
        }
    if (o.pass) o.detail = "0/1 d=3 min " + format_rational(z.min_sq) + ", " + std::to_string(families) + " parabola families";
    return o;
}

// 4. n-gon chain.
Outcome corollary42_chain() {
    Outcome o;
    for (size_t n : {2u, 16u, 256u, 4096u}) {
        Corollary42Bounds c = corollary42_bounds(n);
        const long double nn = static_cast<long double>(n);
        o.require(std::fabs(c.sxc_lower - std::pow(nn, 0.25L) / 4) <= 1e-10L, "sxc bound n=" + std::to_string(n));
        o.require(std::fabs(c.xc_lower - std::sqrt(nn) / 15) <= 1e-10L, "xc bound n=" + std::to_string(n));
        o.require(c.chain_holds, "B < n/208 at n=" + std::to_string(n));
        o.require(c.estimate_holds, "log estimate fails at n=" + std::to_string(n));
        o.require(c.final_holds, "final step fails at n=" + std::to_string(n));
    }
    if (o.pass) o.detail = "n in {2, 16, 256, 4096}";
    return o;
}

// 5. Normalization of trivial formulations of random polytopes.
Outcome normalization_invariants() {
    Outcome o;
    std::mt19937_64 rng(77);
    int done = 0;
    double worst_a = 0;
    while (done < 50) {
        const size_t d = 1 + static_cast<size_t>(done % 3);
        const size_t pts = 2 + rng() % 7;
        VPolytope p = random_polytope(rng, d, pts, 4, 2);
        if (p.affine_dimension() < 1) continue;
        LinearEF ef = trivial_vrep_ef(p);
        NormalizedEF res = normalize(ef, p, {SandwichMode::john, 1e-8, static_cast<unsigned>(done), std::nullopt});
        const auto& c = res.certificate;
        const std::string tag = "polytope " + std::to_string(done);
        o.require(c.passed(), tag + ": certificate");
        o.require(c.norm_A_upper <= 1 + 1e-6, tag + ": ‖A‖");
        o.require(c.norm_phi <= res.rho * (1 + 1e-6) && c.norm_t <= res.rho * (1 + 1e-6), tag + ": ‖φ‖, ‖t‖");
        o.require(res.triple.n() <= res.triple.l() * res.triple.m() * res.triple.m(), tag + ": n ≤ ℓm²");
        o.require(res.triple.l() == ef.size() && res.triple.m() == 1, tag + ": (ℓ, m) changed");
        worst_a = std::max(worst_a, c.norm_A_upper);
        ++done;
    }
    if (o.pass) o.detail = "50 polytopes, max ‖A‖ = " + std::to_string(worst_a);
    return o;
}

// 6. Monic reduction preserves membership; worked example.
Outcome helton_vinnikov() {
    Outcome o;
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<long> num(-3, 3);
    std::uniform_real_distribution<double> unif(-1, 1);
    for (int inst = 0; inst < 30; ++inst) {
        const size_t k = 2 + static_cast<size_t>(inst) % 4, r = 1 + static_cast<size_t>(inst) % (k - 1);
        const size_t n = 1 + static_cast<size_t>(inst) % 3;
        RMatrix v(k, k);
        do {
            for (size_t i = 0; i < k; ++i)
                for (size_t j = 0; j < k; ++j) v(i, j) = num(rng);
        } while (!inverse(v));
        auto conj = [&](const RMatrix& inner) { return v * inner * v.transpose(); };
        AffineMatrixMap m;
        RMatrix core(k, k);
        for (size_t i = 0; i < r; ++i) core(i, i) = 1;
        m.constant = conj(core);
        for (size_t j = 0; j < n; ++j) {
            RMatrix s(k, k);
            for (size_t a = 0; a < r; ++a)
                for (size_t b = a; b < r; ++b) s(a, b) = s(b, a) = num(rng);
            m.linear.push_back(conj(s));
        }
        MonicBlock red = helton_vinnikov_reduce(m);
        int excluded = 0, agree = 0;
        for (int s = 0; s < 500; ++s) {
            RVector x(n);
            Eigen::VectorXd xd(static_cast<Eigen::Index>(n));
            for (size_t j = 0; j < n; ++j) {
                x[j] = rational_from_double(unif(rng));
                xd(static_cast<Eigen::Index>(j)) = to_double(x[j]);
            }
            Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
            for (size_t j = 0; j < n; ++j) a += xd(static_cast<Eigen::Index>(j)) * red.coeffs[j];
            const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues()(0);
            if (std::abs(lmin) < 1e-7) {
                ++excluded;
                continue;
            }
            agree += is_psd(m(x)) == (lmin > 0);
        }
        const std::string tag = "instance " + std::to_string(inst);
        o.require(agree == 500 - excluded, tag + ": membership disagrees");
        o.require(excluded <= 5, tag + ": more than 1% excluded");
    }
    AffineMatrixMap w;
    w.constant = RMatrix(2, 2);
    w.constant(0, 0) = 1;
    w.linear.push_back(w.constant);
    MonicBlock red = helton_vinnikov_reduce(w);
    Eigen::Matrix2d expected;
    expected << 1, 0, 0, 0;
    o.require((red.coeffs[0] - expected).norm() <= 1e-8, "worked example is not diag(x, 0)");
    if (o.pass) o.detail = "30 instances × 500 samples, worked example diag(x, 0)";
    return o;
}

// 7. Perturbation bound for pairs of normalized triples.
Outcome distance_bound() {
    Outcome o;
    std::mt19937_64 rng(707);
    std::normal_distribution<double> gauss;
    int pairs = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    while (pairs < 100) {
        const size_t d = 1 + static_cast<size_t>(pairs % 3), k = d + 1 + rng() % 3;
        VPolytope p1 = random_polytope(rng, d, k, 4, 2), p2 = random_polytope(rng, d, k, 4, 2);
        if (p1.num_vertices() != k || p2.num_vertices() != k) continue;
        NormalizedEF a = normalize(trivial_vrep_ef(p1), p1), b = normalize(trivial_vrep_ef(p2), p2);
        if (a.sentinel || b.sentinel || a.triple.shape() != b.triple.shape()) continue;
        const double rho = std::max(a.rho, b.rho);
        const double bound = triple_distance_bound(a.triple, b.triple, rho);
        auto ia = linear_triple_image(a.triple), ib = linear_triple_image(b.triple);
        double est = 0;
        for (int s = 0; s < 400; ++s) {
            Eigen::VectorXd u(static_cast<Eigen::Index>(d));
            for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = gauss(rng);
            u.normalize();
            double ha = -1e300, hb = -1e300;
            for (const auto& y : ia) ha = std::max(ha, u.dot(y));
            for (const auto& y : ib) hb = std::max(hb, u.dot(y));
            est = std::max(est, std::abs(ha - hb));
        }
        o.require(est <= bound + 1e-8, "pair " + std::to_string(pairs) + " exceeds its bound");
        worst_margin = std::min(worst_margin, bound - est);
        ++pairs;
    }
    if (o.pass) o.detail = "100 pairs, smallest margin " + [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", worst_margin);
        return std::string(buf);
    }();
    return o;
}

// 8. John ellipsoid of cubes and random polytopes.
Outcome john_ellipsoids() {
    Outcome o;
    for (size_t n = 1; n <= 4; ++n) {
        HPolyhedron cube(n);
        for (size_t i = 0; i < n; ++i)
            for (int sign : {-1, 1}) {
                RVector a(n);
                a[i] = sign;
                cube.add_inequality(std::move(a), 1);
            }
        Ellipsoid e = john_ellipsoid(cube);
        const auto ni = static_cast<Eigen::Index>(n);
        o.require(e.center.norm() <= 1e-6, "cube centre n=" + std::to_string(n));
        o.require((e.shape * e.shape.transpose() - Eigen::MatrixXd::Identity(ni, ni)).norm() <= 1e-6,
                  "cube shape n=" + std::to_string(n));
    }
    std::mt19937_64 rng(808);
    int done = 0;
    while (done < 20) {
        const size_t n = 2 + static_cast<size_t>(done % 3);
        VPolytope p = random_polytope(rng, n, n + 2 + rng() % 6);
        if (p.affine_dimension() < static_cast<int>(n)) continue;
        Ellipsoid e = john_ellipsoid(convex_hull_facets(p), 1e-8);
        o.require(e.inner_slack <= 1e-5, "inner inclusion, polytope " + std::to_string(done));
        o.require(e.outer_factor <= static_cast<double>(n) * (1 + 1e-5), "outer inclusion, polytope " + std::to_string(done));
        ++done;
    }
    if (o.pass) o.detail = "cubes n ≤ 4, 20 random polytopes";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"upper-bound construction", upper_bound_construction},
        {"bound-formula fidelity", bound_fidelity},
        {"separation certificates", separation_certificates},
        {"n-gon chain", corollary42_chain},
        {"normalization invariants", normalization_invariants},
        {"monic reduction", helton_vinnikov},
        {"distance bound", distance_bound},
        {"John ellipsoid", john_ellipsoids},
    };
    int failures = 0, index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", index, name, secs, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
