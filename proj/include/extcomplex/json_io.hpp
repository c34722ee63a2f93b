#pragma once

// JSON reading and writing for every exchanged object. Rationals travel as
// "p/q" (or integer) strings, floating values as shortest round-trip decimal
// strings.

#include <charconv>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "extcomplex/bounds.hpp"
#include "extcomplex/constructions.hpp"
#include "extcomplex/normalization.hpp"

namespace extcomplex::io {

using json = nlohmann::ordered_json;

inline std::string decimal(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace detail {

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed ") + what + ": " + e.what());
    }
}

inline Rational read_rational(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(Integer(j.dump(), 10));
    throw ParseError("expected a rational string, got " + j.dump());
}

inline double read_double(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw ParseError("expected a decimal string, got " + j.dump());
    const std::string s = j.get<std::string>();
    double x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("malformed decimal '" + s + "'");
    return x;
}

inline RVector read_vector(const json& j, std::optional<size_t> len = std::nullopt) {
    if (!j.is_array()) throw ParseError("expected an array, got " + j.dump());
    RVector v;
    for (const auto& x : j) v.push_back(read_rational(x));
    if (len && v.size() != *len)
        throw DimensionMismatch("vector of length " + std::to_string(v.size()) + ", expected " + std::to_string(*len));
    return v;
}

inline RMatrix read_matrix(const json& j, size_t rows, size_t cols) {
    if (!j.is_array() || j.size() != rows)
        throw DimensionMismatch("matrix with " + std::to_string(j.is_array() ? j.size() : 0) + " rows, expected " +
                                std::to_string(rows));
    std::vector<RVector> rs;
    for (const auto& r : j) rs.push_back(read_vector(r, cols));
    return RMatrix::from_rows(rs, cols);
}

inline size_t read_size(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_unsigned()) throw ParseError(std::string("missing or invalid '") + key + "'");
    return j.at(key).get<size_t>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact objects

inline json to_json(const Rational& r) { return format_rational(r); }

inline json to_json(std::span<const Rational> v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(format_rational(x));
    return a;
}

inline json to_json(const RMatrix& m) {
    json a = json::array();
    for (size_t r = 0; r < m.rows(); ++r) a.push_back(to_json(m.row(r)));
    return a;
}

inline json to_json(const VPolytope& p) {
    json vs = json::array();
    for (const auto& v : p.vertices()) vs.push_back(to_json(v));
    return {{"dim", p.dim()}, {"vertices", vs}};
}

inline VPolytope polytope_from_json(const json& j) {
    return detail::guarded("polytope", [&] {
        const size_t d = detail::read_size(j, "dim");
        std::vector<RVector> pts;
        for (const auto& v : j.at("vertices")) pts.push_back(detail::read_vector(v, d));
        return VPolytope::from_points(d, std::move(pts));
    });
}

inline json to_json(const LinearConstraint& c) { return {{"a", to_json(c.a)}, {"b", format_rational(c.b)}}; }

inline json to_json(const HPolyhedron& h) {
    json in = json::array(), eq = json::array();
    for (const auto& c : h.inequalities()) in.push_back(to_json(c));
    for (const auto& c : h.equations()) eq.push_back(to_json(c));
    return {{"dim", h.dim()}, {"ineqs", in}, {"eqs", eq}};
}

inline HPolyhedron hrep_from_json(const json& j) {
    return detail::guarded("H-representation", [&] {
        const size_t n = detail::read_size(j, "dim");
        HPolyhedron h(n);
        if (j.contains("ineqs"))
            for (const auto& c : j.at("ineqs")) h.add_inequality(detail::read_vector(c.at("a"), n), detail::read_rational(c.at("b")));
        if (j.contains("eqs"))
            for (const auto& c : j.at("eqs")) h.add_equation(detail::read_vector(c.at("a"), n), detail::read_rational(c.at("b")));
        return h;
    });
}

inline json to_json(const AffineMap& m) { return {{"matrix", to_json(m.matrix())}, {"offset", to_json(m.offset())}}; }

inline AffineMap affine_map_from_json(const json& j, size_t in_dim) {
    RVector off = detail::read_vector(j.at("offset"));
    RMatrix m = detail::read_matrix(j.at("matrix"), off.size(), in_dim);
    return AffineMap(std::move(m), std::move(off));
}

inline json to_json(const LinearEF& ef) {
    return {{"kind", "linear"}, {"n", ef.lifted.dim()}, {"proj", to_json(ef.proj)}, {"lifted", to_json(ef.lifted)}};
}

inline json to_json(const SemidefEF& ef) {
    json blocks = json::array();
    for (const auto& b : ef.blocks) {
        json s = json::array();
        for (const auto& m : b.linear) s.push_back(to_json(m));
        blocks.push_back({{"S", s}, {"T", to_json(b.constant)}});
    }
    return {{"kind", "semidef"}, {"n", ef.n()}, {"proj", to_json(ef.proj)}, {"blocks", blocks}};
}

using AnyEF = std::variant<LinearEF, SemidefEF>;

// Also accepts the {"ef": ...} wrapper written by `construct`.
inline AnyEF ef_from_json(const json& wrapped) {
    const json& j = wrapped.is_object() && wrapped.contains("ef") && !wrapped.contains("kind") ? wrapped["ef"] : wrapped;
    return detail::guarded("formulation", [&]() -> AnyEF {
        const std::string kind = j.at("kind").get<std::string>();
        const size_t n = detail::read_size(j, "n");
        AffineMap proj = affine_map_from_json(j.at("proj"), n);
        if (kind == "linear") {
            HPolyhedron lifted = hrep_from_json(j.at("lifted"));
            if (lifted.dim() != n) throw DimensionMismatch("lifted dimension differs from 'n'");
            return LinearEF{std::move(lifted), std::move(proj)};
        }
        if (kind != "semidef") throw ParseError("unknown formulation kind '" + kind + "'");
        SemidefEF ef{{}, std::move(proj)};
        for (const auto& b : j.at("blocks")) {
            AffineMatrixMap m;
            const size_t k = b.at("T").size();
            m.constant = detail::read_matrix(b.at("T"), k, k);
            if (b.at("S").size() != n) throw DimensionMismatch("block needs one S matrix per lifted coordinate");
            for (const auto& s : b.at("S")) m.linear.push_back(detail::read_matrix(s, k, k));
            ef.blocks.push_back(std::move(m));
        }
        ef.validate();
        return ef;
    });
}

inline json to_json(const VerificationReport& r) {
    json j = {{"verified", r.verified}, {"failure", failure_name(r.failure)}, {"message", r.message}};
    if (!r.vertex.empty()) j["vertex"] = to_json(r.vertex);
    if (!r.constraint.a.empty()) j["constraint"] = to_json(r.constraint);
    if (!r.witness.empty()) {
        j["witness"] = to_json(r.witness);
        j["witness_image"] = to_json(r.witness_image);
    }
    return j;
}

inline json to_json(const EFShape& s) { return {{"l", s.l}, {"m", s.m}, {"n", s.n}, {"d", s.d}}; }

// ---------------------------------------------------------------------------
// Constructions

inline json bits_to_json(const BitTuple& b) {
    json a = json::array();
    for (auto x : b) a.push_back(static_cast<int>(x));
    return a;
}

inline json to_json(const ShannonPlan& plan) {
    json groups = json::array();
    for (const auto& g : plan.groups) {
        json ys = json::array(), xs = json::array();
        for (const auto& y : g.suffixes) ys.push_back(bits_to_json(y));
        for (const auto& x : g.prefixes) xs.push_back(bits_to_json(x));
        groups.push_back({{"Y", ys}, {"X", xs}});
    }
    return {{"d", plan.d}, {"s", plan.s}, {"groups", groups}, {"declared_bound", plan.declared_bound.get_str()}};
}

// ---------------------------------------------------------------------------
// Floating objects

inline json to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(decimal(v(i)));
    return a;
}

inline json to_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(decimal(m(r, c)));
        a.push_back(row);
    }
    return a;
}

inline json to_json(const NormalizationCertificate& c) {
    return {{"rho", decimal(c.rho)},
            {"norm_A_lower", decimal(c.norm_A_lower)},
            {"norm_A_upper", decimal(c.norm_A_upper)},
            {"norm_A_exact", c.norm_A_exact},
            {"norm_phi", decimal(c.norm_phi)},
            {"norm_t", decimal(c.norm_t)},
            {"n_check", c.n_check},
            {"inner_ball", c.inner_ball},
            {"outer_ball", c.outer_ball},
            {"outer_exact", c.outer_exact},
            {"outer_status", c.outer_exact ? "exact" : "incomplete"},
            {"outer_radius", decimal(c.outer_radius)},
            {"phi_check", c.phi_check},
            {"t_check", c.t_check},
            {"passed", c.passed()}};
}

inline json to_json(const EncodingTriple& tr) {
    json blocks = json::array();
    for (const auto& b : tr.blocks) {
        json coeffs = json::array();
        for (const auto& m : b) coeffs.push_back(to_json(m));
        blocks.push_back(coeffs);
    }
    return {{"l", tr.l()}, {"m", tr.m()}, {"n", tr.n()}, {"A_blocks", blocks}, {"phi", to_json(tr.phi)}, {"t", to_json(tr.t)}};
}

inline EncodingTriple triple_from_json(const json& j) {
    return detail::guarded("triple", [&] {
        const size_t l = detail::read_size(j, "l"), m = detail::read_size(j, "m"), n = detail::read_size(j, "n");
        auto mat = [](const json& a, size_t rows, size_t cols) {
            if (a.size() != rows) throw DimensionMismatch("floating matrix rows");
            Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
            for (size_t r = 0; r < rows; ++r) {
                if (a[r].size() != cols) throw DimensionMismatch("floating matrix columns");
                for (size_t c = 0; c < cols; ++c)
                    out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = detail::read_double(a[r][c]);
            }
            return out;
        };
        EncodingTriple tr;
        if (j.at("A_blocks").size() != l) throw DimensionMismatch("A_blocks length differs from 'l'");
        for (const auto& b : j.at("A_blocks")) {
            if (b.size() != n) throw DimensionMismatch("block needs one coefficient per coordinate");
            std::vector<Eigen::MatrixXd> coeffs;
            for (const auto& c : b) coeffs.push_back(mat(c, m, m));
            tr.blocks.push_back(std::move(coeffs));
        }
        const size_t d = j.at("t").size();
        tr.phi = mat(j.at("phi"), d, n);
        tr.t = Eigen::VectorXd(static_cast<Eigen::Index>(d));
        for (size_t i = 0; i < d; ++i) tr.t(static_cast<Eigen::Index>(i)) = detail::read_double(j.at("t")[i]);
        tr.validate();
        return tr;
    });
}

inline json to_json(const NormalizedEF& r) {
    json j = to_json(r.triple);
    j["rho"] = decimal(r.rho);
    j["sentinel"] = r.sentinel;
    j["section"] = {{"basis", to_json(r.section.basis)}, {"offset", to_json(r.section.offset)}};
    j["certificate"] = to_json(r.certificate);
    return j;
}

// ---------------------------------------------------------------------------
// Bounds

inline json to_json(const BoundResult& b) {
    return {{"B", b.B_decimal}, {"sxc_floor", b.sxc_floor}, {"xc_floor", b.xc_floor}, {"precision_bits", b.precision_bits}};
}

inline json to_json(const CertifiedReport& r) {
    return {{"d", r.d},
            {"rho_sq", format_rational(r.rho_sq)},
            {"delta_sq", format_rational(r.delta_sq)},
            {"N", r.N.get_str()},
            {"B", r.bound.B_decimal},
            {"sxc_floor", r.bound.sxc_floor},
            {"xc_floor", r.bound.xc_floor},
            {"l", r.claim.l},
            {"m", r.claim.m},
            {"claim_value", r.claim_value.get_str()},
            {"violation", r.violation}};
}

inline json to_json(const std::vector<VPolytope>& family) {
    json a = json::array();
    for (const auto& p : family) a.push_back(to_json(p));
    return a;
}

inline std::vector<VPolytope> family_from_json(const json& j) {
    return detail::guarded("family", [&] {
        const json& members = j.is_object() ? j.at("members") : j;
        std::vector<VPolytope> out;
        for (const auto& p : members) out.push_back(polytope_from_json(p));
        return out;
    });
}

}  // namespace extcomplex::io
