#pragma once

// Command-line front end. Each verb reads the JSON formats of json_io.hpp,
// calls one library operation and writes its serialized result to `out`.
// Exit codes: 0 success, 1 verification or certificate failure, 2 bad input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "extcomplex/json_io.hpp"

namespace extcomplex::cli {

namespace detail {

inline io::json read_json_file(const std::string& path) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (path != "-") {
        file.open(path);
        if (!file) throw InvalidInput("cannot open '" + path + "'");
        in = &file;
    }
    try {
        return io::json::parse(*in);
    } catch (const io::json::exception& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

// "12345", "2^k" or "a^k" for exact integers.
inline Integer parse_integer(const std::string& text) {
    auto as_int = [&](const std::string& t) {
        Integer z;
        if (t.empty() || z.set_str(t, 10) != 0) throw ParseError("malformed integer '" + text + "'");
        return z;
    };
    if (auto caret = text.find('^'); caret != std::string::npos) {
        Integer base = as_int(text.substr(0, caret)), e = as_int(text.substr(caret + 1));
        if (e < 0 || !e.fits_ulong_p()) throw ParseError("exponent out of range in '" + text + "'");
        Integer z;
        mpz_pow_ui(z.get_mpz_t(), base.get_mpz_t(), e.get_ui());
        return z;
    }
    return as_int(text);
}

inline void emit(std::ostream& out, const io::json& j) { out << j.dump(2) << '\n'; }

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Extended formulations: construct, verify, normalize, bound"};
    app.require_subcommand(1);
    unsigned seed = 0, jobs = 1;
    app.add_option("--seed", seed, "seed for all randomized sampling");
    app.add_option("--jobs", jobs, "worker threads for pairwise sweeps")->check(CLI::PositiveNumber);

    // construct
    auto* construct = app.add_subcommand("construct", "build a linear extended formulation of conv(V)");
    std::string vertices_path;
    bool shannon = false, trivial = false;
    std::optional<size_t> suffix;
    construct->add_option("--vertices", vertices_path, "polytope JSON")->required();
    auto* shannon_flag = construct->add_flag("--shannon", shannon, "prefix/suffix decomposition of a 0/1 set");
    construct->add_flag("--trivial", trivial, "one variable per vertex")->excludes(shannon_flag);
    construct->add_option("--s", suffix, "suffix width")->needs(shannon_flag);

    // verify
    auto* verify = app.add_subcommand("verify", "check proj(lifted) = conv(target) exactly");
    std::string ef_path, target_path;
    verify->add_option("--ef", ef_path, "formulation JSON")->required();
    verify->add_option("--target", target_path, "polytope JSON")->required();

    // normalize
    auto* normalize_cmd = app.add_subcommand("normalize", "normalized encoding (A, phi, t) with certificate");
    std::string mode = "john";
    double tol = 1e-8;
    normalize_cmd->add_option("--ef", ef_path, "formulation JSON")->required();
    normalize_cmd->add_option("--target", target_path, "polytope JSON")->required();
    normalize_cmd->add_option("--mode", mode, "john or box (linear only)")->check(CLI::IsMember({"john", "box"}));
    normalize_cmd->add_option("--tol", tol, "ellipsoid tolerance");

    // bound
    auto* bound = app.add_subcommand("bound", "lower bound B on l^2 m^4 for a family");
    size_t d = 0;
    std::string rho_text, delta_text, n_text, table;
    size_t from = 0, to = 0;
    auto* d_opt = bound->add_option("--d", d, "ambient dimension");
    bound->add_option("--rho", rho_text, "radius (decimal or p/q)");
    bound->add_option("--delta", delta_text, "separation (decimal or p/q)");
    bound->add_option("--N", n_text, "family size, e.g. 256 or 2^64");
    auto* table_opt = bound->add_option("--table", table, "CSV table: corollary41 (over d) or corollary42 (over n)")
                          ->check(CLI::IsMember({"corollary41", "corollary42"}))
                          ->excludes(d_opt);
    bound->add_option("--from", from, "first table parameter")->needs(table_opt);
    bound->add_option("--to", to, "last table parameter")->needs(table_opt);

    // family
    auto* family = app.add_subcommand("family", "generate a polytope family and optionally certify it");
    std::string kind;
    size_t fam_d = 0, fam_s = 0, fam_n = 0, random_count = 0, claim_l = 0, claim_m = 1;
    bool skip_points = false, separation = false;
    family->add_option("--kind", kind, "zero_one or parabola")->required()->check(CLI::IsMember({"zero_one", "parabola"}));
    family->add_option("--d", fam_d, "dimension (zero_one)");
    family->add_option("--s", fam_s, "index range 1..s (parabola)");
    family->add_option("--n", fam_n, "points per member (parabola)");
    family->add_option("--random", random_count, "draw this many members instead of all");
    family->add_flag("--skip-points", skip_points, "drop members of dimension 0");
    family->add_flag("--separation", separation, "report the exact minimum squared separation");
    auto* l_opt = family->add_option("--l", claim_l, "claimed number of blocks: certify the family bound");
    family->add_option("--m", claim_m, "claimed block size")->needs(l_opt);

    // distance
    auto* distance = app.add_subcommand("distance", "exact squared Hausdorff distance");
    std::string a_path, b_path;
    distance->add_option("--a", a_path, "polytope JSON")->required();
    distance->add_option("--b", b_path, "polytope JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*construct) {
            VPolytope v = io::polytope_from_json(detail::read_json_file(vertices_path));
            if (trivial) {
                detail::emit(out, {{"ef", io::to_json(trivial_vrep_ef(v))}});
                return 0;
            }
            if (!shannon) throw InvalidInput("choose --shannon or --trivial");
            ShannonPlan plan = shannon_01_plan(v, suffix);
            LinearEF ef = shannon_01_ef(plan);
            err << "size " << ef.size() << " (declared bound " << plan.declared_bound.get_str() << ")\n";
            detail::emit(out, {{"plan", io::to_json(plan)}, {"ef", io::to_json(ef)}});
            return 0;
        }
        if (*verify) {
            io::AnyEF ef = io::ef_from_json(detail::read_json_file(ef_path));
            VPolytope target = io::polytope_from_json(detail::read_json_file(target_path));
            if (!std::holds_alternative<LinearEF>(ef)) throw InvalidInput("exact verification needs a linear formulation");
            VerificationReport rep = verify_linear_ef(std::get<LinearEF>(ef), target);
            detail::emit(out, io::to_json(rep));
            if (!rep.verified) err << "not verified: " << rep.message << '\n';
            return rep.verified ? 0 : 1;
        }
        if (*normalize_cmd) {
            io::AnyEF ef = io::ef_from_json(detail::read_json_file(ef_path));
            VPolytope target = io::polytope_from_json(detail::read_json_file(target_path));
            NormalizeOptions opt;
            opt.mode = mode == "box" ? SandwichMode::box : SandwichMode::john;
            opt.tol = tol;
            opt.seed = seed;
            NormalizedEF res = std::visit([&](const auto& e) { return extcomplex::normalize(e, target, opt); }, ef);
            detail::emit(out, io::to_json(res));
            const bool ok = res.sentinel || res.certificate.passed();
            if (!ok) err << "certificate failed\n";
            return ok ? 0 : 1;
        }
        if (*bound) {
            if (!table.empty()) {
                if (table == "corollary41") {
                    out << "d,sxc_threshold,xc_threshold,prob_exponent\n";
                    for (size_t k = std::max<size_t>(from, 3); k <= std::max(to, from); ++k) {
                        auto t = corollary41_thresholds(k);
                        out << k << ',' << io::decimal(static_cast<double>(t.sxc_threshold)) << ','
                            << io::decimal(static_cast<double>(t.xc_threshold)) << ',' << t.prob_exponent.get_str() << '\n';
                    }
                } else {
                    out << "n,sxc_lower,xc_lower,B,chain_holds,estimate_holds\n";
                    for (size_t k = std::max<size_t>(from, 2); k <= std::max(to, from); k *= 2) {
                        auto c = corollary42_bounds(k);
                        out << k << ',' << io::decimal(static_cast<double>(c.sxc_lower)) << ','
                            << io::decimal(static_cast<double>(c.xc_lower)) << ',' << c.bound.B_decimal << ','
                            << (c.chain_holds ? "true" : "false") << ',' << (c.estimate_holds ? "true" : "false") << '\n';
                    }
                }
                return 0;
            }
            if (rho_text.empty() || delta_text.empty() || n_text.empty() || d == 0)
                throw InvalidInput("bound needs --d, --rho, --delta and --N");
            Rational rho = parse_rational(rho_text), delta = parse_rational(delta_text);
            BoundInputs in{d, rho * rho, delta * delta, detail::parse_integer(n_text)};
            detail::emit(out, io::to_json(theorem1_bound(in)));
            return 0;
        }
        if (*family) {
            FamilySpec spec = kind == "zero_one" ? FamilySpec::zero_one(fam_d) : FamilySpec::parabola(fam_s, fam_n);
            FamilySelector sel = random_count > 0 ? FamilySelector::random(random_count, seed) : FamilySelector::all();
            sel.skip_points = skip_points;
            std::vector<VPolytope> members = generate_family(spec, sel);
            io::json j = {{"kind", kind}, {"count", members.size()}};
            if (separation) {
                SeparationResult sep = min_pairwise_separation_sq(members, jobs);
                j["separation"] = {{"min_sq", format_rational(sep.min_sq)}, {"i", sep.i}, {"j", sep.j}};
                j["radius_sq"] = format_rational(circumradius_sq(members));
            }
            if (claim_l > 0) j["certificate"] = io::to_json(certify_family_bound(members, EFSizeClaim{claim_l, claim_m}, jobs));
            j["members"] = io::to_json(members);
            detail::emit(out, j);
            return 0;
        }
        if (*distance) {
            VPolytope a = io::polytope_from_json(detail::read_json_file(a_path));
            VPolytope b = io::polytope_from_json(detail::read_json_file(b_path));
            Rational h = hausdorff_distance_sq(a, b);
            detail::emit(out, {{"distance_sq", format_rational(h)}, {"distance", io::decimal(std::sqrt(to_double(h)))}});
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<const char*> argv{"extcomplex"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace extcomplex::cli
