#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fpsys/fpsys.hpp"
#include "fpsys/report_json.hpp"

namespace fpsys::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

struct Common {
    std::optional<std::uint64_t> seed_flag;
    unsigned threads = 1;
    std::string format = "json";
    bool no_timestamp = false;
};

/// Seed precedence: --seed, then the SEED environment variable, then 0.
inline std::uint64_t resolve_seed(const Common& c) {
    if (c.seed_flag) {
        return *c.seed_flag;
    }
    if (const char* env = std::getenv("SEED")) {
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return v;
            }
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string("SEED is not an unsigned integer: ") + env);
    }
    return 0;
}

inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

inline void print_text(std::ostream& out, const Json& j, const std::string& prefix = "") {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            print_text(out, *it, key);
        } else if (it->is_string()) {
            out << key << ": " << it->get<std::string>() << '\n';
        } else {
            out << key << ": " << it->dump() << '\n';
        }
    }
}

inline void emit(std::ostream& out, const Common& c, Json j) {
    if (!c.no_timestamp) {
        j["timestamp"] = utc_now();
    }
    if (c.format == "text") {
        print_text(out, j);
    } else {
        out << j.dump(2) << '\n';
    }
}

inline SystemSpec load_system(const std::string& path) {
    auto in = open_input(path);
    return read_system(in);
}

/// --points FILE, or the whole of F_p^n (optionally without 0) from --n.
inline PointSet load_points(const SystemSpec& sys, const std::string& path, std::optional<std::size_t> n,
                            bool exclude_zero) {
    if (!path.empty()) {
        auto in = open_input(path);
        PointSet a = read_point_set(in);
        if (a.field().p() != sys.field().p()) {
            throw ParseError("point set uses p=" + std::to_string(a.field().p()) + " but the system uses p=" +
                             std::to_string(sys.field().p()));
        }
        return a;
    }
    if (!n) {
        throw std::invalid_argument("give --points FILE or --n N");
    }
    return PointSet::full_space(sys.field(), *n, exclude_zero);
}

inline std::optional<AvoidMode> mode_or_throw(const std::string& s) {
    auto m = parse_avoid_mode(s);
    if (!m) {
        throw std::invalid_argument("unknown mode '" + s + "'");
    }
    return m;
}

inline SolutionFilter solve_filter(const std::string& mode, std::size_t r, std::size_t ell) {
    if (mode == "any") {
        return SolutionFilter::any();
    }
    switch (*mode_or_throw(mode)) {
        case AvoidMode::NotAllEqual:
            return SolutionFilter::not_all_equal();
        case AvoidMode::Distinct:
            return SolutionFilter::distinct();
        case AvoidMode::SpanDimAtLeast:
            return SolutionFilter::span_dim_at_least(r);
        case AvoidMode::DistinctCountAtLeast:
            return SolutionFilter::distinct_count_at_least(ell);
    }
    return SolutionFilter::any();
}

/// "1 2;3 4" -> {{0,1},{2,3}}
inline std::vector<std::vector<std::size_t>> parse_blocks(const std::string& spec) {
    std::vector<std::vector<std::size_t>> blocks;
    std::stringstream all(spec);
    std::string part;
    while (std::getline(all, part, ';')) {
        std::replace(part.begin(), part.end(), ',', ' ');
        std::istringstream ps(part);
        std::vector<std::size_t> b;
        long long v = 0;
        while (ps >> v) {
            if (v < 1) {
                throw std::invalid_argument("block indices are 1-based");
            }
            b.push_back(static_cast<std::size_t>(v - 1));
        }
        if (!ps.eof()) {
            throw std::invalid_argument("malformed block list '" + spec + "'");
        }
        blocks.push_back(std::move(b));
    }
    return blocks;
}

inline void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed_flag, "Master seed (default: $SEED, else 0)");
    sub->add_option("--threads", c.threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "text", "csv"}));
    sub->add_flag("--no-timestamp", c.no_timestamp, "Omit timestamps and timings from the output");
}

/// Runs one CLI invocation. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact computations with linear systems over F_p^n", "fpsys"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    Common c;

    // gamma
    std::uint64_t g_p = 0;
    std::size_t g_m = 0;
    std::size_t g_k = 0;
    double g_tol = 1e-12;
    std::optional<std::size_t> g_n;
    auto* gamma_cmd = app.add_subcommand("gamma", "Gamma_{p,m,k}, with the monomial count and k*Gamma^n for --n");
    gamma_cmd->add_option("--p", g_p, "Prime")->required();
    gamma_cmd->add_option("--m", g_m, "Number of equations")->required()->check(CLI::PositiveNumber);
    gamma_cmd->add_option("--k", g_k, "Number of variables")->required()->check(CLI::PositiveNumber);
    gamma_cmd->add_option("--tol", g_tol, "Bisection tolerance on z")->check(CLI::PositiveNumber);
    gamma_cmd->add_option("--n", g_n, "Dimension for the monomial count and the slice-rank bound");
    add_common(gamma_cmd, c);

    // validate
    std::string system_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check row sums, m x m minors and rank of a system");
    validate_cmd->add_option("--system", system_path, "System file")->required();
    add_common(validate_cmd, c);

    // solve
    std::string points_path;
    std::optional<std::size_t> n_opt;
    bool exclude_zero = false;
    std::string mode = "any";
    std::size_t r_opt = 2;
    std::optional<std::size_t> ell_opt;  // defaults to k
    std::size_t limit = 20;
    auto* solve_cmd = app.add_subcommand("solve", "Enumerate and classify solutions in A^k");
    solve_cmd->add_option("--system", system_path, "System file")->required();
    solve_cmd->add_option("--points", points_path, "Point-set file for A");
    solve_cmd->add_option("--n", n_opt, "Use A = F_p^n");
    solve_cmd->add_flag("--exclude-zero", exclude_zero, "Remove 0 from A = F_p^n");
    solve_cmd->add_option("--mode", mode, "any | not-all-equal | distinct | span-dim | distinct-count");
    solve_cmd->add_option("--r", r_opt, "Span dimension threshold for span-dim");
    solve_cmd->add_option("--ell", ell_opt, "Distinct-count threshold for distinct-count (default k)");
    solve_cmd->add_option("--limit", limit, "Number of solutions to list");
    add_common(solve_cmd, c);

    // weight
    std::string tuple_path;
    auto* weight_cmd = app.add_subcommand("weight", "Admissible sets, omega and the line partition of a tuple");
    weight_cmd->add_option("--points", tuple_path, "Vector-list file holding x_1..x_k")->required();
    weight_cmd->add_option("--system", system_path, "Also check the tuple against this system");
    add_common(weight_cmd, c);

    // slicerank
    std::string tensor_path;
    std::string blocks_spec;
    std::size_t cap_support = kDefaultPartitionSearchCap;
    bool increasing = false;
    auto* slice_cmd = app.add_subcommand("slicerank", "Exact slice rank of an antichain tensor");
    slice_cmd->add_option("--tensor", tensor_path, "Tensor file")->required();
    slice_cmd->add_option("--blocks", blocks_spec, "Partition of [k] for the orders, e.g. \"1 2;3 4\" (default [k])");
    slice_cmd->add_flag("--increasing", increasing, "Use the increasing order on every coordinate")
        ->excludes(slice_cmd->get_option("--blocks"));
    slice_cmd->add_option("--cap-support", cap_support, "Largest support searched");
    add_common(slice_cmd, c);

    // sample
    std::string sample_mode = "containment";
    std::size_t d_opt = 1;
    std::size_t s_opt = 1;
    std::size_t w_opt = 0;
    std::uint64_t trials = 0;
    std::uint64_t s_p = 0;
    std::uint64_t cap_enum = kDefaultSamplingCap;
    auto* sample_cmd = app.add_subcommand("sample", "Containment probabilities and one-step sampling deletions");
    sample_cmd->add_option("--mode", sample_mode, "containment | distinct | weight")
        ->check(CLI::IsMember({"containment", "distinct", "weight"}));
    sample_cmd->add_option("--p", s_p, "Prime (containment mode)");
    sample_cmd->add_option("--n", n_opt, "Ambient dimension");
    sample_cmd->add_option("--d", d_opt, "Subspace dimension");
    sample_cmd->add_option("--s", s_opt, "Number of fixed independent vectors (containment mode)");
    sample_cmd->add_option("--trials", trials, "Monte-Carlo trials; 0 enumerates every subspace");
    sample_cmd->add_option("--system", system_path, "System file (distinct and weight modes)");
    sample_cmd->add_option("--points", points_path, "Point-set file for A");
    sample_cmd->add_flag("--exclude-zero", exclude_zero, "Remove 0 from A = F_p^n");
    sample_cmd->add_option("--ell", ell_opt, "Distinct-vector target (distinct mode, default k)");
    sample_cmd->add_option("--w", w_opt, "Weight (weight mode)");
    sample_cmd->add_option("--cap-enum", cap_enum, "Largest enumeration attempted");
    add_common(sample_cmd, c);

    // extremal
    std::uint64_t cap_points = 81;
    std::uint64_t cap_nodes = 0;
    bool no_symmetry = false;
    std::size_t greedy = 0;
    bool use_greedy = false;
    auto* ext_cmd = app.add_subcommand("extremal", "Largest subset of F_p^n avoiding a solution type");
    ext_cmd->add_option("--system", system_path, "System file")->required();
    ext_cmd->add_option("--n", n_opt, "Ambient dimension")->required();
    ext_cmd->add_option("--mode", mode, "not-all-equal | distinct | span-dim | distinct-count")->required();
    ext_cmd->add_option("--r", r_opt, "Span dimension threshold for span-dim");
    ext_cmd->add_option("--ell", ell_opt, "Distinct-count threshold for distinct-count (default k)");
    ext_cmd->add_flag("--exclude-zero", exclude_zero, "Search inside F_p^n without 0");
    ext_cmd->add_flag("--no-symmetry", no_symmetry, "Do not fix the first point");
    ext_cmd->add_option("--greedy", greedy, "Randomized greedy with this many restarts instead of exact search")
        ->each([&](const std::string&) { use_greedy = true; });
    ext_cmd->add_option("--cap-points", cap_points, "Largest universe searched exactly");
    ext_cmd->add_option("--cap-nodes", cap_nodes, "Node budget (0 = unlimited)");
    add_common(ext_cmd, c);

    // verify
    std::vector<std::size_t> n_list;
    std::string theorem = "tao";
    auto* verify_cmd = app.add_subcommand("verify", "Compare exact extremal sizes with the proved statements");
    verify_cmd->add_option("--system", system_path, "System file")->required();
    verify_cmd->add_option("--n", n_list, "Dimensions, e.g. --n 1,2")->required()->delimiter(',');
    verify_cmd->add_option("--theorem", theorem, "tao | distinct | rank")
        ->check(CLI::IsMember({"tao", "distinct", "rank"}));
    verify_cmd->add_option("--r", r_opt, "Span dimension for the rank statement");
    verify_cmd->add_flag("--exclude-zero", exclude_zero, "Search inside F_p^n without 0");
    verify_cmd->add_option("--cap-points", cap_points, "Largest universe searched exactly");
    verify_cmd->add_option("--cap-nodes", cap_nodes, "Node budget (0 = unlimited)");
    add_common(verify_cmd, c);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (c.format == "csv" && !verify_cmd->parsed() && !ext_cmd->parsed()) {
            throw std::invalid_argument("csv output is available for extremal and verify");
        }

        if (gamma_cmd->parsed()) {
            if (!Field::is_prime(g_p)) {
                throw std::invalid_argument("--p must be prime, got " + std::to_string(g_p));
            }
            const GammaResult g = gamma(g_p, g_m, g_k, g_tol);
            Json j{{"p", g_p}, {"m", g_m}, {"k", g_k}};
            j.update(to_json(g));
            if (g_n && !g.boundary) {
                j["n"] = *g_n;
                j["monomial_count"] = to_json(monomial_count(g_p, g_m, g_k, *g_n));
                j["slice_rank_bound"] = clp_upper_bound(g_p, g_m, g_k, *g_n);
            }
            emit(out, c, j);
            return kOk;
        }

        if (validate_cmd->parsed()) {
            const SystemSpec sys = load_system(system_path);
            const ValidationReport v = validate(sys);
            emit(out, c, to_json(v));
            return v.ok() && v.rank == sys.m() ? kOk : kFailed;
        }

        if (solve_cmd->parsed()) {
            const SystemSpec sys = load_system(system_path);
            const PointSet a = load_points(sys, points_path, n_opt, exclude_zero);
            const SolutionFilter filter = solve_filter(mode, r_opt, ell_opt.value_or(sys.k()));
            std::uint64_t count = 0;
            Json listed = Json::array();
            for_each_solution(sys, a, filter, [&](const SolutionTuple& s) {
                if (count < limit) {
                    listed.push_back(to_json(s));
                }
                ++count;
            });
            emit(out, c, Json{{"mode", mode}, {"set_size", a.size()}, {"count", count}, {"solutions", listed}});
            return kOk;
        }

        if (weight_cmd->parsed()) {
            auto in = open_input(tuple_path);
            const VectorList t = read_vector_list(in);
            Json j;
            j["weight"] = to_json(weight(t.field, t.vectors));
            if (!system_path.empty()) {
                const SystemSpec sys = load_system(system_path);
                j["properties"] = to_json(verify_weight_properties(sys, t.vectors));
                if (sys.rows_sum_zero()) {
                    const PartitionReport pr = partition_structure(sys, t.vectors);
                    j["partition_lemma"] = to_json(pr);
                    emit(out, c, j);
                    return pr.lemma_holds() ? kOk : kFailed;
                }
            } else {
                j["properties"] = to_json(verify_weight_properties(t.field, t.vectors));
            }
            emit(out, c, j);
            return kOk;
        }

        if (slice_cmd->parsed()) {
            auto in = open_input(tensor_path);
            const Tensor t = read_tensor(in);
            std::vector<std::vector<std::size_t>> blocks;
            if (blocks_spec.empty()) {
                blocks.emplace_back();
                for (std::size_t i = 0; i < t.order(); ++i) {
                    blocks.back().push_back(i);
                }
            } else {
                blocks = parse_blocks(blocks_spec);
            }
            const OrderFamily orders =
                increasing ? OrderFamily::increasing(t.side(), t.order()) : corollary_orders(blocks, t.side(), t.order());
            const auto support = t.support();
            if (!is_antichain(support, orders)) {
                emit(out, c, Json{{"support_size", support.size()}, {"antichain", false}});
                return kFailed;
            }
            Json j{{"support_size", support.size()}, {"antichain", true}};
            j.update(to_json(antichain_slice_rank(t, orders, cap_support)));
            emit(out, c, j);
            return kOk;
        }

        if (sample_cmd->parsed()) {
            const std::uint64_t seed = resolve_seed(c);
            Json j{{"seed", seed}, {"mode", sample_mode}};
            if (sample_mode == "containment") {
                if (s_p == 0 || !n_opt) {
                    throw std::invalid_argument("containment mode needs --p and --n");
                }
                const ContainmentVerification v =
                    verify_containment(s_p, *n_opt, d_opt, s_opt, trials, seed, trials == 0, c.threads);
                j.update(to_json(v));
                emit(out, c, j);
                return v.agrees ? kOk : kFailed;
            }
            if (system_path.empty()) {
                throw std::invalid_argument(sample_mode + " mode needs --system");
            }
            const SystemSpec sys = load_system(system_path);
            const PointSet a = load_points(sys, points_path, n_opt, exclude_zero);
            Rng rng(derive_seed(seed, 0));
            const SamplingStepReport rep = sample_mode == "distinct"
                                               ? sampling_step_distinct(sys, a, ell_opt.value_or(sys.k()), d_opt, rng, cap_enum)
                                               : sampling_step_weight(sys, a, w_opt, d_opt, rng, cap_enum);
            j.update(to_json(rep));
            emit(out, c, j);
            return rep.certificate_ok() && rep.count_invariant() ? kOk : kFailed;
        }

        if (ext_cmd->parsed()) {
            const SystemSpec sys = load_system(system_path);
            const AvoidMode m = *mode_or_throw(mode);
            const std::size_t param = m == AvoidMode::SpanDimAtLeast ? r_opt : ell_opt.value_or(sys.k());
            const AvoidanceProblem problem{sys, m, param, *n_opt, exclude_zero};
            SearchOptions opt;
            opt.point_cap = cap_points;
            opt.node_budget = cap_nodes;
            opt.symmetry = !no_symmetry;
            opt.threads = c.threads;
            Json j{{"mode", to_string(m)}, {"n", *n_opt}};
            SearchResult res = [&] {
                if (use_greedy) {
                    const std::uint64_t seed = resolve_seed(c);
                    j["seed"] = seed;
                    Rng rng(derive_seed(seed, 0));
                    return greedy_lower_bound(problem, greedy, rng);
                }
                return exhaustive_max(problem, opt);
            }();
            if (c.format == "csv") {
                out << "n,best_size,optimal\n" << *n_opt << ',' << res.best_size << ',' << res.optimal << '\n';
                return res.witness_verified ? kOk : kFailed;
            }
            j.update(to_json(res, !c.no_timestamp));
            emit(out, c, j);
            return res.witness_verified ? kOk : kFailed;
        }

        if (verify_cmd->parsed()) {
            const SystemSpec sys = load_system(system_path);
            const TheoremKind kind = *parse_theorem(theorem);
            const AvoidMode m = kind == TheoremKind::Tao        ? AvoidMode::NotAllEqual
                                : kind == TheoremKind::Distinct ? AvoidMode::Distinct
                                                                : AvoidMode::SpanDimAtLeast;
            SearchOptions opt;
            opt.point_cap = cap_points;
            opt.node_budget = cap_nodes;
            opt.threads = c.threads;
            Json rows = Json::array();
            bool all_hold = true;
            std::ostringstream csv;
            csv << "n,best_size,bound,margin\n";
            for (std::size_t n : n_list) {
                const AvoidanceProblem problem{sys, m, r_opt, n, exclude_zero};
                const TheoremBoundReport rep = verify_theorem_bound(problem, kind, opt);
                all_hold = all_hold && rep.bound_holds && rep.witness_verified;
                rows.push_back(to_json(rep));
                csv << n << ',' << rep.best_size << ',';
                if (rep.bound) {
                    csv << std::fixed << std::setprecision(4) << *rep.bound << ',' << *rep.margin()
                        << std::defaultfloat;
                } else {
                    csv << ',';
                }
                csv << '\n';
            }
            if (c.format == "csv") {
                out << csv.str();
            } else {
                emit(out, c, Json{{"theorem", theorem}, {"results", rows}, {"all_hold", all_hold}});
            }
            return all_hold ? kOk : kFailed;
        }
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violated: " << e.what() << '\n';
        return kFailed;
    } catch (const DegenerateSystem& e) {
        err << "degenerate system: " << e.what() << '\n';
        return kFailed;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace fpsys::cli
