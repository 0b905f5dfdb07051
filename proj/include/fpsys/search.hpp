#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/linear_system.hpp"
#include "fpsys/rng.hpp"
#include "fpsys/slice_rank.hpp"
#include "fpsys/vector.hpp"

namespace fpsys {

enum class AvoidMode { NotAllEqual, Distinct, SpanDimAtLeast, DistinctCountAtLeast };

inline std::string to_string(AvoidMode m) {
    switch (m) {
        case AvoidMode::NotAllEqual:
            return "not-all-equal";
        case AvoidMode::Distinct:
            return "distinct";
        case AvoidMode::SpanDimAtLeast:
            return "span-dim";
        case AvoidMode::DistinctCountAtLeast:
            return "distinct-count";
    }
    return "?";
}

inline std::optional<AvoidMode> parse_avoid_mode(const std::string& s) {
    if (s == "not-all-equal") {
        return AvoidMode::NotAllEqual;
    }
    if (s == "distinct") {
        return AvoidMode::Distinct;
    }
    if (s == "span-dim" || s == "rank") {
        return AvoidMode::SpanDimAtLeast;
    }
    if (s == "distinct-count") {
        return AvoidMode::DistinctCountAtLeast;
    }
    return std::nullopt;
}

/// Find a large A in F_p^n (optionally without 0) with no solution of the
/// forbidden type in A^k.
struct AvoidanceProblem {
    SystemSpec sys;
    AvoidMode mode = AvoidMode::NotAllEqual;
    std::size_t param = 0;  // r for span-dim, ell for distinct-count
    std::size_t n = 0;
    bool exclude_zero = false;

    [[nodiscard]] SolutionFilter filter() const {
        switch (mode) {
            case AvoidMode::NotAllEqual:
                return SolutionFilter::not_all_equal();
            case AvoidMode::Distinct:
                return SolutionFilter::distinct();
            case AvoidMode::SpanDimAtLeast:
                return SolutionFilter::span_dim_at_least(param);
            case AvoidMode::DistinctCountAtLeast:
                return SolutionFilter::distinct_count_at_least(param);
        }
        return SolutionFilter::any();
    }

    void validate() const {
        const std::size_t k = sys.k();
        if ((mode == AvoidMode::SpanDimAtLeast || mode == AvoidMode::DistinctCountAtLeast) &&
            (param < 2 || param > k)) {
            throw std::invalid_argument("mode parameter must satisfy 2 <= param <= k");
        }
        if (sys.constants() && sys.constants()->front().size() != n) {
            throw DimensionMismatch("constant terms do not live in F_p^n");
        }
        require_full_rank(sys);
    }

    [[nodiscard]] PointSet universe() const { return PointSet::full_space(sys.field(), n, exclude_zero); }
};

struct SearchOptions {
    std::uint64_t point_cap = 81;
    std::uint64_t node_budget = 0;  // 0 = unlimited
    bool symmetry = true;
    unsigned threads = 1;
    std::vector<std::size_t> point_order;  // permutation of the universe; empty = code order
};

struct SearchResult {
    std::size_t best_size = 0;
    PointSet witness;
    bool optimal = false;
    std::uint64_t nodes = 0;
    double elapsed_ms = 0.0;
    bool witness_verified = false;
};

/// Independent check: enumerates every solution in witness^k.
inline bool avoids(const AvoidanceProblem& problem, const PointSet& a) {
    return !find_solution(problem.sys, a, problem.filter()).has_value();
}

namespace detail {

/// Adding x to an avoiding set S is safe iff no forbidden solution of
/// (S u {x})^k uses x. Each such solution has x at some position i; the other
/// positions are completed over S u {x} by the pivot solve.
class ExtensionChecker {
public:
    ExtensionChecker(const AvoidanceProblem& problem, std::size_t n)
        : problem_(&problem), filter_(problem.filter()), n_(n) {
        const std::size_t k = problem.sys.k();
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<std::size_t> open;
            for (std::size_t j = 0; j < k; ++j) {
                if (j != i) {
                    open.push_back(j);
                }
            }
            plans_.emplace_back(problem.sys, std::move(open));
        }
        member_.assign(space_size(problem.sys.field(), n), 0);
    }

    [[nodiscard]] bool can_add(const std::vector<FpVector>& s, const FpVector& x) {
        const Field& f = problem_->sys.field();
        const std::size_t k = problem_->sys.k();
        candidates_ = s;
        candidates_.push_back(x);
        for (const auto& y : candidates_) {
            member_[encode(f, y)] = 1;
        }
        bool ok = true;
        std::vector<FpVector> tuple(k, FpVector(n_));
        for (std::size_t i = 0; i < k && ok; ++i) {
            tuple[i] = x;
            plans_[i].for_each(
                tuple, candidates_, [&](const FpVector& y) { return member_[encode(f, y)] != 0; },
                [&](const std::vector<FpVector>& t) {
                    const std::size_t dc = distinct_count(t);
                    const std::size_t sd = filter_.needs_span() ? rank_of(f, t) : 0;
                    if (filter_.accepts(dc, sd, k)) {
                        ok = false;
                        return false;
                    }
                    return true;
                });
        }
        for (const auto& y : candidates_) {
            member_[encode(f, y)] = 0;
        }
        return ok;
    }

private:
    const AvoidanceProblem* problem_;
    SolutionFilter filter_;
    std::size_t n_;
    std::vector<CompletionPlan> plans_;
    std::vector<char> member_;
    std::vector<FpVector> candidates_;
};

struct SharedBest {
    std::atomic<std::size_t> size{0};
    std::atomic<std::uint64_t> nodes{0};
    std::atomic<bool> budget_hit{false};
};

/// DFS over points[from..] extending `chosen`; records the first strictly
/// larger set it meets.
class SubtreeSearch {
public:
    SubtreeSearch(const AvoidanceProblem& problem, const std::vector<FpVector>& points, SharedBest& shared,
                  std::uint64_t budget)
        : checker_(problem, problem.n), points_(&points), shared_(&shared), budget_(budget) {}

    void run(std::vector<FpVector> chosen, std::size_t from, const std::vector<bool>& skip) {
        chosen_ = std::move(chosen);
        skip_ = &skip;
        record();
        dfs(from);
    }

    [[nodiscard]] std::size_t best() const noexcept { return best_; }
    [[nodiscard]] const std::vector<FpVector>& witness() const noexcept { return witness_; }

private:
    void record() {
        if (!found_ || chosen_.size() > best_) {
            found_ = true;
            best_ = chosen_.size();
            witness_ = chosen_;
            std::size_t cur = shared_->size.load();
            while (best_ > cur && !shared_->size.compare_exchange_weak(cur, best_)) {
            }
        }
    }

    [[nodiscard]] bool pruned(std::size_t remaining) const {
        const std::size_t reach = chosen_.size() + remaining;
        return reach <= best_ || reach < shared_->size.load(std::memory_order_relaxed);
    }

    void dfs(std::size_t from) {
        const auto& pts = *points_;
        std::size_t remaining = 0;
        for (std::size_t i = from; i < pts.size(); ++i) {
            remaining += (*skip_)[i] ? 0 : 1;
        }
        for (std::size_t i = from; i < pts.size(); ++i) {
            if ((*skip_)[i]) {
                continue;
            }
            if (pruned(remaining)) {
                return;
            }
            --remaining;
            const std::uint64_t used = shared_->nodes.fetch_add(1, std::memory_order_relaxed) + 1;
            if (budget_ != 0 && used > budget_) {
                shared_->budget_hit = true;
                return;
            }
            if (!checker_.can_add(chosen_, pts[i])) {
                continue;
            }
            chosen_.push_back(pts[i]);
            record();
            dfs(i + 1);
            chosen_.pop_back();
            if (shared_->budget_hit) {
                return;
            }
        }
    }

    ExtensionChecker checker_;
    const std::vector<FpVector>* points_;
    SharedBest* shared_;
    std::uint64_t budget_;
    const std::vector<bool>* skip_ = nullptr;
    std::vector<FpVector> chosen_;
    std::size_t best_ = 0;
    bool found_ = false;
    std::vector<FpVector> witness_;
};

inline std::vector<FpVector> ordered_points(const AvoidanceProblem& problem, const SearchOptions& opt) {
    const PointSet u = problem.universe();
    if (opt.point_order.empty()) {
        return u.points();
    }
    if (opt.point_order.size() != u.size()) {
        throw std::invalid_argument("point order must be a permutation of the universe");
    }
    std::vector<bool> seen(u.size(), false);
    std::vector<FpVector> out;
    for (std::size_t i : opt.point_order) {
        if (i >= u.size() || seen[i]) {
            throw std::invalid_argument("point order must be a permutation of the universe");
        }
        seen[i] = true;
        out.push_back(u[i]);
    }
    return out;
}

}  // namespace detail

/// Exact maximum size of an avoiding set by depth-first search with
/// incremental checking and size-bound pruning.
///
/// With symmetry on, the first point is fixed. Homogeneous systems are
/// invariant under GL_n, which is transitive on nonzero vectors, so some
/// optimal set contains the first nonzero point unless every avoiding set is
/// inside {0}. When additionally the rows sum to zero and the forbidden type
/// depends only on equalities among entries, translations act as well and
/// some optimal set contains 0.
inline SearchResult exhaustive_max(const AvoidanceProblem& problem, const SearchOptions& opt = {}) {
    problem.validate();
    const auto start = std::chrono::steady_clock::now();
    const Field& f = problem.sys.field();
    const std::uint64_t universe_size = space_size(f, problem.n) - (problem.exclude_zero ? 1 : 0);
    if (universe_size > opt.point_cap) {
        throw CapExceeded("universe of " + std::to_string(universe_size) + " points exceeds cap " +
                          std::to_string(opt.point_cap));
    }
    const std::vector<FpVector> points = detail::ordered_points(problem, opt);

    // Roots: (initial chosen set, skip mask). The best over roots is the answer.
    struct Root {
        std::vector<FpVector> chosen;
        std::vector<bool> skip;
    };
    std::vector<Root> roots;
    std::vector<bool> none(points.size(), false);
    const bool homogeneous = problem.sys.homogeneous();
    const bool affine = homogeneous && problem.sys.rows_sum_zero() && !problem.exclude_zero &&
                        problem.mode != AvoidMode::SpanDimAtLeast;
    std::optional<FpVector> forced;
    if (opt.symmetry && homogeneous && !points.empty()) {
        if (affine) {
            forced = FpVector(problem.n);
        } else if (problem.n > 0) {
            forced = FpVector::unit(problem.n, problem.n - 1);
        }
    }
    std::vector<FpVector> extra_witness;  // a set inside {0}, when forcing a nonzero point
    std::size_t extra = 0;
    if (forced) {
        detail::ExtensionChecker checker(problem, problem.n);
        if (checker.can_add({}, *forced)) {
            std::vector<bool> skip = none;
            for (std::size_t i = 0; i < points.size(); ++i) {
                skip[i] = points[i] == *forced;
            }
            // Split below the forced point on its first companion.
            roots.push_back({{*forced}, skip});
        }
        if (!affine && !problem.exclude_zero) {
            FpVector zero(problem.n);
            if (checker.can_add({}, zero)) {
                extra = 1;
                extra_witness = {zero};
            }
        }
    } else {
        roots.push_back({{}, none});
    }

    // Expand each root by one level so tasks can run in parallel.
    struct Task {
        std::vector<FpVector> chosen;
        std::size_t from;
        const std::vector<bool>* skip;
    };
    std::vector<Task> tasks;
    for (const auto& r : roots) {
        tasks.push_back({r.chosen, points.size(), &r.skip});  // the root itself
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (r.skip[i]) {
                continue;
            }
            std::vector<FpVector> c = r.chosen;
            c.push_back(points[i]);
            tasks.push_back({std::move(c), i + 1, &r.skip});
        }
    }

    detail::SharedBest shared;
    shared.size = extra;
    std::vector<std::size_t> task_best(tasks.size(), 0);
    std::vector<std::vector<FpVector>> task_witness(tasks.size());
    std::vector<bool> task_valid(tasks.size(), false);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        detail::ExtensionChecker checker(problem, problem.n);
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size() || shared.budget_hit) {
                return;
            }
            const Task& task = tasks[t];
            // The last chosen point must be compatible with the rest.
            if (task.chosen.size() > 0) {
                std::vector<FpVector> prefix(task.chosen.begin(), task.chosen.end() - 1);
                if (!checker.can_add(prefix, task.chosen.back())) {
                    continue;
                }
            }
            detail::SubtreeSearch search(problem, points, shared, opt.node_budget);
            search.run(task.chosen, task.from, *task.skip);
            task_valid[t] = true;
            task_best[t] = search.best();
            task_witness[t] = search.witness();
        }
    };
    const unsigned workers = std::max(1U, opt.threads);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::size_t best = extra;
    std::vector<FpVector> witness = extra_witness;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (task_valid[t] && task_best[t] > best) {
            best = task_best[t];
            witness = task_witness[t];
        }
    }
    SearchResult r{best, PointSet(f, problem.n, witness), !shared.budget_hit, shared.nodes.load(), 0.0, false};
    r.witness_verified = avoids(problem, r.witness);
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// Greedy insertion: one pass in point order, then `restarts` passes over
/// shuffled orders. Keeps the first largest set.
inline SearchResult greedy_lower_bound(const AvoidanceProblem& problem, std::size_t restarts, Rng& rng) {
    problem.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<FpVector> order = problem.universe().points();
    detail::ExtensionChecker checker(problem, problem.n);
    std::vector<FpVector> best;
    std::uint64_t nodes = 0;
    for (std::size_t pass = 0; pass <= restarts; ++pass) {
        if (pass > 0) {
            shuffle_portable(order, rng);
        }
        std::vector<FpVector> s;
        for (const auto& x : order) {
            ++nodes;
            if (checker.can_add(s, x)) {
                s.push_back(x);
            }
        }
        if (pass == 0 || s.size() > best.size()) {
            best = std::move(s);
        }
    }
    SearchResult r{best.size(), PointSet(problem.sys.field(), problem.n, best), false, nodes, 0.0, false};
    r.witness_verified = avoids(problem, r.witness);
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

enum class TheoremKind { Tao, Distinct, Rank };

inline std::optional<TheoremKind> parse_theorem(const std::string& s) {
    if (s == "tao") {
        return TheoremKind::Tao;
    }
    if (s == "distinct") {
        return TheoremKind::Distinct;
    }
    if (s == "rank") {
        return TheoremKind::Rank;
    }
    return std::nullopt;
}

inline std::string to_string(TheoremKind t) {
    switch (t) {
        case TheoremKind::Tao:
            return "tao";
        case TheoremKind::Distinct:
            return "distinct";
        case TheoremKind::Rank:
            return "rank";
    }
    return "?";
}

struct TheoremBoundReport {
    TheoremKind theorem = TheoremKind::Tao;
    std::size_t n = 0;
    std::size_t universe_size = 0;
    std::size_t best_size = 0;
    bool optimal = false;
    std::optional<double> bound;      // k * Gamma^n, for tao only
    bool bound_holds = true;
    std::optional<SolutionTuple> full_space_solution;  // forbidden solution found in the whole universe
    bool witness_verified = false;
    std::string note;

    /// best_size minus the bound (negative means slack below the bound).
    [[nodiscard]] std::optional<double> margin() const {
        if (!bound) {
            return std::nullopt;
        }
        return static_cast<double>(best_size) - *bound;
    }
};

/// Runs exhaustive_max under the theorem's hypotheses and compares with the
/// bound available at this scale.
inline TheoremBoundReport verify_theorem_bound(const AvoidanceProblem& problem, TheoremKind theorem,
                                               const SearchOptions& opt = {}) {
    const SystemSpec& sys = problem.sys;
    const std::size_t m = sys.m();
    const std::size_t k = sys.k();
    if (!sys.homogeneous() || !sys.rows_sum_zero()) {
        throw HypothesisViolation("theorem needs a homogeneous system with rows summing to zero");
    }
    switch (theorem) {
        case TheoremKind::Tao:
            if (k < 2 * m + 1) {
                throw HypothesisViolation("needs k >= 2m + 1");
            }
            if (problem.mode != AvoidMode::NotAllEqual) {
                throw std::invalid_argument("tao bound concerns mode not-all-equal");
            }
            break;
        case TheoremKind::Distinct:
            if (k < 3 * m) {
                throw HypothesisViolation("needs k >= 3m");
            }
            if (!sys.generic_minors()) {
                throw HypothesisViolation("needs every m x m minor nonsingular");
            }
            if (problem.mode != AvoidMode::Distinct) {
                throw std::invalid_argument("distinct theorem concerns mode distinct");
            }
            break;
        case TheoremKind::Rank:
            if (problem.mode != AvoidMode::SpanDimAtLeast || problem.param < 2) {
                throw std::invalid_argument("rank theorem concerns mode span-dim with r >= 2");
            }
            if (k + 1 < 2 * m + problem.param) {
                throw HypothesisViolation("needs k >= 2m + r - 1");
            }
            break;
    }
    TheoremBoundReport rep;
    rep.theorem = theorem;
    rep.n = problem.n;
    const PointSet u = problem.universe();
    rep.universe_size = u.size();
    const SearchResult res = exhaustive_max(problem, opt);
    rep.best_size = res.best_size;
    rep.optimal = res.optimal;
    rep.witness_verified = res.witness_verified;
    rep.full_space_solution = find_solution(sys, u, problem.filter());
    if (theorem == TheoremKind::Tao) {
        rep.bound = clp_upper_bound(sys, problem.n);
        rep.bound_holds = static_cast<double>(rep.best_size) <= *rep.bound;
        rep.note = "bound k*Gamma^n from the slice-rank factoring bound";
    } else {
        rep.bound_holds = rep.full_space_solution.has_value() == (rep.best_size < rep.universe_size);
        rep.note = "constants are non-effective; checked that a forbidden solution exists exactly when the "
                   "universe is not itself avoiding";
    }
    return rep;
}

}  // namespace fpsys
