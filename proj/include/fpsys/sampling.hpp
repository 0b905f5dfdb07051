#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "fpsys/combinatorics.hpp"
#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/linear_system.hpp"
#include "fpsys/rng.hpp"
#include "fpsys/slice_rank.hpp"
#include "fpsys/subspace.hpp"
#include "fpsys/weight.hpp"

namespace fpsys {

using Rational = boost::multiprecision::cpp_rational;

struct ContainmentProbability {
    Rational exact;  // prod_{i<s} (p^d - p^i) / (p^n - p^i)
    Rational upper;  // (p^d / p^n)^s
};

/// Probability that a uniform d-dimensional subspace of F_p^n contains s
/// fixed linearly independent vectors.
inline ContainmentProbability containment_probability(std::uint64_t p, std::size_t n, std::size_t d, std::size_t s) {
    if (d > n) {
        throw std::invalid_argument("subspace dimension exceeds ambient dimension");
    }
    if (s < 1) {
        throw std::invalid_argument("containment probability needs s >= 1");
    }
    if (s > n) {
        throw std::invalid_argument("no " + std::to_string(s) + " independent vectors exist in F_p^" +
                                    std::to_string(n));
    }
    const BigInt bp = p;
    auto pw = [&](std::size_t e) { return boost::multiprecision::pow(bp, static_cast<unsigned>(e)); };
    ContainmentProbability r;
    r.exact = 1;
    for (std::size_t i = 0; i < s; ++i) {
        if (i >= d) {
            r.exact = 0;
            break;
        }
        r.exact *= Rational(pw(d) - pw(i), pw(n) - pw(i));
    }
    r.upper = Rational(pw(d * s), pw(n * s));
    return r;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

struct ContainmentVerification {
    ContainmentProbability probability;
    bool exhaustive = false;
    std::uint64_t trials = 0;  // subspaces examined (all of them when exhaustive)
    std::uint64_t hits = 0;
    double frequency = 0.0;
    double sigma = 0.0;  // sqrt(exact (1 - exact) / trials)
    bool agrees = false;  // exact match when exhaustive, within 3 sigma otherwise
};

inline constexpr std::uint64_t kMonteCarloBlock = 1024;

/// Checks containment_probability for the tuple (e_1..e_s). Exhaustive mode
/// counts all d-dimensional subspaces; Monte-Carlo mode samples `trials`
/// subspaces in blocks of 1024, block b drawing from derive_seed(seed, b), so
/// the result does not depend on `threads`.
inline ContainmentVerification verify_containment(std::uint64_t p, std::size_t n, std::size_t d, std::size_t s,
                                                  std::uint64_t trials, std::uint64_t seed, bool exhaustive,
                                                  unsigned threads = 1,
                                                  std::uint64_t subspace_cap = kDefaultSubspaceCap) {
    ContainmentVerification v;
    v.probability = containment_probability(p, n, d, s);
    const Field f(p);
    std::vector<FpVector> fixed;
    for (std::size_t i = 0; i < s; ++i) {
        fixed.push_back(FpVector::unit(n, i));
    }
    auto contains_all = [&](const Subspace& sub) {
        return std::all_of(fixed.begin(), fixed.end(), [&](const FpVector& x) { return sub.contains(x); });
    };
    v.exhaustive = exhaustive;
    if (exhaustive) {
        for_each_subspace(
            f, n, d,
            [&](const Subspace& sub) {
                ++v.trials;
                v.hits += contains_all(sub) ? 1 : 0;
            },
            subspace_cap);
        v.frequency = static_cast<double>(v.hits) / static_cast<double>(v.trials);
        v.agrees = Rational(v.hits, v.trials) == v.probability.exact;
        return v;
    }
    if (trials == 0) {
        throw std::invalid_argument("Monte-Carlo mode needs trials >= 1");
    }
    const std::uint64_t blocks = (trials + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<std::uint64_t> block_hits(blocks, 0);
    auto run_block = [&](std::uint64_t b) {
        Rng rng(derive_seed(seed, b));
        const std::uint64_t count = std::min(kMonteCarloBlock, trials - b * kMonteCarloBlock);
        std::uint64_t h = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
            h += contains_all(random_subspace(f, n, d, rng)) ? 1 : 0;
        }
        block_hits[b] = h;
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) {
            run_block(b);
        }
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t b = w; b < blocks; b += workers) {
                    run_block(b);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    v.trials = trials;
    for (auto h : block_hits) {
        v.hits += h;
    }
    v.frequency = static_cast<double>(v.hits) / static_cast<double>(trials);
    const double e = to_double(v.probability.exact);
    v.sigma = std::sqrt(e * (1 - e) / static_cast<double>(trials));
    if (v.probability.exact == 0 || v.probability.exact == 1) {
        v.agrees = v.frequency == e;
    } else {
        v.agrees = std::abs(v.frequency - e) <= 3 * v.sigma;
    }
    return v;
}

/// E|A cap V| for a uniform d-dimensional V: each nonzero point lies in V
/// with probability (p^d - 1)/(p^n - 1); the zero vector always does.
inline Rational expected_intersection_size(const PointSet& a, std::size_t d) {
    const std::size_t n = a.n();
    const std::uint64_t p = a.field().p();
    std::size_t nonzero = 0;
    bool has_zero = false;
    for (const auto& x : a.points()) {
        if (x.is_zero()) {
            has_zero = true;
        } else {
            ++nonzero;
        }
    }
    Rational e = 0;
    if (n > 0 && nonzero > 0) {
        e = Rational(BigInt(nonzero)) * containment_probability(p, n, d, 1).exact;
    }
    return e + (has_zero ? 1 : 0);
}

/// floor((1 - c) n / m): the sampling dimension in the distinct-entries step.
inline std::int64_t proof_dimension_distinct(double c, std::size_t n, std::size_t m) {
    return static_cast<std::int64_t>(std::floor((1 - c) * static_cast<double>(n) / static_cast<double>(m)));
}

/// The unique d with
///   (p/G)^{n/(k-1)} / ((2k)^{2k+1} p^{2k+1}) < p^d <= (p/G)^{n/(k-1)} / ((2k)^{2k+1} p^{2k}),
/// computed in base-p logarithms. May be below 1 when n is small.
inline std::int64_t proof_dimension_weight(std::uint64_t p, double gamma_value, std::size_t n, std::size_t k) {
    const double lp = std::log(static_cast<double>(p));
    const double top = static_cast<double>(n) / static_cast<double>(k - 1) *
                           (std::log(static_cast<double>(p) / gamma_value) / lp) -
                       static_cast<double>(2 * k + 1) * std::log(2.0 * static_cast<double>(k)) / lp -
                       static_cast<double>(2 * k);
    return static_cast<std::int64_t>(std::floor(top));
}

struct SamplingStepReport {
    std::size_t d = 0;
    Subspace v;
    std::size_t kept = 0;             // |A cap V|
    std::size_t offending = 0;        // Z
    std::size_t vectors_deleted = 0;
    std::size_t surviving = 0;        // |A*|
    std::int64_t target = 0;          // kept - Z
    std::vector<FpVector> deleted;    // in deletion order
    PointSet a_star;
    std::size_t certificate_offending = 0;  // offending structures found by re-scanning A*

    [[nodiscard]] bool certificate_ok() const noexcept { return certificate_offending == 0; }
    [[nodiscard]] bool count_invariant() const noexcept {
        return surviving + vectors_deleted == kept && static_cast<std::int64_t>(surviving) >= target;
    }
};

inline constexpr std::uint64_t kDefaultSamplingCap = 2'000'000;

namespace detail {

/// Deletes one member of each offending structure, skipping structures that
/// already lost a member. The member removed is the lexicographically
/// smallest entry.
class Deleter {
public:
    explicit Deleter(std::size_t n) : n_(n) {}

    void hit(std::span<const FpVector> structure) {
        ++offending_;
        for (const auto& x : structure) {
            if (gone_.count(x) != 0) {
                return;
            }
        }
        const FpVector& smallest = *std::min_element(structure.begin(), structure.end());
        gone_.insert(smallest);
        order_.push_back(smallest);
    }

    [[nodiscard]] std::size_t offending() const noexcept { return offending_; }
    [[nodiscard]] const std::vector<FpVector>& order() const noexcept { return order_; }

    [[nodiscard]] PointSet survivors(const PointSet& kept) const {
        PointSet out(kept.field(), n_);
        for (const auto& x : kept.points()) {
            if (gone_.count(x) == 0) {
                out.insert(x);
            }
        }
        return out;
    }

private:
    std::size_t n_;
    std::size_t offending_ = 0;
    std::unordered_set<FpVector, FpVectorHash> gone_;
    std::vector<FpVector> order_;
};

inline void check_step_dimension(std::size_t d, std::size_t n) {
    if (d < 1 || d > n) {
        throw std::invalid_argument("sampling dimension must satisfy 1 <= d <= n");
    }
}

/// Interesting I-tuples of A with entries in `domain`, over all |I| = m+1 in
/// lexicographic order.
template <class Visit>
void for_each_interesting_structure(const SystemSpec& sys, const PointSet& a, const PointSet& domain,
                                    std::size_t ell, Visit&& visit) {
    for_each_combination(sys.k(), sys.m() + 1, [&](std::span<const std::size_t> idx) {
        for_each_interesting_tuple(sys, a, idx, domain.points(), ell, visit);
    });
}

inline void check_interesting_cap(const SystemSpec& sys, std::size_t domain_size, std::uint64_t cap) {
    long double work = 1;
    for (std::size_t q = 0; q <= sys.m(); ++q) {
        work *= static_cast<long double>(domain_size);
    }
    for (std::size_t q = 0; q <= sys.m(); ++q) {
        work = work * static_cast<long double>(sys.k() - q) / static_cast<long double>(q + 1);
    }
    if (work > static_cast<long double>(cap)) {
        throw CapExceeded("interesting-tuple scan exceeds cap of " + std::to_string(cap) + " candidate tuples");
    }
}

inline void check_solution_cap(const SystemSpec& sys, std::size_t domain_size, std::uint64_t cap) {
    long double work = 1;
    for (std::size_t q = 0; q + sys.m() < sys.k(); ++q) {
        work *= static_cast<long double>(domain_size);
    }
    if (work > static_cast<long double>(cap)) {
        throw CapExceeded("solution enumeration exceeds cap of " + std::to_string(cap) + " free assignments");
    }
}

}  // namespace detail

/// One deletion step: sample V, keep A cap V, and delete one vector from each
/// I-interesting I-tuple (|I| = m+1) lying in V. No I-interesting tuple of A
/// survives inside A*.
inline SamplingStepReport sampling_step_distinct(const SystemSpec& sys, const PointSet& a, std::size_t ell,
                                                 std::size_t d, Rng& rng,
                                                 std::uint64_t cap = kDefaultSamplingCap) {
    if (!sys.generic_minors()) {
        throw HypothesisViolation("interesting-tuple sampling needs every m x m minor nonsingular");
    }
    const std::size_t n = require_common_dim(sys, a);
    detail::check_step_dimension(d, n);
    Subspace v = random_subspace(a.field(), n, d, rng);
    PointSet kept = a.intersect(v);
    detail::check_interesting_cap(sys, kept.size(), cap);

    detail::Deleter del(n);
    detail::for_each_interesting_structure(sys, a, kept, ell,
                                           [&](const std::vector<FpVector>& it) { del.hit(it); });
    PointSet a_star = del.survivors(kept);
    std::size_t residue = 0;
    detail::for_each_interesting_structure(sys, a, a_star, ell, [&](const std::vector<FpVector>&) { ++residue; });

    return SamplingStepReport{d,
                              std::move(v),
                              kept.size(),
                              del.offending(),
                              del.order().size(),
                              a_star.size(),
                              static_cast<std::int64_t>(kept.size()) - static_cast<std::int64_t>(del.offending()),
                              del.order(),
                              std::move(a_star),
                              residue};
}

inline void require_zero_free(const PointSet& a) {
    for (const auto& x : a.points()) {
        if (x.is_zero()) {
            throw std::invalid_argument("weights are defined for nonzero vectors; remove 0 from A");
        }
    }
}

/// One deletion step of the weight argument: sample V and delete one vector
/// from each solution in (A cap V)^k of weight w.
inline SamplingStepReport sampling_step_weight(const SystemSpec& sys, const PointSet& a, std::size_t w,
                                               std::size_t d, Rng& rng, std::uint64_t cap = kDefaultSamplingCap) {
    if (!sys.homogeneous()) {
        throw HypothesisViolation("weight sampling is defined for homogeneous systems");
    }
    require_zero_free(a);
    const std::size_t n = require_common_dim(sys, a);
    detail::check_step_dimension(d, n);
    Subspace v = random_subspace(a.field(), n, d, rng);
    PointSet kept = a.intersect(v);
    detail::check_solution_cap(sys, kept.size(), cap);
    const Field& f = sys.field();

    detail::Deleter del(n);
    for_each_solution(sys, kept, SolutionFilter::any(), [&](const SolutionTuple& s) {
        if (weight(f, s.entries, 0).omega == w) {
            del.hit(s.entries);
        }
    });
    PointSet a_star = del.survivors(kept);
    std::size_t residue = 0;
    for_each_solution(sys, a_star, SolutionFilter::any(), [&](const SolutionTuple& s) {
        if (weight(f, s.entries, 0).omega == w) {
            ++residue;
        }
    });

    return SamplingStepReport{d,
                              std::move(v),
                              kept.size(),
                              del.offending(),
                              del.order().size(),
                              a_star.size(),
                              static_cast<std::int64_t>(kept.size()) - static_cast<std::int64_t>(del.offending()),
                              del.order(),
                              std::move(a_star),
                              residue};
}

/// Gamma_{p,m,k - floor(w/(k+1))}, the constant used when counting weight-w solutions.
inline double weight_gamma(const SystemSpec& sys, std::size_t w) {
    const std::size_t reduced = sys.k() - std::min(sys.k(), w / (sys.k() + 1));
    return gamma(sys.field().p(), sys.m(), std::max<std::size_t>(reduced, 1)).gamma;
}

struct WeightCountReport {
    std::size_t w = 0;
    std::size_t r = 0;
    std::uint64_t count = 0;       // solutions with omega = w and span dimension r
    std::uint64_t weight_w = 0;    // solutions with omega = w, any dimension
    double gamma = 0.0;
    double bound = 0.0;            // (2k)^{2k} p^{rk} Gamma^n |A|^{r-1}
    bool bound_holds = true;
    bool dimension_claim = true;   // floor(w/(k+1)) + 1 <= dim span <= k on every weight-w solution
    bool chosen_size_claim = true; // |I(x)| = floor(w/(k+1)) on every weight-w solution
};

inline WeightCountReport count_weight_solutions(const SystemSpec& sys, const PointSet& a, std::size_t w,
                                                std::size_t r, std::uint64_t cap = kDefaultSamplingCap) {
    const std::size_t k = sys.k();
    const std::size_t base = w / (k + 1);
    if (r < base + 1 || r > k) {
        throw std::invalid_argument("span dimension r must satisfy floor(w/(k+1)) + 1 <= r <= k");
    }
    if (!sys.homogeneous()) {
        throw HypothesisViolation("weight counting is defined for homogeneous systems");
    }
    require_zero_free(a);
    const std::size_t n = require_common_dim(sys, a);
    detail::check_solution_cap(sys, a.size(), cap);
    const Field& f = sys.field();

    WeightCountReport rep;
    rep.w = w;
    rep.r = r;
    for_each_solution(sys, a, SolutionFilter::any(), [&](const SolutionTuple& s) {
        const WeightReport wr = weight(f, s.entries, 0);
        if (wr.omega != w) {
            return;
        }
        ++rep.weight_w;
        if (s.span_dim < base + 1 || s.span_dim > k) {
            rep.dimension_claim = false;
        }
        if (wr.chosen.size() != base) {
            rep.chosen_size_claim = false;
        }
        if (s.span_dim == r) {
            ++rep.count;
        }
    });
    rep.gamma = weight_gamma(sys, w);
    const double kk = static_cast<double>(k);
    rep.bound = std::pow(2 * kk, 2 * kk) * std::pow(static_cast<double>(f.p()), static_cast<double>(r * k)) *
                std::pow(rep.gamma, static_cast<double>(n)) *
                std::pow(static_cast<double>(a.size()), static_cast<double>(r - 1));
    rep.bound_holds = static_cast<double>(rep.count) <= rep.bound;
    return rep;
}

struct DisjointFamilyReport {
    std::vector<std::vector<FpVector>> family;
    double gamma = 0.0;
    double bound = 0.0;  // k^{k+1} Gamma^n
    bool bound_holds = true;
    std::size_t qualifying = 0;  // solutions meeting every condition except disjointness
    bool maximal = true;         // every qualifying solution shares a line with the family

    [[nodiscard]] std::size_t size() const noexcept { return family.size(); }
};

/// Greedy maximal list of solutions with omega = w, chosen set I, entries on I
/// equal to `fixed`, whose quotient-line sets modulo span(fixed) are pairwise
/// disjoint.
inline DisjointFamilyReport max_disjoint_span_family(const SystemSpec& sys, const PointSet& a,
                                                     std::span<const std::size_t> indices,
                                                     std::span<const FpVector> fixed, std::size_t w,
                                                     std::uint64_t cap = kDefaultSamplingCap) {
    const std::size_t k = sys.k();
    if (!sys.homogeneous()) {
        throw HypothesisViolation("weight families are defined for homogeneous systems");
    }
    if (indices.size() != w / (k + 1)) {
        throw std::invalid_argument("|I| must equal floor(w/(k+1))");
    }
    if (fixed.size() != indices.size()) {
        throw DimensionMismatch("fixed tuple length differs from |I|");
    }
    if (!std::is_sorted(indices.begin(), indices.end()) ||
        std::adjacent_find(indices.begin(), indices.end()) != indices.end() ||
        (!indices.empty() && indices.back() >= k)) {
        throw std::invalid_argument("I must be a sorted set of distinct indices below k");
    }
    require_zero_free(a);
    const std::size_t n = require_common_dim(sys, a);
    for (const auto& x : fixed) {
        if (!a.contains(x)) {
            throw std::invalid_argument("fixed entry not in A: " + x.to_string());
        }
    }
    std::size_t open_count = k - indices.size();
    long double work = 1;
    for (std::size_t q = 0; q + sys.m() < open_count; ++q) {
        work *= static_cast<long double>(a.size());
    }
    if (work > static_cast<long double>(cap)) {
        throw CapExceeded("family enumeration exceeds cap of " + std::to_string(cap) + " free assignments");
    }

    const Field& f = sys.field();
    const Subspace u = Subspace::span(f, fixed, n);
    const auto open = complement(indices, k);
    const std::vector<std::size_t> want(indices.begin(), indices.end());

    std::vector<std::vector<FpVector>> qualifying;
    std::vector<FpVector> tuple(k, FpVector(n));
    for (std::size_t q = 0; q < indices.size(); ++q) {
        tuple[indices[q]] = fixed[q];
    }
    CompletionPlan plan(sys, open);
    plan.for_each(
        tuple, a.points(), [&](const FpVector& x) { return a.contains(x); },
        [&](const std::vector<FpVector>& t) {
            const WeightReport wr = weight(f, t, 0);
            if (wr.omega == w && wr.chosen == want) {
                qualifying.push_back(t);
            }
        });

    auto lines_of = [&](const std::vector<FpVector>& t) {
        std::vector<QuotientLine> lines;
        for (std::size_t j : open) {
            lines.push_back(quotient_line(t[j], u));
        }
        std::sort(lines.begin(), lines.end());
        lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
        return lines;
    };

    DisjointFamilyReport rep;
    rep.qualifying = qualifying.size();
    std::vector<QuotientLine> used;  // kept sorted
    auto meets_used = [&](const std::vector<QuotientLine>& lines) {
        return std::any_of(lines.begin(), lines.end(),
                           [&](const QuotientLine& l) { return std::binary_search(used.begin(), used.end(), l); });
    };
    for (const auto& t : qualifying) {
        auto lines = lines_of(t);
        if (meets_used(lines)) {
            continue;
        }
        rep.family.push_back(t);
        used.insert(used.end(), lines.begin(), lines.end());
        std::sort(used.begin(), used.end());
    }
    for (const auto& t : qualifying) {
        if (!meets_used(lines_of(t))) {
            rep.maximal = false;
        }
    }
    rep.gamma = weight_gamma(sys, w);
    rep.bound = std::pow(static_cast<double>(k), static_cast<double>(k + 1)) *
                std::pow(rep.gamma, static_cast<double>(n));
    rep.bound_holds = static_cast<double>(rep.size()) <= rep.bound;
    return rep;
}

}  // namespace fpsys
