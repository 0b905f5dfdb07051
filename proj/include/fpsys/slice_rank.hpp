#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/linear_system.hpp"
#include "fpsys/rng.hpp"
#include "fpsys/subspace.hpp"
#include "fpsys/vector.hpp"

namespace fpsys {

struct GammaResult {
    double gamma = 0.0;
    double z_star = 1.0;
    std::size_t iterations = 0;
    double tolerance = 0.0;  // width of the final bracket around z_star
    bool boundary = false;   // k <= 2m: minimum at z = 1, gamma = p
};

namespace detail {

/// phi(z) = sum j z^j / sum z^j. z g'(z) / g(z) = phi(z) - (p-1)m/k.
inline long double gamma_phi(std::uint64_t p, long double z) {
    long double num = 0;
    long double den = 0;
    long double zj = 1;
    for (std::uint64_t j = 0; j < p; ++j) {
        num += static_cast<long double>(j) * zj;
        den += zj;
        zj *= z;
    }
    return num / den;
}

inline long double gamma_g(std::uint64_t p, long double z, long double exponent) {
    long double s = 0;
    long double zj = 1;
    for (std::uint64_t j = 0; j < p; ++j) {
        s += zj;
        zj *= z;
    }
    return s / std::pow(z, exponent);
}

}  // namespace detail

/// g(z) = (1 + z + ... + z^{p-1}) / z^{(p-1)m/k} on (0, 1].
inline double gamma_objective(std::uint64_t p, std::size_t m, std::size_t k, double z) {
    const long double e = static_cast<long double>(p - 1) * static_cast<long double>(m) / static_cast<long double>(k);
    return static_cast<double>(detail::gamma_g(p, z, e));
}

/// Gamma_{p,m,k} = min over z in (0,1] of g(z), by bisection on phi(z) = (p-1)m/k.
inline GammaResult gamma(std::uint64_t p, std::size_t m, std::size_t k, double tol = 1e-12) {
    if (p < 2 || m < 1 || k < 1) {
        throw std::invalid_argument("gamma needs p >= 2, m >= 1, k >= 1");
    }
    if (!(tol > 0)) {
        throw std::invalid_argument("gamma tolerance must be positive");
    }
    GammaResult r;
    if (k <= 2 * m) {
        r.gamma = static_cast<double>(p);
        r.z_star = 1.0;
        r.boundary = true;
        return r;
    }
    const long double target =
        static_cast<long double>(p - 1) * static_cast<long double>(m) / static_cast<long double>(k);
    long double lo = 0;
    long double hi = 1;
    while (hi - lo > tol) {
        const long double mid = (lo + hi) / 2;
        if (detail::gamma_phi(p, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++r.iterations;
    }
    const long double z = (lo + hi) / 2;
    r.z_star = static_cast<double>(z);
    r.tolerance = static_cast<double>(hi - lo);
    r.gamma = static_cast<double>(detail::gamma_g(p, z, target));
    return r;
}

struct MonomialCountResult {
    BigInt count;
    double bound = 1.0;  // Gamma^n
    std::uint64_t threshold = 0;
    bool holds = true;
};

/// Number of (d_1..d_n) in {0..p-1}^n with sum d_i <= mn(p-1)/k, compared
/// with Gamma_{p,m,k}^n.
inline MonomialCountResult monomial_count(std::uint64_t p, std::size_t m, std::size_t k, std::size_t n) {
    if (k < 2 * m + 1) {
        throw HypothesisViolation("monomial count bound needs k >= 2m + 1");
    }
    MonomialCountResult r;
    r.threshold = static_cast<std::uint64_t>(m) * n * (p - 1) / k;
    const std::size_t top = n * static_cast<std::size_t>(p - 1);
    std::vector<BigInt> ways(top + 1, 0);
    ways[0] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<BigInt> next(top + 1, 0);
        const std::size_t reach = c * static_cast<std::size_t>(p - 1);
        for (std::size_t s = 0; s <= reach; ++s) {
            if (ways[s] == 0) {
                continue;
            }
            for (std::size_t d = 0; d < p; ++d) {
                next[s + d] += ways[s];
            }
        }
        ways = std::move(next);
    }
    r.count = 0;
    for (std::size_t s = 0; s <= std::min<std::uint64_t>(r.threshold, top); ++s) {
        r.count += ways[s];
    }
    r.bound = std::pow(gamma(p, m, k).gamma, static_cast<double>(n));
    r.holds = r.count.convert_to<long double>() <= static_cast<long double>(r.bound);
    return r;
}

/// k * Gamma_{p,m,k}^n: the slice-rank upper bound for any indicator tensor
/// of a system with these parameters.
inline double clp_upper_bound(std::uint64_t p, std::size_t m, std::size_t k, std::size_t n) {
    if (k < 2 * m + 1) {
        throw HypothesisViolation("slice-rank bound needs k >= 2m + 1");
    }
    return static_cast<double>(k) * std::pow(gamma(p, m, k).gamma, static_cast<double>(n));
}

inline double clp_upper_bound(const SystemSpec& sys, std::size_t n) {
    return clp_upper_bound(sys.field().p(), sys.m(), sys.k(), n);
}

using MultiIndex = std::vector<std::size_t>;

inline constexpr std::uint64_t kMaxDenseTensorEntries = 10'000'000;

/// A function [L]^k -> F_p stored densely. Indices are 0-based.
class Tensor {
public:
    Tensor(const Field& f, std::size_t side, std::size_t order) : field_(f), side_(side), order_(order) {
        if (side < 1 || order < 2) {
            throw std::invalid_argument("tensor needs L >= 1 and k >= 2");
        }
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < order; ++i) {
            if (total > kMaxDenseTensorEntries / side) {
                throw CapExceeded("dense tensor larger than " + std::to_string(kMaxDenseTensorEntries) + " entries");
            }
            total *= side;
        }
        values_.assign(total, 0);
    }

    /// Tensor with value 1 on each listed index.
    static Tensor from_support(const Field& f, std::size_t side, std::size_t order, std::span<const MultiIndex> s) {
        Tensor t(f, side, order);
        for (const auto& idx : s) {
            t.set(idx, 1);
        }
        return t;
    }

    [[nodiscard]] const Field& field() const noexcept { return field_; }
    [[nodiscard]] std::size_t side() const noexcept { return side_; }
    [[nodiscard]] std::size_t order() const noexcept { return order_; }
    [[nodiscard]] std::size_t entry_count() const noexcept { return values_.size(); }

    [[nodiscard]] Residue at(std::span<const std::size_t> idx) const { return values_[offset(idx)]; }
    void set(std::span<const std::size_t> idx, Residue v) { values_[offset(idx)] = field_.reduce(v); }

    [[nodiscard]] Residue at_offset(std::size_t o) const { return values_.at(o); }

    [[nodiscard]] MultiIndex index_of(std::size_t o) const {
        MultiIndex idx(order_);
        for (std::size_t i = order_; i-- > 0;) {
            idx[i] = o % side_;
            o /= side_;
        }
        return idx;
    }

    /// Nonzero positions in lexicographic order.
    [[nodiscard]] std::vector<MultiIndex> support() const {
        std::vector<MultiIndex> s;
        for (std::size_t o = 0; o < values_.size(); ++o) {
            if (values_[o] != 0) {
                s.push_back(index_of(o));
            }
        }
        return s;
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.field_ == b.field_ && a.side_ == b.side_ && a.order_ == b.order_ && a.values_ == b.values_;
    }

private:
    std::size_t offset(std::span<const std::size_t> idx) const {
        if (idx.size() != order_) {
            throw DimensionMismatch("multi-index of length " + std::to_string(idx.size()) + " for a tensor of order " +
                                    std::to_string(order_));
        }
        std::size_t o = 0;
        for (std::size_t v : idx) {
            if (v >= side_) {
                throw std::out_of_range("tensor index " + std::to_string(v) + " outside [0, " +
                                        std::to_string(side_) + ")");
            }
            o = o * side_ + v;
        }
        return o;
    }

    Field field_;
    std::size_t side_;
    std::size_t order_;
    std::vector<Residue> values_;
};

/// columns[i][l] is the candidate x_i^{(l)}.
using TensorColumns = std::vector<std::vector<FpVector>>;

inline std::size_t check_columns(const SystemSpec& sys, const TensorColumns& columns) {
    if (columns.size() != sys.k()) {
        throw DimensionMismatch("expected " + std::to_string(sys.k()) + " columns, got " +
                                std::to_string(columns.size()));
    }
    const std::size_t side = columns.front().size();
    if (side < 1) {
        throw std::invalid_argument("columns must be nonempty");
    }
    for (const auto& col : columns) {
        if (col.size() != side) {
            throw DimensionMismatch("columns have different lengths");
        }
        for (const auto& x : col) {
            require_same_dim(x, columns.front().front());
        }
    }
    if (sys.constants()) {
        require_same_dim(columns.front().front(), sys.constants()->front());
    }
    return side;
}

/// f(l_1..l_k) = 1 iff (x_1^{(l_1)}, ..., x_k^{(l_k)}) solves the system.
inline Tensor indicator_tensor(const SystemSpec& sys, const TensorColumns& columns) {
    const std::size_t side = check_columns(sys, columns);
    Tensor t(sys.field(), side, sys.k());
    std::vector<FpVector> tuple(sys.k());
    for (std::size_t o = 0; o < t.entry_count(); ++o) {
        const MultiIndex idx = t.index_of(o);
        for (std::size_t i = 0; i < sys.k(); ++i) {
            tuple[i] = columns[i][idx[i]];
        }
        if (is_solution(sys, tuple)) {
            t.set(idx, 1);
        }
    }
    return t;
}

/// prod over equations j and coordinates s of 1 - (sum_i a_{j,i} x_i(s) - b_j(s))^{p-1}.
inline Residue polynomial_indicator(const SystemSpec& sys, const TensorColumns& columns,
                                    std::span<const std::size_t> idx) {
    const Field& f = sys.field();
    const std::size_t n = columns.front().front().size();
    Residue prod = 1;
    for (std::size_t j = 0; j < sys.m(); ++j) {
        for (std::size_t s = 0; s < n; ++s) {
            Residue lin = 0;
            for (std::size_t i = 0; i < sys.k(); ++i) {
                lin = f.add(lin, f.mul(sys.coeff(j, i), columns[i][idx[i]][s]));
            }
            if (sys.constants()) {
                lin = f.sub(lin, (*sys.constants())[j][s]);
            }
            prod = f.mul(prod, f.sub(1, f.pow(lin, f.p() - 1)));
        }
    }
    return prod;
}

inline constexpr std::uint64_t kExhaustiveIdentityEntries = 100'000;

struct IdentityReport {
    std::size_t evaluated = 0;
    std::size_t mismatches = 0;
    bool exhaustive = false;
    std::optional<MultiIndex> first_mismatch;

    [[nodiscard]] bool ok() const noexcept { return mismatches == 0; }
};

/// Compares the polynomial product with indicator_tensor on `samples` random
/// index tuples, and on every tuple when L^k <= 10^5.
inline IdentityReport verify_polynomial_identity(const SystemSpec& sys, const TensorColumns& columns,
                                                 std::size_t samples, Rng& rng) {
    const Tensor t = indicator_tensor(sys, columns);
    IdentityReport r;
    auto check = [&](const MultiIndex& idx) {
        ++r.evaluated;
        if (polynomial_indicator(sys, columns, idx) != t.at(idx)) {
            ++r.mismatches;
            if (!r.first_mismatch) {
                r.first_mismatch = idx;
            }
        }
    };
    if (t.entry_count() <= kExhaustiveIdentityEntries) {
        r.exhaustive = true;
        for (std::size_t o = 0; o < t.entry_count(); ++o) {
            check(t.index_of(o));
        }
    }
    MultiIndex idx(sys.k());
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& v : idx) {
            v = static_cast<std::size_t>(uniform_below(rng, t.side()));
        }
        check(idx);
    }
    return r;
}

/// k total orders on [L]; sequence(i) lists [L] from smallest to largest.
class OrderFamily {
public:
    OrderFamily(std::size_t side, std::vector<std::vector<std::size_t>> sequences)
        : side_(side), sequences_(std::move(sequences)) {
        ranks_.resize(sequences_.size());
        for (std::size_t i = 0; i < sequences_.size(); ++i) {
            if (sequences_[i].size() != side_) {
                throw std::invalid_argument("order " + std::to_string(i + 1) + " is not a permutation of [L]");
            }
            ranks_[i].assign(side_, side_);
            for (std::size_t pos = 0; pos < side_; ++pos) {
                const std::size_t v = sequences_[i][pos];
                if (v >= side_ || ranks_[i][v] != side_) {
                    throw std::invalid_argument("order " + std::to_string(i + 1) + " is not a permutation of [L]");
                }
                ranks_[i][v] = pos;
            }
        }
    }

    static OrderFamily increasing(std::size_t side, std::size_t order) {
        std::vector<std::size_t> seq(side);
        for (std::size_t v = 0; v < side; ++v) {
            seq[v] = v;
        }
        return OrderFamily(side, std::vector<std::vector<std::size_t>>(order, seq));
    }

    [[nodiscard]] std::size_t side() const noexcept { return side_; }
    [[nodiscard]] std::size_t order() const noexcept { return sequences_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& sequence(std::size_t i) const { return sequences_.at(i); }
    [[nodiscard]] std::size_t rank(std::size_t i, std::size_t v) const { return ranks_.at(i).at(v); }
    [[nodiscard]] bool reversed(std::size_t i) const {
        return side_ > 1 && sequences_.at(i).front() == side_ - 1 && sequences_.at(i).back() == 0;
    }

    /// a <= b in the product order.
    [[nodiscard]] bool precedes(std::span<const std::size_t> a, std::span<const std::size_t> b) const {
        for (std::size_t i = 0; i < order(); ++i) {
            if (rank(i, a[i]) > rank(i, b[i])) {
                return false;
            }
        }
        return true;
    }

private:
    std::size_t side_;
    std::vector<std::vector<std::size_t>> sequences_;
    std::vector<std::vector<std::size_t>> ranks_;
};

inline bool is_antichain(std::span<const MultiIndex> support, const OrderFamily& orders) {
    for (std::size_t a = 0; a < support.size(); ++a) {
        if (support[a].size() != orders.order()) {
            throw DimensionMismatch("multi-index length differs from the number of orders");
        }
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            if (support[a] == support[b]) {
                continue;
            }
            if (orders.precedes(support[a], support[b]) || orders.precedes(support[b], support[a])) {
                return false;
            }
        }
    }
    return true;
}

inline constexpr std::size_t kDefaultPartitionSearchCap = 14;

struct SliceRankResult {
    std::size_t rank = 0;
    std::vector<std::size_t> assignment;  // slice chosen for each support element
    std::uint64_t nodes = 0;
};

namespace detail {

class AssignmentSearch {
public:
    AssignmentSearch(std::span<const MultiIndex> s, std::size_t k, std::size_t side)
        : s_(s), k_(k), open_(k, std::vector<std::size_t>(side, 0)) {
        // Elements sharing many coordinates with others go first: they decide
        // the most later costs.
        std::vector<std::size_t> degree(s.size(), 0);
        for (std::size_t a = 0; a < s.size(); ++a) {
            for (std::size_t b = 0; b < s.size(); ++b) {
                for (std::size_t i = 0; b != a && i < k; ++i) {
                    degree[a] += s[a][i] == s[b][i] ? 1 : 0;
                }
            }
        }
        order_.resize(s.size());
        for (std::size_t a = 0; a < s.size(); ++a) {
            order_[a] = a;
        }
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
        current_.assign(s.size(), 0);

        // Putting everything into the cheapest single slice is a valid start.
        best_ = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<bool> seen(side, false);
            std::size_t c = 0;
            for (const auto& e : s) {
                if (!seen[e[i]]) {
                    seen[e[i]] = true;
                    ++c;
                }
            }
            if (c < best_) {
                best_ = c;
                best_assignment_.assign(s.size(), i);
            }
        }
        if (s.empty()) {
            best_ = 0;
        }
    }

    SliceRankResult run() {
        if (!s_.empty()) {
            dfs(0, 0);
        }
        return SliceRankResult{best_, best_assignment_, nodes_};
    }

private:
    /// Elements left that cannot reuse an opened value and pairwise share no
    /// coordinate each force a distinct new slice value.
    std::size_t lower_bound(std::size_t pos) const {
        std::vector<std::size_t> forced;
        for (std::size_t q = pos; q < order_.size(); ++q) {
            const auto& e = s_[order_[q]];
            bool free_slot = false;
            for (std::size_t i = 0; i < k_ && !free_slot; ++i) {
                free_slot = open_[i][e[i]] != 0;
            }
            if (free_slot) {
                continue;
            }
            bool independent = true;
            for (std::size_t g : forced) {
                for (std::size_t i = 0; i < k_; ++i) {
                    if (s_[g][i] == e[i]) {
                        independent = false;
                        break;
                    }
                }
                if (!independent) {
                    break;
                }
            }
            if (independent) {
                forced.push_back(order_[q]);
            }
        }
        return forced.size();
    }

    void dfs(std::size_t pos, std::size_t cost) {
        ++nodes_;
        if (cost >= best_) {
            return;
        }
        if (pos == order_.size()) {
            best_ = cost;
            best_assignment_ = current_;
            return;
        }
        if (cost + lower_bound(pos) >= best_) {
            return;
        }
        const std::size_t a = order_[pos];
        const auto& e = s_[a];
        // Zero-cost slices first.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < k_; ++i) {
                const bool reuse = open_[i][e[i]] != 0;
                if (reuse != (pass == 0)) {
                    continue;
                }
                ++open_[i][e[i]];
                current_[a] = i;
                dfs(pos + 1, cost + (reuse ? 0 : 1));
                --open_[i][e[i]];
            }
        }
    }

    std::span<const MultiIndex> s_;
    std::size_t k_;
    std::vector<std::vector<std::size_t>> open_;  // open_[i][v]: elements in slice i with coordinate v
    std::vector<std::size_t> order_;
    std::vector<std::size_t> current_;
    std::size_t best_ = 0;
    std::vector<std::size_t> best_assignment_;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// min over assignments S -> {1..k} of sum_i |pi_i(S_i)|, by branch and bound.
/// Equals the slice rank when the support is an antichain.
inline SliceRankResult min_assignment_cost(std::span<const MultiIndex> support, std::size_t k, std::size_t side) {
    for (const auto& e : support) {
        if (e.size() != k) {
            throw DimensionMismatch("multi-index length differs from tensor order");
        }
        for (std::size_t v : e) {
            if (v >= side) {
                throw std::out_of_range("multi-index coordinate outside [L]");
            }
        }
    }
    return detail::AssignmentSearch(support, k, side).run();
}

inline SliceRankResult antichain_slice_rank(const Tensor& t, const OrderFamily& orders,
                                            std::size_t cap = kDefaultPartitionSearchCap) {
    if (orders.order() != t.order() || orders.side() != t.side()) {
        throw DimensionMismatch("order family does not match tensor shape");
    }
    const auto support = t.support();
    if (support.size() > cap) {
        throw CapExceeded("support of size " + std::to_string(support.size()) + " exceeds partition-search cap " +
                          std::to_string(cap));
    }
    if (!is_antichain(support, orders)) {
        throw NotAntichain("support is not an antichain under the given orders");
    }
    return min_assignment_cost(support, t.order(), t.side());
}

/// Diagonal tensors have slice rank equal to the number of nonzero diagonal
/// entries; off-diagonal support is rejected.
inline std::size_t diagonal_slice_rank(const Tensor& t) {
    std::size_t count = 0;
    for (const auto& idx : t.support()) {
        if (std::adjacent_find(idx.begin(), idx.end(), std::not_equal_to<>()) != idx.end()) {
            throw std::invalid_argument("tensor is not diagonal");
        }
        ++count;
    }
    return count;
}

/// Orders for a partition of [k] into blocks of size >= 2: within each block
/// the smallest index gets the increasing order, the second smallest the
/// reversed order, and every other index the increasing order.
inline OrderFamily corollary_orders(const std::vector<std::vector<std::size_t>>& blocks, std::size_t side,
                                    std::size_t k) {
    std::vector<int> owner(k, -1);
    for (std::size_t h = 0; h < blocks.size(); ++h) {
        if (blocks[h].size() < 2) {
            throw std::invalid_argument("block " + std::to_string(h + 1) + " has fewer than two indices");
        }
        for (std::size_t i : blocks[h]) {
            if (i >= k || owner[i] != -1) {
                throw std::invalid_argument("blocks must partition the index set");
            }
            owner[i] = static_cast<int>(h);
        }
    }
    if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
        throw std::invalid_argument("blocks must partition the index set");
    }
    std::vector<std::size_t> inc(side);
    for (std::size_t v = 0; v < side; ++v) {
        inc[v] = v;
    }
    std::vector<std::size_t> dec(inc.rbegin(), inc.rend());
    std::vector<std::vector<std::size_t>> seq(k, inc);
    for (const auto& b : blocks) {
        std::vector<std::size_t> sorted = b;
        std::sort(sorted.begin(), sorted.end());
        seq[sorted[1]] = dec;
    }
    return OrderFamily(side, std::move(seq));
}

struct PartitionedBoundReport {
    std::size_t family_size = 0;  // L
    double bound = 0.0;           // k * Gamma^n
    bool hypothesis_met = false;
    std::optional<MultiIndex> witness;  // 0-based cross index tuple
    std::uint64_t cross_solutions = 0;  // solutions among all index tuples
    bool bound_holds = true;            // L <= bound, meaningful when hypothesis_met
};

inline constexpr std::uint64_t kPartitionedBoundCap = 10'000'000;

/// For L solutions (x_1^{(l)}, ..., x_k^{(l)}) and a partition of [k], looks
/// for an index tuple (l_1..l_k) giving a solution with two different l_j
/// inside some block. Without one, L <= k * Gamma^n must hold.
inline PartitionedBoundReport partitioned_solution_bound(const SystemSpec& sys,
                                                         const std::vector<std::vector<FpVector>>& solutions,
                                                         const std::vector<std::vector<std::size_t>>& blocks) {
    if (solutions.empty()) {
        throw std::invalid_argument("solution family is empty");
    }
    const std::size_t k = sys.k();
    if (k < 2 * sys.m() + 1) {
        throw HypothesisViolation("partitioned solution bound needs k >= 2m + 1");
    }
    const std::size_t family = solutions.size();
    corollary_orders(blocks, family, k);  // validates the partition
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (total > kPartitionedBoundCap / family) {
            throw CapExceeded("L^k exceeds " + std::to_string(kPartitionedBoundCap));
        }
        total *= family;
    }
    for (std::size_t l = 0; l < family; ++l) {
        if (!is_solution(sys, solutions[l])) {
            throw InvalidTuple("family member " + std::to_string(l + 1) + " does not solve the system");
        }
    }
    const std::size_t n = solutions.front().front().size();

    // Column i: distinct vectors and, for each, the family indices carrying it.
    std::vector<std::vector<FpVector>> distinct(k);
    std::vector<std::unordered_map<FpVector, std::vector<std::size_t>, FpVectorHash>> carriers(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t l = 0; l < family; ++l) {
            auto& list = carriers[i][solutions[l][i]];
            if (list.empty()) {
                distinct[i].push_back(solutions[l][i]);
            }
            list.push_back(l);
        }
    }
    std::vector<std::size_t> owner(k);
    for (std::size_t h = 0; h < blocks.size(); ++h) {
        for (std::size_t i : blocks[h]) {
            owner[i] = h;
        }
    }

    PartitionedBoundReport r;
    r.family_size = family;
    r.bound = clp_upper_bound(sys, n);

    std::vector<std::size_t> all(k);
    for (std::size_t i = 0; i < k; ++i) {
        all[i] = i;
    }
    CompletionPlan plan(sys, all);
    std::vector<FpVector> tuple(k, FpVector(n));
    MultiIndex idx(k);
    plan.for_each_per_position(
        tuple, [&](std::size_t i) { return std::span<const FpVector>(distinct[i]); },
        [&](std::size_t i, const FpVector& x) { return carriers[i].count(x) != 0; },
        [&](const std::vector<FpVector>& t) {
            std::vector<const std::vector<std::size_t>*> lists(k);
            for (std::size_t i = 0; i < k; ++i) {
                lists[i] = &carriers[i].at(t[i]);
            }
            std::vector<std::size_t> digits(k, 0);
            while (true) {
                for (std::size_t i = 0; i < k; ++i) {
                    idx[i] = (*lists[i])[digits[i]];
                }
                ++r.cross_solutions;
                if (!r.witness) {
                    for (std::size_t i = 0; i < k && !r.witness; ++i) {
                        for (std::size_t j = i + 1; j < k; ++j) {
                            if (owner[i] == owner[j] && idx[i] != idx[j]) {
                                r.witness = idx;
                                break;
                            }
                        }
                    }
                }
                std::size_t pos = k;
                while (pos > 0) {
                    --pos;
                    if (++digits[pos] < lists[pos]->size()) {
                        break;
                    }
                    digits[pos] = 0;
                    if (pos == 0) {
                        return true;
                    }
                }
            }
        });
    r.hypothesis_met = !r.witness.has_value();
    r.bound_holds = static_cast<double>(family) <= r.bound;
    return r;
}

}  // namespace fpsys
