#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpsys/combinatorics.hpp"
#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/matrix.hpp"
#include "fpsys/subspace.hpp"
#include "fpsys/vector.hpp"

namespace fpsys {

/// A finite subset A of F_p^n with constant-time membership. Points keep
/// their insertion order.
class PointSet {
public:
    PointSet(const Field& f, std::size_t n) : field_(f), n_(n) {}

    PointSet(const Field& f, std::size_t n, std::vector<FpVector> points) : field_(f), n_(n) {
        points_.reserve(points.size());
        for (auto& x : points) {
            insert(std::move(x));
        }
    }

    /// F_p^n in code order, optionally without the zero vector.
    static PointSet full_space(const Field& f, std::size_t n, bool exclude_zero = false) {
        PointSet a(f, n);
        for (auto& x : all_vectors(f, n)) {
            if (exclude_zero && x.is_zero()) {
                continue;
            }
            a.insert(std::move(x));
        }
        return a;
    }

    void insert(FpVector x) {
        if (x.size() != n_) {
            throw DimensionMismatch("point of dimension " + std::to_string(x.size()) +
                                    " in a point set of F_p^" + std::to_string(n_));
        }
        if (!x.is_reduced(field_)) {
            throw std::invalid_argument("point coordinate not reduced mod p: " + x.to_string());
        }
        if (index_.count(x) != 0) {
            throw std::invalid_argument("duplicate point: " + x.to_string());
        }
        index_.emplace(x, points_.size());
        points_.push_back(std::move(x));
    }

    [[nodiscard]] const Field& field() const noexcept { return field_; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] const std::vector<FpVector>& points() const noexcept { return points_; }
    [[nodiscard]] const FpVector& operator[](std::size_t i) const noexcept { return points_[i]; }

    [[nodiscard]] bool contains(const FpVector& x) const { return index_.count(x) != 0; }

    [[nodiscard]] std::optional<std::size_t> index_of(const FpVector& x) const {
        auto it = index_.find(x);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Points of this set lying in the subspace, in this set's order.
    [[nodiscard]] PointSet intersect(const Subspace& v) const {
        PointSet out(field_, n_);
        for (const auto& x : points_) {
            if (v.contains(x)) {
                out.insert(x);
            }
        }
        return out;
    }

private:
    Field field_;
    std::size_t n_;
    std::vector<FpVector> points_;
    std::unordered_map<FpVector, std::size_t, FpVectorHash> index_;
};

/// The system sum_i a_{j,i} x_i = b_j (j = 1..m) with x_i in F_p^n. Without
/// constants the system is homogeneous. The hypothesis flags are always
/// recomputed from the coefficients.
class SystemSpec {
public:
    SystemSpec(const Field& f, FpMatrix coeffs, std::optional<std::vector<FpVector>> constants = std::nullopt)
        : field_(f), coeffs_(std::move(coeffs)), constants_(std::move(constants)) {
        if (coeffs_.rows() < 1) {
            throw std::invalid_argument("system needs at least one equation");
        }
        if (coeffs_.cols() < 2) {
            throw std::invalid_argument("system needs at least two variables");
        }
        if (!coeffs_.is_reduced(field_)) {
            throw std::invalid_argument("coefficient not reduced mod p");
        }
        if (constants_) {
            if (constants_->size() != coeffs_.rows()) {
                throw DimensionMismatch("expected one constant vector per equation");
            }
            for (const auto& b : *constants_) {
                require_same_dim(b, constants_->front());
                if (!b.is_reduced(field_)) {
                    throw std::invalid_argument("constant term not reduced mod p");
                }
            }
        }
        rows_sum_zero_ = compute_rows_sum_zero();
        rank_ = fpsys::rank(field_, coeffs_);
        failing_minors_ = compute_failing_minors();
    }

    [[nodiscard]] const Field& field() const noexcept { return field_; }
    [[nodiscard]] std::size_t m() const noexcept { return coeffs_.rows(); }
    [[nodiscard]] std::size_t k() const noexcept { return coeffs_.cols(); }
    [[nodiscard]] const FpMatrix& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] Residue coeff(std::size_t j, std::size_t i) const noexcept { return coeffs_(j, i); }
    [[nodiscard]] bool homogeneous() const noexcept { return !constants_.has_value(); }
    [[nodiscard]] const std::optional<std::vector<FpVector>>& constants() const noexcept { return constants_; }
    [[nodiscard]] bool rows_sum_zero() const noexcept { return rows_sum_zero_; }
    [[nodiscard]] bool generic_minors() const noexcept { return failing_minors_.empty(); }
    [[nodiscard]] std::size_t rank() const noexcept { return rank_; }
    /// Column sets (0-based) whose m x m minor is singular.
    [[nodiscard]] const std::vector<std::vector<std::size_t>>& failing_minors() const noexcept {
        return failing_minors_;
    }

    /// Same coefficients with constant terms b_j.
    [[nodiscard]] SystemSpec with_constants(std::vector<FpVector> b) const {
        return SystemSpec(field_, coeffs_, std::move(b));
    }

private:
    bool compute_rows_sum_zero() const {
        for (std::size_t j = 0; j < m(); ++j) {
            Residue s = 0;
            for (std::size_t i = 0; i < k(); ++i) {
                s = field_.add(s, coeffs_(j, i));
            }
            if (s != 0) {
                return false;
            }
        }
        return true;
    }

    std::vector<std::vector<std::size_t>> compute_failing_minors() const {
        std::vector<std::vector<std::size_t>> failing;
        std::vector<std::size_t> all_rows(m());
        for (std::size_t j = 0; j < m(); ++j) {
            all_rows[j] = j;
        }
        if (m() > k()) {
            return {all_rows};
        }
        for_each_combination(k(), m(), [&](std::span<const std::size_t> cols) {
            if (!minor_nonsingular(field_, coeffs_, all_rows, cols)) {
                failing.emplace_back(cols.begin(), cols.end());
            }
        });
        return failing;
    }

    Field field_;
    FpMatrix coeffs_;
    std::optional<std::vector<FpVector>> constants_;
    bool rows_sum_zero_ = false;
    std::size_t rank_ = 0;
    std::vector<std::vector<std::size_t>> failing_minors_;
};

struct ValidationReport {
    bool rows_sum_zero = false;
    bool generic_minors = false;
    std::size_t rank = 0;
    std::vector<std::vector<std::size_t>> failing_minors;

    [[nodiscard]] bool ok() const noexcept { return rows_sum_zero && generic_minors; }
};

inline ValidationReport validate(const SystemSpec& sys) {
    return ValidationReport{sys.rows_sum_zero(), sys.generic_minors(), sys.rank(), sys.failing_minors()};
}

/// Residual sum_i a_{j,i} x_i - b_j of equation j.
inline FpVector residual(const SystemSpec& sys, std::span<const FpVector> t, std::size_t j) {
    const Field& f = sys.field();
    FpVector acc(t.front().size());
    for (std::size_t i = 0; i < sys.k(); ++i) {
        axpy(f, sys.coeff(j, i), t[i], acc);
    }
    if (sys.constants()) {
        acc = sub(f, acc, (*sys.constants())[j]);
    }
    return acc;
}

inline void check_tuple_shape(const SystemSpec& sys, std::span<const FpVector> t) {
    if (t.size() != sys.k()) {
        throw DimensionMismatch("tuple has " + std::to_string(t.size()) + " entries, system has " +
                                std::to_string(sys.k()) + " variables");
    }
    for (const auto& x : t) {
        require_same_dim(x, t.front());
    }
    if (sys.constants() && !sys.constants()->empty()) {
        require_same_dim(t.front(), sys.constants()->front());
    }
}

inline bool is_solution(const SystemSpec& sys, std::span<const FpVector> t) {
    check_tuple_shape(sys, t);
    for (std::size_t j = 0; j < sys.m(); ++j) {
        if (!residual(sys, t, j).is_zero()) {
            return false;
        }
    }
    return true;
}

inline std::size_t distinct_count(std::span<const FpVector> t) {
    std::vector<FpVector> s(t.begin(), t.end());
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

/// A solution (x_1..x_k) with its classification.
struct SolutionTuple {
    std::vector<FpVector> entries;
    std::size_t distinct_count = 0;
    std::size_t span_dim = 0;
    bool all_equal = false;

    /// Classifies t, checking first that it solves sys.
    static SolutionTuple make(const SystemSpec& sys, std::vector<FpVector> t) {
        if (!is_solution(sys, t)) {
            throw InvalidTuple("tuple does not solve the system");
        }
        return classify(sys.field(), std::move(t));
    }

    static SolutionTuple classify(const Field& f, std::vector<FpVector> t) {
        SolutionTuple s;
        s.distinct_count = fpsys::distinct_count(t);
        s.span_dim = rank_of(f, t);
        s.all_equal = s.distinct_count == 1;
        s.entries = std::move(t);
        return s;
    }
};

/// Which solutions an enumeration keeps.
struct SolutionFilter {
    enum class Kind { Any, NotAllEqual, Distinct, SpanDimAtLeast, DistinctCountAtLeast };
    Kind kind = Kind::Any;
    std::size_t threshold = 0;

    static SolutionFilter any() { return {Kind::Any, 0}; }
    static SolutionFilter not_all_equal() { return {Kind::NotAllEqual, 0}; }
    static SolutionFilter distinct() { return {Kind::Distinct, 0}; }
    static SolutionFilter span_dim_at_least(std::size_t r) { return {Kind::SpanDimAtLeast, r}; }
    static SolutionFilter distinct_count_at_least(std::size_t l) { return {Kind::DistinctCountAtLeast, l}; }

    [[nodiscard]] bool needs_span() const noexcept { return kind == Kind::SpanDimAtLeast; }

    /// Span dimension is only consulted for SpanDimAtLeast.
    [[nodiscard]] bool accepts(std::size_t distinct, std::size_t span_dim, std::size_t k) const noexcept {
        switch (kind) {
            case Kind::Any:
                return true;
            case Kind::NotAllEqual:
                return distinct >= 2;
            case Kind::Distinct:
                return distinct == k;
            case Kind::SpanDimAtLeast:
                return span_dim >= threshold;
            case Kind::DistinctCountAtLeast:
                return distinct >= threshold;
        }
        return false;
    }
};

namespace detail {

/// Odometer over the candidate lists of `positions`, writing each choice into
/// `tuple` before calling visit(tuple).
template <class CandidatesAt, class Visit>
bool for_each_product(const std::vector<std::size_t>& positions, CandidatesAt& candidates_at,
                      std::vector<FpVector>& tuple, Visit&& visit) {
    std::vector<std::span<const FpVector>> lists;
    lists.reserve(positions.size());
    for (std::size_t i : positions) {
        lists.push_back(candidates_at(i));
        if (lists.back().empty()) {
            return true;
        }
    }
    std::vector<std::size_t> digits(positions.size(), 0);
    for (std::size_t q = 0; q < positions.size(); ++q) {
        tuple[positions[q]] = lists[q][0];
    }
    while (true) {
        if (!visit(tuple)) {
            return false;
        }
        std::size_t pos = positions.size();
        while (true) {
            if (pos == 0) {
                return true;
            }
            --pos;
            if (++digits[pos] < lists[pos].size()) {
                tuple[positions[pos]] = lists[pos][digits[pos]];
                break;
            }
            digits[pos] = 0;
            tuple[positions[pos]] = lists[pos][0];
        }
    }
}

}  // namespace detail

/// Solves the system for a set of open positions once the remaining positions
/// of a k-tuple are fixed.
///
/// With pivots P (the lexicographically first m open columns with a
/// nonsingular minor) and free columns F = open \ P, the map
///   (x_f)_{f in F}  ->  x_P = M_P^{-1} (b - sum_fixed a x - sum_F a x_f)
/// is a bijection from F-assignments onto the solutions of the open part, so
/// iterating F over A^|F| and keeping pivot values that land in A visits every
/// completion in A exactly once. When the open columns have rank < m there is
/// no such P and completions are found by scanning A^|open|.
class CompletionPlan {
public:
    CompletionPlan(const SystemSpec& sys, std::vector<std::size_t> open) : sys_(&sys), open_(std::move(open)) {
        const std::size_t m = sys.m();
        std::vector<std::size_t> all_rows(m);
        for (std::size_t j = 0; j < m; ++j) {
            all_rows[j] = j;
        }
        if (open_.size() >= m) {
            for_each_combination(open_.size(), m, [&](std::span<const std::size_t> pick) {
                std::vector<std::size_t> cols;
                for (std::size_t q : pick) {
                    cols.push_back(open_[q]);
                }
                auto inv = inverse(sys.field(), sys.coeffs().submatrix(all_rows, cols));
                if (!inv) {
                    return true;
                }
                pivots_ = std::move(cols);
                minor_inverse_ = std::move(*inv);
                return false;
            });
        }
        solvable_ = !pivots_.empty();
        for (std::size_t i : open_) {
            if (std::find(pivots_.begin(), pivots_.end(), i) == pivots_.end()) {
                free_.push_back(i);
            }
        }
    }

    [[nodiscard]] const std::vector<std::size_t>& open() const noexcept { return open_; }
    [[nodiscard]] const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }
    [[nodiscard]] const std::vector<std::size_t>& free_positions() const noexcept { return free_; }
    /// False when the open columns have rank below m (brute-force fallback).
    [[nodiscard]] bool pivot_solvable() const noexcept { return solvable_; }

    /// For every completion of `tuple` on the open positions with entries
    /// drawn from `candidates` and pivot entries accepted by `member`, writes
    /// the completion into `tuple` and calls visit(tuple). Fixed positions of
    /// `tuple` must be set by the caller. Returns false if visit stopped.
    template <class Member, class Visit>
    bool for_each(std::vector<FpVector>& tuple, std::span<const FpVector> candidates, Member&& member,
                  Visit&& visit) const {
        return for_each_per_position(
            tuple, [&](std::size_t) { return candidates; },
            [&](std::size_t, const FpVector& x) { return member(x); }, visit);
    }

    /// Variant with a candidate list per position: candidates_at(i) yields the
    /// span of allowed entries at position i and member(i, x) tests a solved
    /// pivot entry.
    template <class CandidatesAt, class Member, class Visit>
    bool for_each_per_position(std::vector<FpVector>& tuple, CandidatesAt&& candidates_at, Member&& member,
                               Visit&& visit) const {
        const SystemSpec& sys = *sys_;
        const Field& f = sys.field();
        const std::size_t m = sys.m();
        const std::size_t n = tuple.front().size();

        if (!solvable_) {
            return detail::for_each_product(open_, candidates_at, tuple, [&](std::vector<FpVector>& t) {
                if (!is_solution(sys, t)) {
                    return true;
                }
                return detail::keep_going(visit, std::as_const(t));
            });
        }

        // rhs_j = b_j - sum over fixed positions.
        std::vector<bool> is_open(sys.k(), false);
        for (std::size_t i : open_) {
            is_open[i] = true;
        }
        std::vector<FpVector> rhs(m, FpVector(n));
        for (std::size_t j = 0; j < m; ++j) {
            if (sys.constants()) {
                rhs[j] = (*sys.constants())[j];
            }
            for (std::size_t i = 0; i < sys.k(); ++i) {
                if (!is_open[i]) {
                    axpy(f, f.neg(sys.coeff(j, i)), tuple[i], rhs[j]);
                }
            }
        }

        std::vector<FpVector> r(m, FpVector(n));
        return detail::for_each_product(free_, candidates_at, tuple, [&](std::vector<FpVector>& t) {
            for (std::size_t j = 0; j < m; ++j) {
                r[j] = rhs[j];
                for (std::size_t i : free_) {
                    axpy(f, f.neg(sys.coeff(j, i)), t[i], r[j]);
                }
            }
            for (std::size_t q = 0; q < m; ++q) {
                FpVector x(n);
                for (std::size_t j = 0; j < m; ++j) {
                    axpy(f, minor_inverse_(q, j), r[j], x);
                }
                if (!member(pivots_[q], x)) {
                    return true;
                }
                t[pivots_[q]] = std::move(x);
            }
            return detail::keep_going(visit, std::as_const(t));
        });
    }

private:
    const SystemSpec* sys_;
    std::vector<std::size_t> open_;
    std::vector<std::size_t> pivots_;
    std::vector<std::size_t> free_;
    FpMatrix minor_inverse_;
    bool solvable_ = false;
};

inline void require_full_rank(const SystemSpec& sys) {
    if (sys.rank() < sys.m()) {
        throw DegenerateSystem("coefficient matrix has rank " + std::to_string(sys.rank()) + " < m = " +
                               std::to_string(sys.m()));
    }
}

inline std::size_t require_common_dim(const SystemSpec& sys, const PointSet& a) {
    if (sys.constants() && sys.constants()->front().size() != a.n()) {
        throw DimensionMismatch("constant terms and point set live in different dimensions");
    }
    if (a.field().p() != sys.field().p()) {
        throw std::invalid_argument("point set and system use different primes");
    }
    return a.n();
}

/// Streams every solution in A^k passing `filter`, each exactly once, in the
/// order of free assignments (odometer over A on the non-pivot columns).
/// visit receives a SolutionTuple; returning false stops the stream.
template <class Visit>
void for_each_solution(const SystemSpec& sys, const PointSet& a, SolutionFilter filter, Visit&& visit) {
    require_full_rank(sys);
    const std::size_t n = require_common_dim(sys, a);
    if (a.empty()) {
        return;
    }
    std::vector<std::size_t> all(sys.k());
    for (std::size_t i = 0; i < sys.k(); ++i) {
        all[i] = i;
    }
    CompletionPlan plan(sys, all);
    std::vector<FpVector> tuple(sys.k(), FpVector(n));
    const Field& f = sys.field();
    plan.for_each(
        tuple, a.points(), [&](const FpVector& x) { return a.contains(x); },
        [&](const std::vector<FpVector>& t) {
            const std::size_t dc = distinct_count(t);
            const std::size_t sd = filter.needs_span() ? rank_of(f, t) : 0;
            if (!filter.accepts(dc, sd, sys.k())) {
                return true;
            }
            SolutionTuple s;
            s.entries = t;
            s.distinct_count = dc;
            s.span_dim = filter.needs_span() ? sd : rank_of(f, t);
            s.all_equal = dc == 1;
            return detail::keep_going(visit, std::as_const(s));
        });
}

inline std::vector<SolutionTuple> enumerate_solutions(const SystemSpec& sys, const PointSet& a,
                                                      SolutionFilter filter = SolutionFilter::any()) {
    std::vector<SolutionTuple> out;
    for_each_solution(sys, a, filter, [&](const SolutionTuple& s) { out.push_back(s); });
    return out;
}

inline std::size_t count_solutions(const SystemSpec& sys, const PointSet& a,
                                   SolutionFilter filter = SolutionFilter::any()) {
    std::size_t count = 0;
    for_each_solution(sys, a, filter, [&](const SolutionTuple&) { ++count; });
    return count;
}

inline std::optional<SolutionTuple> find_solution(const SystemSpec& sys, const PointSet& a, SolutionFilter filter) {
    std::optional<SolutionTuple> found;
    for_each_solution(sys, a, filter, [&](const SolutionTuple& s) {
        found = s;
        return false;
    });
    return found;
}

/// I-interesting test: the vectors on I are linearly independent and the
/// tuple extends to a solution in A^k whose entries off I contain at least
/// ell - m - 1 distinct vectors. `indices` is a sorted 0-based index set.
inline bool is_interesting(const SystemSpec& sys, const PointSet& a, std::span<const std::size_t> indices,
                           std::span<const FpVector> tuple_on_indices, std::size_t ell) {
    if (indices.size() != sys.m() + 1) {
        throw std::invalid_argument("index set must have exactly m + 1 elements");
    }
    if (tuple_on_indices.size() != indices.size()) {
        throw DimensionMismatch("I-tuple length differs from |I|");
    }
    if (ell > sys.k()) {
        throw std::invalid_argument("ell exceeds k");
    }
    const std::size_t n = require_common_dim(sys, a);
    for (const auto& x : tuple_on_indices) {
        if (!a.contains(x)) {
            throw std::invalid_argument("I-tuple entry not in A: " + x.to_string());
        }
    }
    if (rank_of(sys.field(), tuple_on_indices) != indices.size()) {
        return false;
    }
    std::vector<FpVector> tuple(sys.k(), FpVector(n));
    for (std::size_t q = 0; q < indices.size(); ++q) {
        tuple.at(indices[q]) = tuple_on_indices[q];
    }
    const auto open = complement(indices, sys.k());
    const std::size_t need = ell > sys.m() + 1 ? ell - sys.m() - 1 : 0;
    CompletionPlan plan(sys, open);
    bool found = false;
    std::vector<FpVector> rest;
    plan.for_each(
        tuple, a.points(), [&](const FpVector& x) { return a.contains(x); },
        [&](const std::vector<FpVector>& t) {
            rest.clear();
            for (std::size_t j : open) {
                rest.push_back(t[j]);
            }
            if (distinct_count(rest) >= need) {
                found = true;
                return false;
            }
            return true;
        });
    return found;
}

struct InterestingCount {
    std::size_t count = 0;
    BigInt bound;  // k^2 p^{mn}
    bool bound_holds = true;
    // A has no solution with span dimension >= m+1 and >= ell distinct
    // entries. The bound is only promised under this assumption.
    bool hypothesis_met = true;
};

/// True when A contains no solution spanning at least m+1 dimensions with at
/// least ell distinct entries.
inline bool avoids_rich_solutions(const SystemSpec& sys, const PointSet& a, std::size_t ell) {
    bool clean = true;
    for_each_solution(sys, a, SolutionFilter::span_dim_at_least(sys.m() + 1), [&](const SolutionTuple& s) {
        clean = s.distinct_count < ell;
        return clean;
    });
    return clean;
}

inline BigInt interesting_tuple_bound(const SystemSpec& sys, std::size_t n) {
    const BigInt k = sys.k();
    return k * k * boost::multiprecision::pow(BigInt(sys.field().p()), static_cast<unsigned>(sys.m() * n));
}

/// Visits every I-interesting I-tuple with entries drawn from `domain`
/// (interest is judged against the full set A).
template <class Visit>
void for_each_interesting_tuple(const SystemSpec& sys, const PointSet& a, std::span<const std::size_t> indices,
                                std::span<const FpVector> domain, std::size_t ell, Visit&& visit) {
    std::vector<FpVector> it(indices.size());
    for_each_digits(domain.size(), indices.size(), [&](std::span<const std::size_t> digits) {
        for (std::size_t q = 0; q < indices.size(); ++q) {
            it[q] = domain[digits[q]];
        }
        if (is_interesting(sys, a, indices, it, ell)) {
            return detail::keep_going(visit, std::as_const(it));
        }
        return true;
    });
}

inline InterestingCount count_interesting_tuples(const SystemSpec& sys, const PointSet& a,
                                                 std::span<const std::size_t> indices, std::size_t ell) {
    InterestingCount out;
    for_each_interesting_tuple(sys, a, indices, a.points(), ell, [&](const std::vector<FpVector>&) { ++out.count; });
    out.bound = interesting_tuple_bound(sys, a.n());
    out.bound_holds = BigInt(out.count) <= out.bound;
    out.hypothesis_met = avoids_rich_solutions(sys, a, ell);
    return out;
}

}  // namespace fpsys
