#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpsys/combinatorics.hpp"
#include "fpsys/errors.hpp"
#include "fpsys/linear_system.hpp"
#include "fpsys/subspace.hpp"

namespace fpsys {

inline constexpr std::size_t kMaxWeightArity = 20;
inline constexpr std::size_t kDefaultAdmissibleListCap = std::size_t{1} << 16;

/// An index set I such that the x_i (i in I) are independent and no other
/// entry lies in U = span(x_i | i in I).
struct AdmissibleSet {
    std::vector<std::size_t> indices;
    Subspace span_u;
    std::size_t line_count = 0;  // distinct lines span(proj_{V/U} x_j), j not in I
    std::size_t weight = 0;      // (k+1)|I| + line_count
};

/// Indices off I grouped by common quotient line, blocks ordered by their
/// first index.
struct PartitionBlock {
    std::vector<std::size_t> indices;
    QuotientLine line;
};

struct WeightReport {
    std::size_t k = 0;
    std::size_t omega = 0;
    std::vector<std::size_t> chosen;
    Subspace chosen_span;
    bool admissible_listed = false;
    std::vector<AdmissibleSet> admissible;
    std::vector<PartitionBlock> partition;
};

inline void require_nonzero_entries(std::span<const FpVector> t) {
    if (t.empty()) {
        throw InvalidTuple("empty tuple");
    }
    if (t.size() > kMaxWeightArity) {
        throw CapExceeded("admissible-set scan is limited to k <= " + std::to_string(kMaxWeightArity));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        require_same_dim(t[i], t.front());
        if (t[i].is_zero()) {
            throw InvalidTuple("entry " + std::to_string(i + 1) + " is the zero vector");
        }
    }
}

/// Checks conditions (i) and (ii) for one index set; nullopt if not admissible.
inline std::optional<AdmissibleSet> check_admissible(const Field& f, std::span<const FpVector> t,
                                                     std::span<const std::size_t> indices) {
    const std::size_t n = t.front().size();
    std::vector<FpVector> chosen;
    chosen.reserve(indices.size());
    for (std::size_t i : indices) {
        chosen.push_back(t[i]);
    }
    Subspace u = Subspace::span(f, chosen, n);
    if (u.dim() != indices.size()) {
        return std::nullopt;
    }
    std::vector<QuotientLine> lines;
    for (std::size_t j : complement(indices, t.size())) {
        FpVector rep = u.reduce(t[j]);
        if (rep.is_zero()) {
            return std::nullopt;
        }
        lines.push_back(normalize_line(f, std::move(rep)));
    }
    std::sort(lines.begin(), lines.end());
    const auto line_count = static_cast<std::size_t>(std::unique(lines.begin(), lines.end()) - lines.begin());
    const std::size_t k = t.size();
    return AdmissibleSet{std::vector<std::size_t>(indices.begin(), indices.end()), std::move(u), line_count,
                         (k + 1) * indices.size() + line_count};
}

/// Every admissible set, ordered by size and then lexicographically. The
/// empty set always qualifies since all entries are nonzero.
inline std::vector<AdmissibleSet> admissible_sets(const Field& f, std::span<const FpVector> t) {
    require_nonzero_entries(t);
    std::vector<AdmissibleSet> out;
    for (std::size_t size = 0; size <= t.size(); ++size) {
        for_each_combination(t.size(), size, [&](std::span<const std::size_t> idx) {
            if (auto s = check_admissible(f, t, idx)) {
                out.push_back(std::move(*s));
            }
        });
    }
    return out;
}

/// Groups [k] \ I by quotient line modulo U.
inline std::vector<PartitionBlock> line_partition(const Field& f, std::span<const FpVector> t,
                                                  std::span<const std::size_t> indices, const Subspace& u) {
    std::vector<PartitionBlock> blocks;
    for (std::size_t j : complement(indices, t.size())) {
        QuotientLine line = normalize_line(f, u.reduce(t[j]));
        auto it = std::find_if(blocks.begin(), blocks.end(), [&](const PartitionBlock& b) { return b.line == line; });
        if (it == blocks.end()) {
            blocks.push_back(PartitionBlock{{j}, std::move(line)});
        } else {
            it->indices.push_back(j);
        }
    }
    return blocks;
}

/// omega(x_1..x_k), the maximizer (smallest |I| first, then lexicographic),
/// and the line partition of the indices outside it.
inline WeightReport weight(const Field& f, std::span<const FpVector> t,
                           std::size_t list_cap = kDefaultAdmissibleListCap) {
    require_nonzero_entries(t);
    const std::size_t k = t.size();
    const bool listed = k * (std::size_t{1} << k) <= list_cap;
    std::vector<AdmissibleSet> all;
    std::optional<AdmissibleSet> best;
    for (std::size_t size = 0; size <= k; ++size) {
        for_each_combination(k, size, [&](std::span<const std::size_t> idx) {
            auto s = check_admissible(f, t, idx);
            if (!s) {
                return;
            }
            if (!best || s->weight > best->weight) {
                best = *s;
            }
            if (listed) {
                all.push_back(std::move(*s));
            }
        });
    }
    auto partition = line_partition(f, t, best->indices, best->span_u);
    WeightReport r{k, best->weight, best->indices, best->span_u, listed, std::move(all), std::move(partition)};
    return r;
}

struct WeightProperties {
    std::size_t omega = 0;
    std::size_t chosen_size = 0;
    std::size_t span_dim = 0;
    bool omega_allowed = false;        // omega not in {0, (k+1), ..., (k-1)(k+1)}
    bool chosen_size_matches = false;  // |I| = floor(omega / (k+1))
    bool span_dim_bound = false;       // dim span >= omega / (k+1)

    [[nodiscard]] bool all_hold() const noexcept { return omega_allowed && chosen_size_matches && span_dim_bound; }
};

inline WeightProperties verify_weight_properties(const Field& f, std::span<const FpVector> t) {
    const WeightReport w = weight(f, t);
    const std::size_t k = t.size();
    WeightProperties p;
    p.omega = w.omega;
    p.chosen_size = w.chosen.size();
    p.span_dim = rank_of(f, t);
    p.omega_allowed = !(w.omega % (k + 1) == 0 && w.omega / (k + 1) <= k - 1);
    p.chosen_size_matches = w.chosen.size() == w.omega / (k + 1);
    p.span_dim_bound = p.span_dim * (k + 1) >= w.omega;
    return p;
}

/// As above, first checking that t is a nonzero solution of the homogeneous system.
inline WeightProperties verify_weight_properties(const SystemSpec& sys, std::span<const FpVector> t) {
    if (!sys.homogeneous()) {
        throw HypothesisViolation("weight properties are stated for homogeneous systems");
    }
    if (!is_solution(sys, t)) {
        throw InvalidTuple("tuple does not solve the system");
    }
    return verify_weight_properties(sys.field(), t);
}

struct PartitionReport {
    std::vector<std::size_t> chosen;
    std::vector<PartitionBlock> blocks;
    std::size_t line_term = 0;  // omega - (k+1)|I|
    bool blocks_at_least_two = true;
    bool lines_distinct = true;
    std::optional<std::size_t> singleton_index;

    [[nodiscard]] std::size_t t() const noexcept { return blocks.size(); }
    [[nodiscard]] bool lemma_holds() const noexcept {
        return blocks_at_least_two && lines_distinct && line_term == blocks.size();
    }
};

/// The partition [k] \ I = J_1 u ... u J_t with |J_h| >= 2 and distinct lines
/// W_h, for a nonzero solution of a homogeneous system whose rows sum to zero.
/// A singleton block is reported (not thrown) as a violation.
inline PartitionReport partition_structure(const SystemSpec& sys, std::span<const FpVector> t) {
    if (!sys.homogeneous() || !sys.rows_sum_zero()) {
        throw HypothesisViolation("partition structure needs a homogeneous system with rows summing to zero");
    }
    if (!is_solution(sys, t)) {
        throw InvalidTuple("tuple does not solve the system");
    }
    const WeightReport w = weight(sys.field(), t, 0);
    PartitionReport r;
    r.chosen = w.chosen;
    r.blocks = w.partition;
    r.line_term = w.omega - (t.size() + 1) * w.chosen.size();
    for (std::size_t a = 0; a < r.blocks.size(); ++a) {
        if (r.blocks[a].indices.size() < 2) {
            r.blocks_at_least_two = false;
            if (!r.singleton_index) {
                r.singleton_index = r.blocks[a].indices.front();
            }
        }
        for (std::size_t b = a + 1; b < r.blocks.size(); ++b) {
            if (r.blocks[a].line == r.blocks[b].line) {
                r.lines_distinct = false;
            }
        }
    }
    return r;
}

}  // namespace fpsys
