#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "fpsys/fpsys.hpp"

using namespace fpsys;

namespace {

SystemSpec single(std::uint64_t p, std::vector<Residue> coeffs) {
    const Field f(p);
    FpMatrix m(1, coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        m(0, i) = coeffs[i];
    }
    return SystemSpec(f, m);
}

// Direct evaluation of sum_i a_{j,i} x_i(s) - b_j(s) with plain integers.
bool naive_solves(const SystemSpec& sys, const std::vector<FpVector>& t) {
    const std::int64_t p = sys.field().p();
    for (std::size_t j = 0; j < sys.m(); ++j) {
        for (std::size_t s = 0; s < t.front().size(); ++s) {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < sys.k(); ++i) {
                acc += std::int64_t(sys.coeff(j, i)) * t[i][s];
            }
            if (sys.constants()) {
                acc -= (*sys.constants())[j][s];
            }
            if (acc % p != 0) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::vector<FpVector>> naive_solutions(const SystemSpec& sys, const PointSet& a) {
    std::vector<std::vector<FpVector>> out;
    for_each_digits(a.size(), sys.k(), [&](std::span<const std::size_t> idx) {
        std::vector<FpVector> t;
        for (std::size_t i : idx) {
            t.push_back(a[i]);
        }
        if (naive_solves(sys, t)) {
            out.push_back(std::move(t));
        }
    });
    return out;
}

std::size_t naive_distinct(const std::vector<FpVector>& t) {
    std::set<std::vector<Residue>> s;
    for (const auto& x : t) {
        s.insert(std::vector<Residue>(x.begin(), x.end()));
    }
    return s.size();
}

std::vector<Residue> flat(const std::vector<FpVector>& t) {
    std::vector<Residue> out;
    for (const auto& x : t) {
        out.insert(out.end(), x.begin(), x.end());
    }
    return out;
}

SystemSpec random_system(Rng& rng, const Field& f, std::size_t m, std::size_t k, std::size_t n, bool constants) {
    while (true) {
        FpMatrix c(m, k);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < k; ++i) {
                c(j, i) = static_cast<Residue>(uniform_below(rng, f.p()));
            }
        }
        std::optional<std::vector<FpVector>> b;
        if (constants) {
            b.emplace();
            for (std::size_t j = 0; j < m; ++j) {
                FpVector v(n);
                for (std::size_t s = 0; s < n; ++s) {
                    v[s] = static_cast<Residue>(uniform_below(rng, f.p()));
                }
                b->push_back(v);
            }
        }
        SystemSpec sys(f, c, b);
        if (sys.rank() == m) {
            return sys;
        }
    }
}

PointSet random_subset(Rng& rng, const Field& f, std::size_t n, std::size_t size) {
    auto all = all_vectors(f, n);
    shuffle_portable(all, rng);
    all.resize(std::min(size, all.size()));
    return PointSet(f, n, all);
}

// Brute-force I-interesting test: independence by span size, then a scan of A^k.
bool naive_interesting(const SystemSpec& sys, const PointSet& a, const std::vector<std::size_t>& idx,
                       const std::vector<FpVector>& on_i, std::size_t ell) {
    const Field& f = sys.field();
    std::set<std::vector<Residue>> span;
    for_each_digits(f.p(), on_i.size(), [&](std::span<const std::size_t> c) {
        FpVector v(a.n());
        for (std::size_t q = 0; q < on_i.size(); ++q) {
            v = add(f, v, scale(f, static_cast<Residue>(c[q]), on_i[q]));
        }
        span.insert(std::vector<Residue>(v.begin(), v.end()));
    });
    std::size_t expect = 1;
    for (std::size_t q = 0; q < on_i.size(); ++q) {
        expect *= f.p();
    }
    if (span.size() != expect) {
        return false;
    }
    const auto open = complement(idx, sys.k());
    const std::size_t need = ell > sys.m() + 1 ? ell - sys.m() - 1 : 0;
    bool found = false;
    for_each_digits(a.size(), open.size(), [&](std::span<const std::size_t> c) {
        std::vector<FpVector> t(sys.k());
        for (std::size_t q = 0; q < idx.size(); ++q) {
            t[idx[q]] = on_i[q];
        }
        std::vector<FpVector> rest;
        for (std::size_t q = 0; q < open.size(); ++q) {
            t[open[q]] = a[c[q]];
            rest.push_back(a[c[q]]);
        }
        if (naive_solves(sys, t) && naive_distinct(rest) >= need) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

std::size_t span_rank(const Field& f, const std::vector<FpVector>& gens) {
    std::set<std::vector<Residue>> span;
    for_each_digits(f.p(), gens.size(), [&](std::span<const std::size_t> c) {
        FpVector v(gens.front().size());
        for (std::size_t q = 0; q < gens.size(); ++q) {
            v = add(f, v, scale(f, static_cast<Residue>(c[q]), gens[q]));
        }
        span.insert(std::vector<Residue>(v.begin(), v.end()));
    });
    std::size_t r = 0;
    for (std::size_t size = 1; size < span.size(); size *= f.p()) {
        ++r;
    }
    return r;
}

// No solution spanning >= m+1 dimensions with >= ell distinct entries.
bool naive_clean(const SystemSpec& sys, const PointSet& a, std::size_t ell) {
    bool clean = true;
    for_each_digits(a.size(), sys.k(), [&](std::span<const std::size_t> d) {
        std::vector<FpVector> t;
        for (std::size_t i : d) {
            t.push_back(a[i]);
        }
        if (naive_solves(sys, t) && span_rank(sys.field(), t) >= sys.m() + 1 && naive_distinct(t) >= ell) {
            clean = false;
            return false;
        }
        return true;
    });
    return clean;
}

PointSet greedy_clean_set(const SystemSpec& sys, std::size_t n, std::size_t ell, Rng& rng) {
    const Field& f = sys.field();
    auto pts = PointSet::full_space(f, n).points();
    shuffle_portable(pts, rng);
    std::vector<FpVector> kept;
    for (const auto& x : pts) {
        kept.push_back(x);
        if (!avoids_rich_solutions(sys, PointSet(f, n, kept), ell)) {
            kept.pop_back();
        }
    }
    return PointSet(f, n, kept);
}

}  // namespace

TEST(Validate, Examples) {
    auto v = validate(single(3, {1, 1, 1}));
    EXPECT_TRUE(v.rows_sum_zero);
    EXPECT_TRUE(v.generic_minors);
    EXPECT_EQ(v.rank, 1U);

    v = validate(single(5, {1, 3, 1}));
    EXPECT_TRUE(v.rows_sum_zero);
    EXPECT_TRUE(v.generic_minors);

    v = validate(single(3, {1, 2, 0}));
    EXPECT_TRUE(v.rows_sum_zero);
    EXPECT_FALSE(v.generic_minors);
    ASSERT_EQ(v.failing_minors.size(), 1U);
    EXPECT_EQ(v.failing_minors.front(), (std::vector<std::size_t>{2}));
    EXPECT_FALSE(v.ok());
}

TEST(Validate, TwoEquationMinors) {
    const Field f(3);
    // Columns {1,2} of ((1,1,1),(1,1,2)) are dependent.
    FpMatrix m = FpMatrix::from_rows(std::vector<FpVector>{{1, 1, 1}, {1, 1, 2}}, 3);
    const SystemSpec sys(f, m);
    const auto v = validate(sys);
    EXPECT_EQ(v.rank, 2U);
    EXPECT_FALSE(v.rows_sum_zero);
    ASSERT_EQ(v.failing_minors.size(), 1U);
    EXPECT_EQ(v.failing_minors.front(), (std::vector<std::size_t>{0, 1}));
}

TEST(IsSolution, Examples) {
    const auto sys = single(3, {1, 1, 1});
    EXPECT_TRUE(is_solution(sys, std::vector<FpVector>{{0}, {1}, {2}}));
    EXPECT_FALSE(is_solution(sys, std::vector<FpVector>{{1}, {1}, {2}}));
    EXPECT_TRUE(is_solution(sys, std::vector<FpVector>{{1, 2}, {1, 2}, {1, 2}}));
    EXPECT_THROW((void)is_solution(sys, std::vector<FpVector>{{1}, {1}}), DimensionMismatch);
    EXPECT_THROW((void)is_solution(sys, std::vector<FpVector>{{1}, {1, 0}, {1}}), DimensionMismatch);
}

TEST(Enumerate, ThreeTermProgressionsInF3) {
    const auto sys = single(3, {1, 1, 1});
    const Field& f = sys.field();
    const auto a = PointSet::full_space(f, 1);
    EXPECT_EQ(count_solutions(sys, a), 9U);
    EXPECT_EQ(count_solutions(sys, a, SolutionFilter::not_all_equal()), 6U);
    EXPECT_EQ(count_solutions(sys, a, SolutionFilter::distinct()), 6U);
    std::size_t all_equal = 0;
    for (const auto& s : enumerate_solutions(sys, a)) {
        all_equal += s.all_equal ? 1 : 0;
    }
    EXPECT_EQ(all_equal, 3U);

    const PointSet b(f, 1, {FpVector{0}, FpVector{1}});
    const auto sols = enumerate_solutions(sys, b);
    ASSERT_EQ(sols.size(), 2U);
    EXPECT_TRUE(sols[0].all_equal);
    EXPECT_TRUE(sols[1].all_equal);

    const PointSet one(f, 1, {FpVector{2}});
    EXPECT_EQ(count_solutions(sys, one, SolutionFilter::distinct()), 0U);
    EXPECT_EQ(count_solutions(sys, PointSet(f, 1)), 0U);
}

TEST(Enumerate, RejectsDegenerateSystems) {
    const Field f(3);
    FpMatrix m = FpMatrix::from_rows(std::vector<FpVector>{{1, 1, 1}, {2, 2, 2}}, 3);
    const SystemSpec sys(f, m);
    EXPECT_THROW(count_solutions(sys, PointSet::full_space(f, 1)), DegenerateSystem);
}

TEST(Enumerate, MatchesNaiveScan) {
    Rng rng(99);
    for (int inst = 0; inst < 50; ++inst) {
        const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5}[uniform_below(rng, 3)];
        const Field f(p);
        const std::size_t m = 1 + uniform_below(rng, 2);
        const std::size_t k = m + 1 + uniform_below(rng, 3);
        const std::size_t n = 1 + uniform_below(rng, 2);
        const auto sys = random_system(rng, f, m, k, n, inst % 3 == 0);
        std::size_t size = 1 + uniform_below(rng, space_size(f, n));
        while (std::pow(double(size), double(k)) > 1e6) {
            --size;
        }
        const auto a = random_subset(rng, f, n, size);

        std::vector<std::vector<Residue>> got;
        for_each_solution(sys, a, SolutionFilter::any(), [&](const SolutionTuple& s) {
            got.push_back(flat(s.entries));
            EXPECT_EQ(s.distinct_count, naive_distinct(s.entries));
            EXPECT_GE(s.distinct_count, 1U);
            EXPECT_LE(s.distinct_count, k);
            EXPECT_EQ(s.all_equal, s.distinct_count == 1);
            EXPECT_LE(s.span_dim, s.distinct_count);
        });
        std::vector<std::vector<Residue>> want;
        for (const auto& t : naive_solutions(sys, a)) {
            want.push_back(flat(t));
        }
        const std::size_t before = got.size();
        std::sort(got.begin(), got.end());
        EXPECT_EQ(std::unique(got.begin(), got.end()) - got.begin(), std::ptrdiff_t(before)) << "duplicates";
        std::sort(want.begin(), want.end());
        EXPECT_EQ(got, want) << "instance " << inst;
    }
}

TEST(Enumerate, DiagonalTuplesAppearWhenRowsSumToZero) {
    const auto sys = single(5, {1, 3, 1});
    const auto a = PointSet::full_space(sys.field(), 2);
    std::set<std::vector<Residue>> diag;
    for_each_solution(sys, a, SolutionFilter::any(), [&](const SolutionTuple& s) {
        if (s.all_equal) {
            diag.insert(flat(s.entries));
        }
    });
    EXPECT_EQ(diag.size(), a.size());
}

TEST(Enumerate, FiltersAgreeWithClassification) {
    const Field f(3);
    FpMatrix m = FpMatrix::from_rows(std::vector<FpVector>{{1, 1, 1, 0, 0}, {0, 1, 2, 1, 2}}, 5);
    const SystemSpec sys(f, m);
    const auto a = PointSet::full_space(f, 1);
    const auto all = enumerate_solutions(sys, a);
    for (std::size_t ell = 1; ell <= 5; ++ell) {
        const auto n = static_cast<std::size_t>(std::count_if(
            all.begin(), all.end(), [&](const SolutionTuple& s) { return s.distinct_count >= ell; }));
        EXPECT_EQ(count_solutions(sys, a, SolutionFilter::distinct_count_at_least(ell)), n);
    }
    const auto b = PointSet::full_space(f, 2);
    const auto all2 = enumerate_solutions(sys, b);
    for (std::size_t r = 1; r <= 2; ++r) {
        const auto n = static_cast<std::size_t>(
            std::count_if(all2.begin(), all2.end(), [&](const SolutionTuple& s) { return s.span_dim >= r; }));
        EXPECT_EQ(count_solutions(sys, b, SolutionFilter::span_dim_at_least(r)), n);
    }
}

TEST(Interesting, Examples) {
    const auto sys = single(5, {1, 3, 1});
    const auto a = PointSet::full_space(sys.field(), 2);
    const std::vector<std::size_t> idx{0, 1};
    // Dependent tuple.
    EXPECT_FALSE(is_interesting(sys, a, idx, std::vector<FpVector>{{1, 0}, {2, 0}}, 3));
    // A = F_5^2 completes any independent pair; ell - m - 1 = 0.
    EXPECT_TRUE(is_interesting(sys, a, idx, std::vector<FpVector>{{1, 0}, {0, 1}}, 2));
    EXPECT_THROW(is_interesting(sys, a, std::vector<std::size_t>{0}, std::vector<FpVector>{{1, 0}}, 2),
                 std::invalid_argument);
    EXPECT_EQ(count_interesting_tuples(sys, PointSet(sys.field(), 2), idx, 3).count, 0U);
}

TEST(Interesting, CountsMatchBruteForceAndBound) {
    Rng rng(5);
    struct Case {
        SystemSpec sys;
        std::size_t n;
    };
    std::vector<Case> cases;
    cases.push_back({single(5, {1, 3, 1}), 1});
    cases.push_back({single(5, {1, 3, 1}), 2});
    cases.push_back({single(3, {1, 1, 1, 1}), 2});
    cases.push_back({single(2, {1, 1, 1, 1}), 3});
    {
        const Field f(5);
        cases.push_back({SystemSpec(f, FpMatrix::from_rows(std::vector<FpVector>{{1, 1, 1, 2}, {0, 1, 2, 1}}, 4)), 1});
    }
    std::size_t clean_sets = 0;
    for (const auto& c : cases) {
        ASSERT_TRUE(c.sys.generic_minors());
        const Field& f = c.sys.field();
        for (std::size_t ell = 1; ell <= c.sys.k(); ++ell) {
            std::vector<PointSet> sets{PointSet::full_space(f, c.n),
                                       random_subset(rng, f, c.n, std::max<std::size_t>(2, space_size(f, c.n) / 2))};
            sets.push_back(greedy_clean_set(c.sys, c.n, ell, rng));
            for (const auto& a : sets) {
                std::vector<std::size_t> idx(c.sys.m() + 1);
                for (std::size_t q = 0; q < idx.size(); ++q) {
                    idx[q] = q;
                }
                std::size_t naive = 0;
                for_each_digits(a.size(), idx.size(), [&](std::span<const std::size_t> d) {
                    std::vector<FpVector> on_i;
                    for (std::size_t i : d) {
                        on_i.push_back(a[i]);
                    }
                    const bool want = naive_interesting(c.sys, a, idx, on_i, ell);
                    EXPECT_EQ(is_interesting(c.sys, a, idx, on_i, ell), want);
                    naive += want ? 1 : 0;
                });
                const auto got = count_interesting_tuples(c.sys, a, idx, ell);
                EXPECT_EQ(got.count, naive);
                const bool clean = naive_clean(c.sys, a, ell);
                EXPECT_EQ(got.hypothesis_met, clean);
                if (clean) {
                    ++clean_sets;
                    EXPECT_TRUE(got.bound_holds);
                    EXPECT_LE(BigInt(got.count), interesting_tuple_bound(c.sys, c.n));
                }
            }
        }
    }
    EXPECT_GT(clean_sets, 10U);
}

TEST(Interesting, FullSpaceCanExceedTheCountBound) {
    // Without the standing assumption on A every independent pair is interesting.
    const auto sys = single(5, {1, 3, 1});
    const auto a = PointSet::full_space(sys.field(), 2);
    const std::vector<std::size_t> idx{0, 1};
    const auto got = count_interesting_tuples(sys, a, idx, 3);
    EXPECT_EQ(got.count, 24U * 20U);
    EXPECT_FALSE(got.hypothesis_met);
    EXPECT_FALSE(got.bound_holds);
}

TEST(Completion, PivotChoiceIsLexicographicallyFirst) {
    const Field f(3);
    const SystemSpec sys(f, FpMatrix::from_rows(std::vector<FpVector>{{0, 1, 1}}, 3));
    const CompletionPlan plan(sys, {0, 1, 2});
    EXPECT_TRUE(plan.pivot_solvable());
    EXPECT_EQ(plan.pivots(), (std::vector<std::size_t>{1}));
    const CompletionPlan stuck(sys, {0});
    EXPECT_FALSE(stuck.pivot_solvable());
}
