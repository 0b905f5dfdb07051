#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "fpsys/fpsys.hpp"

using namespace fpsys;

namespace {

SystemSpec single(std::uint64_t p, std::vector<Residue> coeffs) {
    FpMatrix m(1, coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        m(0, i) = coeffs[i];
    }
    return SystemSpec(Field(p), m);
}

bool naive_solves(const SystemSpec& sys, const std::vector<FpVector>& t) {
    for (std::size_t s = 0; s < t.front().size(); ++s) {
        for (std::size_t j = 0; j < sys.m(); ++j) {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < sys.k(); ++i) {
                acc += std::int64_t(sys.coeff(j, i)) * t[i][s];
            }
            if (acc % std::int64_t(sys.field().p()) != 0) {
                return false;
            }
        }
    }
    return true;
}

template <class Visit>
void naive_tuples(const PointSet& a, std::size_t k, Visit&& visit) {
    for_each_digits(a.size(), k, [&](std::span<const std::size_t> idx) {
        std::vector<FpVector> t;
        for (std::size_t i : idx) {
            t.push_back(a[i]);
        }
        visit(t);
    });
}

std::size_t span_size(const Field& f, const std::vector<FpVector>& gens) {
    std::set<std::uint64_t> out;
    for_each_digits(f.p(), gens.size(), [&](std::span<const std::size_t> c) {
        FpVector v(gens.front().size());
        for (std::size_t i = 0; i < gens.size(); ++i) {
            v = add(f, v, scale(f, static_cast<Residue>(c[i]), gens[i]));
        }
        out.insert(encode(f, v));
    });
    return out.size();
}

// Structures of A left inside `domain` for the distinct step, by brute force.
std::size_t naive_interesting_in(const SystemSpec& sys, const PointSet& a, const PointSet& domain, std::size_t ell) {
    const Field& f = sys.field();
    const std::size_t k = sys.k();
    const std::size_t m = sys.m();
    std::size_t count = 0;
    for_each_combination(k, m + 1, [&](std::span<const std::size_t> idx_span) {
        const std::vector<std::size_t> idx(idx_span.begin(), idx_span.end());
        const auto open = complement(idx, k);
        naive_tuples(domain, m + 1, [&](const std::vector<FpVector>& on_i) {
            std::size_t full = 1;
            for (std::size_t q = 0; q <= m; ++q) {
                full *= f.p();
            }
            if (span_size(f, on_i) != full) {
                return;
            }
            bool found = false;
            naive_tuples(a, open.size(), [&](const std::vector<FpVector>& rest) {
                if (found) {
                    return;
                }
                std::vector<FpVector> t(k);
                for (std::size_t q = 0; q <= m; ++q) {
                    t[idx[q]] = on_i[q];
                }
                for (std::size_t q = 0; q < open.size(); ++q) {
                    t[open[q]] = rest[q];
                }
                std::set<std::uint64_t> d;
                for (const auto& x : rest) {
                    d.insert(encode(f, x));
                }
                if (naive_solves(sys, t) && d.size() + m + 1 >= ell) {
                    found = true;
                }
            });
            count += found ? 1 : 0;
        });
    });
    return count;
}

void check_step_shape(const SamplingStepReport& r, const PointSet& a) {
    EXPECT_EQ(r.v.dim(), r.d);
    EXPECT_EQ(r.kept, a.intersect(r.v).size());
    EXPECT_EQ(r.surviving, r.a_star.size());
    EXPECT_EQ(r.vectors_deleted, r.deleted.size());
    EXPECT_TRUE(r.count_invariant());
    std::set<std::uint64_t> deleted;
    for (const auto& x : r.deleted) {
        EXPECT_TRUE(r.v.contains(x));
        EXPECT_TRUE(a.contains(x));
        deleted.insert(encode(a.field(), x));
    }
    EXPECT_EQ(deleted.size(), r.deleted.size());
    for (const auto& x : r.a_star.points()) {
        EXPECT_TRUE(r.v.contains(x));
        EXPECT_TRUE(a.contains(x));
        EXPECT_EQ(deleted.count(encode(a.field(), x)), 0U);
    }
}

}  // namespace

TEST(Containment, Examples) {
    auto c = containment_probability(2, 3, 2, 1);
    EXPECT_EQ(c.exact, Rational(3, 7));
    EXPECT_EQ(c.upper, Rational(1, 2));
    EXPECT_EQ(containment_probability(2, 3, 2, 2).exact, Rational(1, 7));
    EXPECT_EQ(containment_probability(3, 3, 1, 2).exact, 0);
    EXPECT_EQ(containment_probability(5, 3, 3, 3).exact, 1);
    EXPECT_THROW(containment_probability(2, 3, 4, 1), std::invalid_argument);
    EXPECT_THROW(containment_probability(2, 3, 2, 0), std::invalid_argument);
    EXPECT_THROW(containment_probability(2, 3, 2, 4), std::invalid_argument);
}

TEST(Containment, ExhaustiveAgreesOnGrid) {
    for (auto [p, nmax] : std::vector<std::pair<std::uint64_t, std::size_t>>{{2, 4}, {3, 3}}) {
        for (std::size_t n = 1; n <= nmax; ++n) {
            for (std::size_t d = 0; d <= n; ++d) {
                for (std::size_t s = 1; s <= n; ++s) {
                    const auto v = verify_containment(p, n, d, s, 0, 0, true);
                    EXPECT_TRUE(v.exhaustive);
                    EXPECT_EQ(Rational(v.hits, v.trials), v.probability.exact) << p << n << d << s;
                    EXPECT_TRUE(v.agrees);
                    EXPECT_LE(v.probability.exact, v.probability.upper);
                }
            }
        }
    }
}

TEST(Containment, ExactNeverExceedsUpper) {
    for (std::uint64_t p : {2U, 3U, 5U, 7U}) {
        for (std::size_t n = 1; n <= 8; ++n) {
            for (std::size_t d = 0; d <= n; ++d) {
                for (std::size_t s = 1; s <= n; ++s) {
                    const auto c = containment_probability(p, n, d, s);
                    EXPECT_LE(c.exact, c.upper);
                    EXPECT_GE(c.exact, 0);
                }
            }
        }
    }
}

TEST(Containment, MonteCarloWithinThreeSigma) {
    const auto v = verify_containment(2, 3, 2, 1, 100000, 42, false);
    EXPECT_FALSE(v.exhaustive);
    EXPECT_EQ(v.trials, 100000U);
    EXPECT_TRUE(v.agrees);
    EXPECT_LE(std::fabs(v.frequency - 3.0 / 7.0), 3 * v.sigma);
}

TEST(Containment, MonteCarloIndependentOfThreads) {
    const auto a = verify_containment(3, 3, 2, 1, 20000, 7, false, 1);
    const auto b = verify_containment(3, 3, 2, 1, 20000, 7, false, 4);
    EXPECT_EQ(a.hits, b.hits);
    const auto c = verify_containment(3, 3, 2, 1, 20000, 8, false, 1);
    EXPECT_NE(a.hits, c.hits);
}

TEST(Sampling, ExpectedIntersectionSize) {
    const Field f(3);
    const auto a = PointSet::full_space(f, 3, true);
    const Rational e = expected_intersection_size(a, 2);
    EXPECT_EQ(e, Rational(26 * 8, 26));
    Rng rng(1);
    const int trials = 1000;
    double sum = 0;
    double sq = 0;
    for (int t = 0; t < trials; ++t) {
        const double x = double(a.intersect(random_subspace(f, 3, 2, rng)).size());
        sum += x;
        sq += x * x;
    }
    const double mean = sum / trials;
    // |A cap V| is always 8 here; use a set where it varies as well.
    EXPECT_NEAR(mean, to_double(e), 1e-12);
    (void)sq;

    const PointSet b(f, 3, {FpVector{1, 0, 0}, FpVector{0, 1, 0}, FpVector{1, 1, 1}, FpVector{2, 0, 1}});
    const double eb = to_double(expected_intersection_size(b, 2));
    EXPECT_NEAR(eb, 4.0 * 8.0 / 26.0, 1e-12);
    sum = 0;
    sq = 0;
    for (int t = 0; t < trials; ++t) {
        const double x = double(b.intersect(random_subspace(f, 3, 2, rng)).size());
        sum += x;
        sq += x * x;
    }
    const double mb = sum / trials;
    const double sd = std::sqrt(std::max(0.0, sq / trials - mb * mb));
    EXPECT_LE(std::fabs(mb - eb), 3 * sd / std::sqrt(double(trials)));
}

TEST(Sampling, ProofDimensionHelpers) {
    EXPECT_EQ(proof_dimension_distinct(0.5, 10, 1), 5);
    EXPECT_EQ(proof_dimension_distinct(0.25, 10, 2), 3);
    // Far from desk range for small n; grows with n.
    const double g = gamma(3, 1, 3).gamma;
    EXPECT_LT(proof_dimension_weight(3, g, 10, 3), 1);
    EXPECT_LT(proof_dimension_weight(3, g, 1000, 3), proof_dimension_weight(3, g, 2000, 3));
}

TEST(Sampling, DistinctStepCertificates) {
    const auto sys = single(3, {1, 1, 1});
    const auto a = PointSet::full_space(sys.field(), 3, true);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(derive_seed(seed, 0));
        const auto r = sampling_step_distinct(sys, a, 3, 2, rng);
        check_step_shape(r, a);
        EXPECT_TRUE(r.certificate_ok());
        EXPECT_EQ(naive_interesting_in(sys, a, r.a_star, 3), 0U);
        EXPECT_EQ(naive_interesting_in(sys, a, a.intersect(r.v), 3), r.offending);
    }
}

TEST(Sampling, DistinctStepFullDimensionMatchesGlobalScan) {
    const auto sys = single(5, {1, 3, 1});
    const auto a = PointSet(sys.field(), 2, {FpVector{1, 0}, FpVector{0, 1}, FpVector{1, 1}, FpVector{2, 3},
                                             FpVector{4, 4}, FpVector{3, 0}});
    Rng rng(9);
    const auto r = sampling_step_distinct(sys, a, 3, 2, rng);
    EXPECT_EQ(r.kept, a.size());
    std::size_t global = 0;
    for_each_combination(3, 2, [&](std::span<const std::size_t> idx) {
        global += count_interesting_tuples(sys, a, idx, 3).count;
    });
    EXPECT_EQ(r.offending, global);
    EXPECT_EQ(r.offending, naive_interesting_in(sys, a, a, 3));
    EXPECT_TRUE(r.certificate_ok());
}

TEST(Sampling, DistinctStepNeedsGenericSystem) {
    const auto sys = single(3, {1, 2, 0});
    const auto a = PointSet::full_space(sys.field(), 2, true);
    Rng rng(0);
    EXPECT_THROW(sampling_step_distinct(sys, a, 3, 1, rng), HypothesisViolation);
    EXPECT_THROW(sampling_step_distinct(single(3, {1, 1, 1}), a, 3, 3, rng), std::invalid_argument);
}

TEST(Sampling, EmptyIntersection) {
    const auto sys = single(3, {1, 1, 1});
    const PointSet a(sys.field(), 2, {FpVector{1, 0}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto r = sampling_step_weight(sys, a, 1, 1, rng);
        if (r.kept == 0) {
            EXPECT_EQ(r.offending, 0U);
            EXPECT_EQ(r.surviving, 0U);
            EXPECT_EQ(r.vectors_deleted, 0U);
            return;
        }
    }
    FAIL() << "no sampled line missed (1,0)";
}

TEST(Sampling, WeightStepCertificates) {
    const auto sys = single(3, {1, 1, 1});
    const auto a = PointSet::full_space(sys.field(), 3, true);
    const std::size_t k = 3;
    for (std::size_t w : {1U, 2U, 3U, 5U, 6U}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            Rng rng(derive_seed(seed, w));
            const auto r = sampling_step_weight(sys, a, w, 2, rng);
            check_step_shape(r, a);
            EXPECT_TRUE(r.certificate_ok());
            std::size_t residue = 0;
            std::size_t offending = 0;
            const auto kept = a.intersect(r.v);
            naive_tuples(kept, k, [&](const std::vector<FpVector>& t) {
                if (naive_solves(sys, t) && weight(sys.field(), t, 0).omega == w) {
                    ++offending;
                }
            });
            naive_tuples(r.a_star, k, [&](const std::vector<FpVector>& t) {
                if (naive_solves(sys, t) && weight(sys.field(), t, 0).omega == w) {
                    ++residue;
                }
            });
            EXPECT_EQ(r.offending, offending);
            EXPECT_EQ(residue, 0U);
        }
    }
}

TEST(Sampling, WeightStepWithoutWeightWSolutionsKeepsEverything) {
    const auto sys = single(3, {1, 1, 1});
    const auto a = PointSet::full_space(sys.field(), 2, true);
    Rng rng(4);
    // omega = 8 = 2(k+1) is impossible for k = 3.
    const auto r = sampling_step_weight(sys, a, 8, 1, rng);
    EXPECT_EQ(r.offending, 0U);
    EXPECT_EQ(r.surviving, r.kept);
    EXPECT_THROW(sampling_step_weight(sys, PointSet::full_space(sys.field(), 2), 1, 1, rng), std::invalid_argument);
}

TEST(Sampling, WeightCountsMatchNaiveScan) {
    const auto sys = single(3, {1, 1, 1});
    const Field& f = sys.field();
    const auto a = PointSet::full_space(f, 2, true);
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> naive;  // (w, r) -> count
    naive_tuples(a, 3, [&](const std::vector<FpVector>& t) {
        if (!naive_solves(sys, t)) {
            return;
        }
        std::size_t size = span_size(f, t);
        std::size_t r = 0;
        for (std::size_t s = 1; s < size; s *= 3) {
            ++r;
        }
        ++naive[{weight(f, t, 0).omega, r}];
    });
    for (std::size_t w = 1; w <= 12; ++w) {
        for (std::size_t r = w / 4 + 1; r <= 3; ++r) {
            const auto rep = count_weight_solutions(sys, a, w, r);
            const auto it = naive.find({w, r});
            EXPECT_EQ(rep.count, it == naive.end() ? 0U : it->second) << "w=" << w << " r=" << r;
            EXPECT_TRUE(rep.bound_holds);
            EXPECT_TRUE(rep.dimension_claim);
            EXPECT_TRUE(rep.chosen_size_claim);
        }
    }
    EXPECT_THROW(count_weight_solutions(sys, a, 5, 1), std::invalid_argument);
}

TEST(Sampling, DisjointFamiliesAreMaximalAndBounded) {
    for (std::size_t k : {3U, 4U}) {
        const auto sys = single(3, std::vector<Residue>(k, 1));
        const Field& f = sys.field();
        const auto a = PointSet::full_space(f, 2, true);
        std::set<std::tuple<std::size_t, std::vector<std::size_t>, std::vector<std::uint64_t>>> seen;
        std::size_t runs = 0;
        for_each_solution(sys, a, SolutionFilter::any(), [&](const SolutionTuple& s) {
            const auto wr = weight(f, s.entries, 0);
            std::vector<FpVector> fixed;
            std::vector<std::uint64_t> codes;
            for (std::size_t i : wr.chosen) {
                fixed.push_back(s.entries[i]);
                codes.push_back(encode(f, s.entries[i]));
            }
            if (!seen.insert({wr.omega, wr.chosen, codes}).second || runs >= 40) {
                return;
            }
            ++runs;
            const auto rep = max_disjoint_span_family(sys, a, wr.chosen, fixed, wr.omega);
            EXPECT_GE(rep.size(), 1U);
            EXPECT_GE(rep.qualifying, rep.size());
            EXPECT_TRUE(rep.maximal);
            EXPECT_TRUE(rep.bound_holds);
            // Pairwise disjoint line sets modulo span(fixed).
            const Subspace u = Subspace::span(f, fixed, 2);
            std::set<std::vector<Residue>> used;
            for (const auto& t : rep.family) {
                std::set<std::vector<Residue>> mine;
                for (std::size_t j : complement(wr.chosen, k)) {
                    const auto l = quotient_line(t[j], u).direction;
                    mine.insert(std::vector<Residue>(l.begin(), l.end()));
                }
                for (const auto& l : mine) {
                    EXPECT_EQ(used.count(l), 0U);
                }
                used.insert(mine.begin(), mine.end());
            }
        });
        EXPECT_GT(runs, 0U);
    }
}

TEST(Sampling, DisjointFamilyWithoutQualifyingSolutions) {
    const auto sys = single(3, {1, 1, 1});
    const auto a = PointSet::full_space(sys.field(), 2, true);
    const std::vector<std::size_t> idx{};
    const std::vector<FpVector> fixed{};
    const auto rep = max_disjoint_span_family(sys, a, idx, fixed, 2);
    EXPECT_EQ(rep.size(), 0U);
    EXPECT_EQ(rep.qualifying, 0U);
    EXPECT_TRUE(rep.bound_holds);
}
