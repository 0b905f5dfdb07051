#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fpsys/linear_system.hpp"
#include "fpsys/sampling.hpp"
#include "fpsys/search.hpp"
#include "fpsys/slice_rank.hpp"
#include "fpsys/weight.hpp"

namespace fpsys {

using Json = nlohmann::ordered_json;

/// Vectors appear as their coordinates separated by spaces, e.g. "0 1 2".
inline Json to_json(const FpVector& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) {
            s += ' ';
        }
        s += std::to_string(x[i]);
    }
    return s;
}

inline Json to_json(std::span<const FpVector> xs) {
    Json a = Json::array();
    for (const auto& x : xs) {
        a.push_back(to_json(x));
    }
    return a;
}

/// Index lists are printed 1-based.
inline Json indices_json(std::span<const std::size_t> idx) {
    Json a = Json::array();
    for (std::size_t i : idx) {
        a.push_back(i + 1);
    }
    return a;
}

inline Json to_json(const Subspace& u) {
    return Json{{"dim", u.dim()}, {"basis", to_json(u.basis_vectors())}};
}

inline Json to_json(const ValidationReport& r) {
    Json failing = Json::array();
    for (const auto& cols : r.failing_minors) {
        failing.push_back(indices_json(cols));
    }
    return Json{{"rows_sum_zero", r.rows_sum_zero},
                {"generic_minors", r.generic_minors},
                {"rank", r.rank},
                {"failing_minors", failing},
                {"ok", r.ok()}};
}

inline Json to_json(const SolutionTuple& s) {
    return Json{{"entries", to_json(s.entries)},
                {"distinct_count", s.distinct_count},
                {"span_dim", s.span_dim},
                {"all_equal", s.all_equal}};
}

inline Json to_json(const WeightReport& w) {
    Json admissible = Json::array();
    for (const auto& a : w.admissible) {
        admissible.push_back(Json{{"indices", indices_json(a.indices)},
                                  {"line_count", a.line_count},
                                  {"weight", a.weight}});
    }
    Json partition = Json::array();
    for (const auto& b : w.partition) {
        partition.push_back(Json{{"indices", indices_json(b.indices)}, {"line", to_json(b.line.direction)}});
    }
    Json j{{"k", w.k},
           {"omega", w.omega},
           {"chosen_I", indices_json(w.chosen)},
           {"chosen_span", to_json(w.chosen_span)},
           {"partition", partition}};
    if (w.admissible_listed) {
        j["admissible"] = admissible;
    }
    return j;
}

inline Json to_json(const WeightProperties& p) {
    return Json{{"omega", p.omega},
                {"chosen_size", p.chosen_size},
                {"span_dim", p.span_dim},
                {"omega_allowed", p.omega_allowed},
                {"chosen_size_matches", p.chosen_size_matches},
                {"span_dim_bound", p.span_dim_bound},
                {"all_hold", p.all_hold()}};
}

inline Json to_json(const PartitionReport& r) {
    Json blocks = Json::array();
    for (const auto& b : r.blocks) {
        blocks.push_back(Json{{"indices", indices_json(b.indices)}, {"line", to_json(b.line.direction)}});
    }
    Json j{{"chosen_I", indices_json(r.chosen)},
           {"t", r.t()},
           {"line_term", r.line_term},
           {"blocks", blocks},
           {"blocks_at_least_two", r.blocks_at_least_two},
           {"lines_distinct", r.lines_distinct},
           {"lemma_holds", r.lemma_holds()}};
    if (r.singleton_index) {
        j["singleton_index"] = *r.singleton_index + 1;
    }
    return j;
}

inline Json to_json(const GammaResult& g) {
    return Json{{"gamma", g.gamma},
                {"z_star", g.z_star},
                {"iterations", g.iterations},
                {"tolerance", g.tolerance},
                {"boundary", g.boundary}};
}

inline Json to_json(const MonomialCountResult& r) {
    return Json{{"count", r.count.str()}, {"threshold", r.threshold}, {"bound", r.bound}, {"holds", r.holds}};
}

inline Json to_json(const SliceRankResult& r) {
    Json slices = Json::array();
    for (std::size_t s : r.assignment) {
        slices.push_back(s + 1);
    }
    return Json{{"slice_rank", r.rank}, {"assignment", slices}, {"nodes", r.nodes}};
}

inline Json to_json(const IdentityReport& r) {
    Json j{{"evaluated", r.evaluated}, {"mismatches", r.mismatches}, {"exhaustive", r.exhaustive}, {"ok", r.ok()}};
    if (r.first_mismatch) {
        j["first_mismatch"] = indices_json(*r.first_mismatch);
    }
    return j;
}

inline Json to_json(const PartitionedBoundReport& r) {
    Json j{{"L", r.family_size},
           {"bound", r.bound},
           {"hypothesis_met", r.hypothesis_met},
           {"cross_solutions", r.cross_solutions},
           {"bound_holds", r.bound_holds}};
    if (r.witness) {
        j["witness"] = indices_json(*r.witness);
    }
    return j;
}

inline Json rational_json(const Rational& q) {
    return Json{{"value", boost::multiprecision::numerator(q).str() + "/" +
                              boost::multiprecision::denominator(q).str()},
                {"approx", to_double(q)}};
}

inline Json to_json(const ContainmentVerification& v) {
    return Json{{"exact", rational_json(v.probability.exact)},
                {"upper", rational_json(v.probability.upper)},
                {"exhaustive", v.exhaustive},
                {"trials", v.trials},
                {"hits", v.hits},
                {"frequency", v.frequency},
                {"sigma", v.sigma},
                {"agrees", v.agrees}};
}

inline Json to_json(const SamplingStepReport& r) {
    return Json{{"d", r.d},
                {"subspace", to_json(r.v)},
                {"kept", r.kept},
                {"offending", r.offending},
                {"vectors_deleted", r.vectors_deleted},
                {"surviving", r.surviving},
                {"target", r.target},
                {"deleted", to_json(r.deleted)},
                {"a_star", to_json(r.a_star.points())},
                {"certificate_offending", r.certificate_offending},
                {"certificate_ok", r.certificate_ok()}};
}

inline Json to_json(const WeightCountReport& r) {
    return Json{{"w", r.w},
                {"r", r.r},
                {"count", r.count},
                {"weight_w_total", r.weight_w},
                {"gamma", r.gamma},
                {"bound", r.bound},
                {"bound_holds", r.bound_holds},
                {"dimension_claim", r.dimension_claim},
                {"chosen_size_claim", r.chosen_size_claim}};
}

inline Json to_json(const DisjointFamilyReport& r) {
    Json fam = Json::array();
    for (const auto& t : r.family) {
        fam.push_back(to_json(t));
    }
    return Json{{"L", r.size()},
                {"family", fam},
                {"qualifying", r.qualifying},
                {"gamma", r.gamma},
                {"bound", r.bound},
                {"bound_holds", r.bound_holds},
                {"maximal", r.maximal}};
}

/// elapsed_ms is included only when requested, so runs can be compared byte for byte.
inline Json to_json(const SearchResult& r, bool with_time) {
    Json j{{"best_size", r.best_size},
           {"optimal", r.optimal},
           {"nodes", r.nodes},
           {"witness", to_json(r.witness.points())},
           {"witness_verified", r.witness_verified}};
    if (with_time) {
        j["elapsed_ms"] = r.elapsed_ms;
    }
    return j;
}

inline Json to_json(const TheoremBoundReport& r) {
    Json j{{"theorem", to_string(r.theorem)},
           {"n", r.n},
           {"universe_size", r.universe_size},
           {"best_size", r.best_size},
           {"optimal", r.optimal},
           {"bound_holds", r.bound_holds},
           {"witness_verified", r.witness_verified},
           {"note", r.note}};
    if (r.bound) {
        j["bound"] = *r.bound;
        j["margin"] = *r.margin();
    }
    if (r.full_space_solution) {
        j["full_space_solution"] = to_json(*r.full_space_solution);
    }
    return j;
}

}  // namespace fpsys
