#pragma once

// Brute-force reference for the atomic search. Shares no code with the
// fractile or candidate-construction path: every threshold is checked by
// direct counting over the rows.

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/miner.hpp>
#include <bitp/predicates.hpp>
#include <bitp/ratio.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

namespace bitp {

enum class OracleMode {
    // For each (observable, relation) only the tightest threshold meeting both
    // constraints: the same candidate space as the fractile construction.
    restricted,
    // Every threshold meeting both constraints.
    global,
};

struct OracleResult {
    Atom atom;
    std::uint64_t support = 0;
    std::uint64_t true_positives = 0;
    std::size_t feasible = 0;  // candidates that met both constraints

    [[nodiscard]] Ratio precision() const { return Ratio{true_positives, support}; }
};

template <RowPredicate P, RowPredicate C>
OracleResult oracle_atomic_scored(const P& premise, const C& conclusion, const Dataset& d,
                                  const MiningParams& params, OracleMode mode)
{
    params.validate(d.table());
    const Table& t = d.table();
    std::vector<std::size_t> a_rows, b_rows;
    for (RowIndex r : d.rows()) {
        if (premise.holds(t, r)) a_rows.push_back(r);
        if (conclusion.holds(t, r)) b_rows.push_back(r);
    }
    if (a_rows.empty() || b_rows.empty())
        throw ContractError("oracle requires nonzero premise and conclusion support");

    auto fraction_at_least = [&](const std::vector<std::size_t>& rows, const Atom& a, double p) {
        std::uint64_t n = 0;
        for (std::size_t r : rows) n += a.holds(t, r) ? 1 : 0;
        return Ratio{n, rows.size()}.at_least(p);
    };

    // Preference: higher precision (cross-multiplied), then the smallest
    // (support, column, relation) tuple with le ranked before ge.
    std::optional<OracleResult> best;
    std::size_t feasible = 0;
    auto offer = [&](const Atom& a) {
        OracleResult cand{a};
        for (RowIndex r : d.rows()) {
            if (!a.holds(t, r)) continue;
            ++cand.support;
            if (conclusion.holds(t, r)) ++cand.true_positives;
        }
        if (cand.support == 0) return;
        if (!best) {
            best = cand;
            return;
        }
        const auto lhs = static_cast<unsigned __int128>(cand.true_positives) * best->support;
        const auto rhs = static_cast<unsigned __int128>(best->true_positives) * cand.support;
        const int rel_rank_c = cand.atom.relation == Relation::le ? 0 : 1;
        const int rel_rank_b = best->atom.relation == Relation::le ? 0 : 1;
        if (lhs > rhs ||
            (lhs == rhs && std::tuple(cand.support, cand.atom.observable, rel_rank_c) <
                               std::tuple(best->support, best->atom.observable, rel_rank_b)))
            best = cand;
    };

    for (std::size_t v : params.vocabulary) {
        std::vector<double> thresholds;
        for (RowIndex r : d.rows()) thresholds.push_back(t.value(r, v));
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
        for (Relation rel : {Relation::le, Relation::ge}) {
            std::optional<double> tightest;
            for (double c : thresholds) {
                const Atom a{v, rel, c};
                if (!fraction_at_least(a_rows, a, params.alpha)) continue;
                if (!fraction_at_least(b_rows, a, params.gamma)) continue;
                if (mode == OracleMode::global) {
                    ++feasible;
                    offer(a);
                    continue;
                }
                if (!tightest || (rel == Relation::le ? c < *tightest : c > *tightest))
                    tightest = c;
            }
            if (mode == OracleMode::restricted && tightest) {
                ++feasible;
                offer(Atom{v, rel, *tightest});
            }
        }
    }
    if (!best) throw NoCandidate("oracle found no feasible candidate with nonzero support");
    best->feasible = feasible;
    return *best;
}

template <RowPredicate P, RowPredicate C>
Atom oracle_atomic(const P& premise, const C& conclusion, const Dataset& d,
                   const MiningParams& params, OracleMode mode = OracleMode::restricted)
{
    return oracle_atomic_scored(premise, conclusion, d, params, mode).atom;
}

}  // namespace bitp
