#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/fractiles.hpp>
#include <bitp/predicates.hpp>
#include <bitp/ratio.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bitp {

struct MiningParams {
    double alpha = 0.98;     // target precision
    double gamma = 0.55;     // recall floor for each atomic step
    double mu = 0.9;         // gamma decay per boosting round
    std::size_t kappa = 10;  // complexity cap
    std::vector<std::size_t> vocabulary;
    std::string vocabulary_tag;

    void validate(const Table& t) const
    {
        auto in_unit = [](double x) { return x > 0.0 && x <= 1.0; };
        if (!in_unit(alpha)) throw ContractError("alpha must lie in (0, 1]");
        if (!in_unit(gamma)) throw ContractError("gamma must lie in (0, 1]");
        if (!in_unit(mu)) throw ContractError("mu must lie in (0, 1]");
        if (kappa < 1) throw ContractError("kappa must be at least 1");
        if (vocabulary.empty()) throw ContractError("vocabulary is empty");
        for (std::size_t c : vocabulary) {
            if (c >= t.cols())
                throw ContractError("vocabulary column " + std::to_string(c) + " not in table");
            if (t.observable(c).range_kind == RangeKind::categorical)
                throw ContractError("vocabulary observable '" + t.observable(c).name +
                                    "' is categorical; bounds need an ordered range");
        }
    }
};

// Column indices, sorted and deduplicated.
inline std::vector<std::size_t> normalized_vocabulary(std::vector<std::size_t> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// The candidate atoms of one atomic step: for each vocabulary observable the
/// strongest lower bound and the strongest upper bound that keep both
/// Q(atom | A) >= alpha and Q(atom | B) >= gamma.
struct CandidateSets {
    std::vector<Atom> lower;
    std::vector<Atom> upper;
};

template <RowPredicate P, RowPredicate C>
CandidateSets candidate_sets(const P& premise, const C& conclusion, const Dataset& d,
                             const MiningParams& params, FractileCache* cache = nullptr)
{
    const Dataset given_a = d.condition(premise);
    const Dataset given_b = d.condition(conclusion);
    if (given_a.empty()) throw ContractError("premise has zero support in the dataset");
    if (given_b.empty()) throw ContractError("conclusion has zero support in the dataset");

    auto sorted = [&](const Dataset& sub, std::size_t v) {
        return cache ? cache->get(sub, v) : std::make_shared<const SortedColumn>(sub, v);
    };

    CandidateSets out;
    out.lower.reserve(params.vocabulary.size());
    out.upper.reserve(params.vocabulary.size());
    for (std::size_t v : params.vocabulary) {
        const auto on_a = sorted(given_a, v);
        const auto on_b = sorted(given_b, v);
        out.lower.push_back(
            Atom{v, Relation::ge, std::min(on_a->lower(params.alpha), on_b->lower(params.gamma))});
        out.upper.push_back(
            Atom{v, Relation::le, std::max(on_a->upper(params.alpha), on_b->upper(params.gamma))});
    }
    return out;
}

/// An atom with its counts on the dataset it was scored against.
struct ScoredAtom {
    Atom atom;
    std::uint64_t support = 0;         // rows satisfying the atom
    std::uint64_t true_positives = 0;  // rows satisfying atom and conclusion

    [[nodiscard]] Ratio precision() const { return Ratio{true_positives, support}; }
};

// Selection order for "argmax precision": higher precision, then smaller
// support, then lower column index, then `le` before `ge`.
inline bool preferred(const ScoredAtom& a, const ScoredAtom& b)
{
    if (auto c = a.precision() <=> b.precision(); c != 0) return c > 0;
    if (a.support != b.support) return a.support < b.support;
    if (a.atom.observable != b.atom.observable) return a.atom.observable < b.atom.observable;
    return a.atom.relation == Relation::le && b.atom.relation != Relation::le;
}

template <RowPredicate C>
ScoredAtom score(const Atom& atom, const C& conclusion, const Dataset& d)
{
    ScoredAtom s{atom};
    for (RowIndex r : d.rows()) {
        if (!atom.holds(d.table(), r)) continue;
        ++s.support;
        s.true_positives += conclusion.holds(d.table(), r) ? 1 : 0;
    }
    return s;
}

/// AtomicInterp: the candidate in L u U with maximal precision Q(B | atom).
///
/// Requires Q(A) > 0 and Q(B) > 0 on `d`. Candidates with zero support are
/// skipped; if none remain, NoCandidate is thrown.
template <RowPredicate P, RowPredicate C>
ScoredAtom atomic_interp_scored(const P& premise, const C& conclusion, const Dataset& d,
                                const MiningParams& params, FractileCache* cache = nullptr)
{
    params.validate(d.table());
    const CandidateSets cands = candidate_sets(premise, conclusion, d, params, cache);

    std::optional<ScoredAtom> best;
    auto consider = [&](const Atom& a) {
        ScoredAtom s = score(a, conclusion, d);
        if (s.support == 0) return;
        if (!best || preferred(s, *best)) best = s;
    };
    for (const Atom& a : cands.upper) consider(a);
    for (const Atom& a : cands.lower) consider(a);
    if (!best) throw NoCandidate("every candidate bound has zero support");
    return *best;
}

template <RowPredicate P, RowPredicate C>
Atom atomic_interp(const P& premise, const C& conclusion, const Dataset& d,
                   const MiningParams& params, FractileCache* cache = nullptr)
{
    return atomic_interp_scored(premise, conclusion, d, params, cache).atom;
}

enum class Termination { precision_met, complexity_cap, stagnation };

inline std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::precision_met: return "precision_met";
    case Termination::complexity_cap: return "complexity_cap";
    case Termination::stagnation: return "stagnation";
    }
    return "?";
}

// One boosting round. Precision and recall are measured on the original
// dataset after conjoining `atom`.
struct RoundRecord {
    Atom atom;
    Ratio precision;
    Ratio recall;
    std::size_t surviving_rows = 0;
    std::size_t surviving_positives = 0;
    double gamma = 0.0;
    bool conjoined = true;  // false for the round that triggered stagnation
};

struct InterpolantReport {
    Conjunction interpolant;
    Ratio train_precision;
    Ratio train_recall;
    std::size_t complexity = 0;
    std::vector<RoundRecord> trace;
    Termination termination = Termination::precision_met;
    std::string diagnostic;
};

/// ConjInterp: conjoin atomic interpolants until Q(B | I) >= alpha or
/// |I| = kappa, shrinking the working dataset to D|I and decaying gamma by
/// mu after each round.
///
/// A round whose atom removes no rows from the working set ends the loop
/// with Termination::stagnation and the atom is not conjoined. Reported
/// precision and recall are computed against the dataset passed in.
template <RowPredicate P, RowPredicate C>
InterpolantReport conj_interp(const P& premise, const C& conclusion, const Dataset& d,
                              const MiningParams& params, FractileCache* cache = nullptr)
{
    params.validate(d.table());
    const std::size_t positives = d.count(conclusion);
    if (d.count(premise) == 0) throw ContractError("premise has zero support in the dataset");
    if (positives == 0) throw ContractError("conclusion has zero support in the dataset");

    InterpolantReport report;
    Dataset working = d;
    MiningParams round = params;

    for (;;) {
        const std::size_t working_positives = working.count(conclusion);
        if (Ratio{working_positives, working.size()}.at_least(params.alpha)) {
            report.termination = Termination::precision_met;
            break;
        }
        if (report.interpolant.complexity() >= params.kappa) {
            report.termination = Termination::complexity_cap;
            break;
        }
        if (working_positives == 0 || working.count(premise) == 0) {
            report.termination = Termination::stagnation;
            report.diagnostic = working_positives == 0
                                    ? "conclusion has no support in the filtered data"
                                    : "premise has no support in the filtered data";
            break;
        }

        ScoredAtom chosen;
        try {
            // Only the unfiltered first round has row sets worth caching.
            chosen = atomic_interp_scored(premise, conclusion, working, round,
                                          report.trace.empty() ? cache : nullptr);
        } catch (const NoCandidate& e) {
            report.termination = Termination::stagnation;
            report.diagnostic = e.what();
            break;
        }

        if (chosen.support == working.size()) {
            report.trace.push_back(RoundRecord{chosen.atom,
                                               Ratio{working_positives, working.size()},
                                               Ratio{working_positives, positives},
                                               working.size(), working_positives, round.gamma,
                                               false});
            report.termination = Termination::stagnation;
            report.diagnostic = "round " + std::to_string(report.trace.size()) +
                                ": chosen atom removes no rows";
            break;
        }

        report.interpolant = conjoin(std::move(report.interpolant), chosen.atom);
        working = working.condition(chosen.atom);
        report.trace.push_back(RoundRecord{chosen.atom, chosen.precision(),
                                           Ratio{chosen.true_positives, positives},
                                           working.size(), chosen.true_positives, round.gamma,
                                           true});
        round.gamma *= params.mu;
    }

    const std::size_t kept_positives = working.count(conclusion);
    report.train_precision = Ratio{kept_positives, working.size()};
    report.train_recall = Ratio{kept_positives, positives};
    report.complexity = report.interpolant.complexity();
    return report;
}

}  // namespace bitp
