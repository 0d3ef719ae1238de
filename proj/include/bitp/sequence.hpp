#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/fractiles.hpp>
#include <bitp/miner.hpp>
#include <bitp/parallel.hpp>
#include <bitp/predicates.hpp>

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bitp {

/// Which input observables each intermediate observable can depend on.
/// Supplied as data (derived from the model's geometry elsewhere).
class DependencyMap {
public:
    DependencyMap() = default;
    explicit DependencyMap(std::map<std::string, std::vector<std::string>> entries)
        : entries_(std::move(entries))
    {
    }

    [[nodiscard]] const std::map<std::string, std::vector<std::string>>& entries() const noexcept
    {
        return entries_;
    }
    [[nodiscard]] bool contains(std::string_view name) const
    {
        return entries_.find(std::string(name)) != entries_.end();
    }

    // Column indices of the inputs `intermediate` depends on. Every name must
    // be an observable of `input_layer`.
    [[nodiscard]] std::vector<std::size_t> inputs_of(const Table& t, std::string_view intermediate,
                                                     std::string_view input_layer) const
    {
        auto it = entries_.find(std::string(intermediate));
        if (it == entries_.end())
            throw ContractError("dependency map has no entry for '" + std::string(intermediate) + "'");
        if (it->second.empty())
            throw ContractError("dependency map entry for '" + it->first + "' is empty");
        std::vector<std::size_t> cols;
        for (const auto& name : it->second) {
            const std::size_t c = t.index_of(name);
            if (t.observable(c).layer_tag != input_layer)
                throw ContractError("'" + name + "' in the entry for '" + it->first +
                                    "' is not in layer '" + std::string(input_layer) + "'");
            cols.push_back(c);
        }
        return normalized_vocabulary(std::move(cols));
    }

    // Every observable of `intermediate_layer` has a nonempty entry drawn
    // from `input_layer`.
    void validate(const Table& t, std::string_view intermediate_layer,
                  std::string_view input_layer) const
    {
        for (std::size_t c : t.layer(intermediate_layer))
            (void)inputs_of(t, t.observable(c).name, input_layer);
    }

private:
    std::map<std::string, std::vector<std::string>> entries_;
};

struct SequencePart {
    Atom stage2_atom;
    std::vector<std::size_t> vocabulary;
    bool failed = false;
    std::string failure;
    InterpolantReport report;
};

struct SequenceInterpolant {
    Conjunction stage2;
    std::vector<Conjunction> stage1_parts;  // one per stage-2 atom; empty when failed
    Conjunction stage1;                     // conjunction of the non-failed parts
    std::vector<SequencePart> parts;

    [[nodiscard]] std::size_t stage1_atom_count() const noexcept { return stage1.complexity(); }
    [[nodiscard]] std::size_t failed_parts() const noexcept
    {
        std::size_t n = 0;
        for (const auto& p : parts) n += p.failed ? 1 : 0;
        return n;
    }
};

struct SequenceOptions {
    MiningParams params;                              // vocabulary is ignored
    std::map<std::size_t, MiningParams> overrides;    // by stage-2 atom index
    unsigned jobs = 1;
};

/// For each atom of the stage-2 interpolant, mine an input-layer interpolant
/// that predicts that atom, restricted to the atom's dependency patch, and
/// conjoin the results.
///
/// Parts whose conclusion atom has no support in `d` are marked failed and
/// left out of stage1. Parts run independently and are joined in stage-2
/// order.
inline SequenceInterpolant sequence_interp(const Premise& premise, const Conjunction& stage2,
                                           const Dataset& d, const DependencyMap& deps,
                                           const SequenceOptions& options,
                                           FractileCache* cache = nullptr)
{
    const Table& t = d.table();
    if (d.count(premise) == 0) throw ContractError("premise row is not in the dataset");
    if (!stage2.holds(premise.source(), premise.row()))
        throw ContractError("premise row does not satisfy the stage-2 interpolant");

    SequenceInterpolant out;
    out.stage2 = stage2;
    const auto atoms = stage2.atoms();
    out.parts.resize(atoms.size());
    out.stage1_parts.resize(atoms.size());

    // Resolve vocabularies up front so a bad map fails before any mining.
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        out.parts[i].stage2_atom = atoms[i];
        out.parts[i].vocabulary =
            deps.inputs_of(t, t.observable(atoms[i].observable).name, premise.layer_tag());
    }

    parallel_for(atoms.size(), options.jobs, [&](std::size_t i) {
        SequencePart& part = out.parts[i];
        const Atom& conclusion = part.stage2_atom;
        if (d.count(conclusion) == 0) {
            part.failed = true;
            part.failure = "conclusion " + describe(part.stage2_atom, t) + " has zero support";
            return;
        }
        auto it = options.overrides.find(i);
        MiningParams params = it != options.overrides.end() ? it->second : options.params;
        params.vocabulary = part.vocabulary;
        params.vocabulary_tag = "patch:" + t.observable(part.stage2_atom.observable).name;
        try {
            part.report = conj_interp(premise, conclusion, d, params, cache);
        } catch (const Error& e) {
            part.failed = true;
            part.failure = e.what();
        }
    });

    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (out.parts[i].failed) continue;
        out.stage1_parts[i] = out.parts[i].report.interpolant;
        out.stage1 = conjoin(std::move(out.stage1), out.stage1_parts[i]);
    }
    return out;
}

}  // namespace bitp
