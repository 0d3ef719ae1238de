#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/predicates.hpp>
#include <bitp/ratio.hpp>
#include <bitp/sequence.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace bitp {

/// Reproducible pseudo-random source for synthetic data.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, whose algorithms vary between standard libraries:
///   uniform()      = (x >> 11) * 2^-53
///   below(n)       = rejection sampling on the top bits, no modulo bias
///   shuffle(v)     = Fisher-Yates from the back using below()
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0) throw ContractError("below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

// An atom of the planted rule, over the i-th hidden observable.
struct PlantedAtom {
    std::size_t hidden = 0;
    Relation relation = Relation::ge;
    double bound = 0.0;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    std::size_t n_rows = 1000;
    // Hidden real observables x0..x{n-1} in [0, 1), layer "hidden". Ignored
    // when image_side > 0.
    std::size_t n_hidden = 4;
    // When > 0, quantize hidden reals to multiples of 1/value_levels so that
    // columns contain ties.
    std::size_t value_levels = 0;
    // When > 0 (even), generate a two-layer table instead: pixels p_r_c in
    // [0, 1) on an image_side x image_side grid (layer "input") and pooled
    // units u_r_c = max over each 2x2 block (layer "pool"). The planted rule
    // then refers to pooled units in row-major order.
    std::size_t image_side = 0;
    std::vector<PlantedAtom> rule;
    std::optional<double> precision;  // target Q(y=1 | rule), default 1
    std::optional<double> recall;     // target Q(rule | y=1), default: no positives outside
    double noise = 0.0;               // each label flipped with this probability afterwards
};

struct SynthAnnotation {
    std::string rule;
    std::uint64_t seed = 0;
    std::size_t n_rows = 0;
    std::size_t rule_support = 0;
    std::size_t positives = 0;
    std::size_t true_positives = 0;
    double precision_target = 1.0;
    std::optional<double> recall_target;
    double noise = 0.0;
    Ratio realized_precision;
    std::optional<Ratio> realized_recall;
};

struct SynthData {
    std::shared_ptr<const Table> table;
    Conjunction rule;  // planted rule over table columns
    Atom label_true;   // y = "1"
    std::string input_layer;
    std::string hidden_layer;
    std::optional<DependencyMap> dependencies;  // image mode only
    SynthAnnotation annotation;
};

// Names of the observables a PlantedAtom's `hidden` index refers to.
inline std::vector<std::string> hidden_names(const SynthSpec& spec)
{
    std::vector<std::string> out;
    if (spec.image_side > 0) {
        const std::size_t half = spec.image_side / 2;
        for (std::size_t r = 0; r < half; ++r)
            for (std::size_t c = 0; c < half; ++c)
                out.push_back("u_" + std::to_string(r) + "_" + std::to_string(c));
    } else {
        for (std::size_t i = 0; i < spec.n_hidden; ++i) out.push_back("x" + std::to_string(i));
    }
    return out;
}

inline SynthData generate(const SynthSpec& spec)
{
    if (spec.n_rows == 0) throw ContractError("synthetic dataset needs at least one row");
    if (spec.rule.empty()) throw ContractError("synthetic dataset needs a planted rule");
    auto unit = [](std::optional<double> p) { return !p || (*p > 0.0 && *p <= 1.0); };
    if (!unit(spec.precision) || !unit(spec.recall))
        throw ContractError("precision and recall targets must lie in (0, 1]");
    if (spec.noise < 0.0 || spec.noise > 1.0) throw ContractError("noise must lie in [0, 1]");

    SynthRng rng(spec.seed);
    std::vector<Observable> obs;
    std::vector<std::vector<double>> cols;
    std::vector<std::size_t> hidden_cols;
    SynthData out;

    if (spec.image_side > 0) {
        const std::size_t side = spec.image_side;
        if (side % 2 != 0) throw ContractError("image_side must be even");
        const std::size_t half = side / 2;
        out.input_layer = "input";
        out.hidden_layer = "pool";
        for (std::size_t r = 0; r < side; ++r)
            for (std::size_t c = 0; c < side; ++c)
                obs.push_back({"p_" + std::to_string(r) + "_" + std::to_string(c),
                               RangeKind::real, "input", r * side + c, {}});
        std::map<std::string, std::vector<std::string>> deps;
        for (std::size_t r = 0; r < half; ++r)
            for (std::size_t c = 0; c < half; ++c) {
                const std::string name = "u_" + std::to_string(r) + "_" + std::to_string(c);
                auto& patch = deps[name];
                for (std::size_t dr = 0; dr < 2; ++dr)
                    for (std::size_t dc = 0; dc < 2; ++dc)
                        patch.push_back("p_" + std::to_string(2 * r + dr) + "_" +
                                        std::to_string(2 * c + dc));
                hidden_cols.push_back(obs.size());
                obs.push_back({name, RangeKind::real, "pool", r * half + c, {}});
            }
        out.dependencies = DependencyMap(std::move(deps));
        cols.assign(obs.size(), std::vector<double>(spec.n_rows));
        for (std::size_t row = 0; row < spec.n_rows; ++row) {
            for (std::size_t p = 0; p < side * side; ++p) {
                double v = rng.uniform();
                if (spec.value_levels > 0)
                    v = std::floor(v * spec.value_levels) / static_cast<double>(spec.value_levels);
                cols[p][row] = v;
            }
            for (std::size_t r = 0; r < half; ++r)
                for (std::size_t c = 0; c < half; ++c) {
                    double m = 0.0;
                    for (std::size_t dr = 0; dr < 2; ++dr)
                        for (std::size_t dc = 0; dc < 2; ++dc)
                            m = std::max(m, cols[(2 * r + dr) * side + 2 * c + dc][row]);
                    cols[side * side + r * half + c][row] = m;
                }
        }
    } else {
        out.input_layer = "input";
        out.hidden_layer = "hidden";
        obs.push_back({"id", RangeKind::integer, "input", 0, {}});
        for (std::size_t i = 0; i < spec.n_hidden; ++i) {
            hidden_cols.push_back(obs.size());
            obs.push_back({"x" + std::to_string(i), RangeKind::real, "hidden", i, {}});
        }
        cols.assign(obs.size(), std::vector<double>(spec.n_rows));
        for (std::size_t row = 0; row < spec.n_rows; ++row) {
            cols[0][row] = static_cast<double>(row);
            for (std::size_t i = 0; i < spec.n_hidden; ++i) {
                double v = rng.uniform();
                if (spec.value_levels > 0)
                    v = std::floor(v * spec.value_levels) / static_cast<double>(spec.value_levels);
                cols[hidden_cols[i]][row] = v;
            }
        }
    }

    std::vector<Atom> rule_atoms;
    for (const auto& pa : spec.rule) {
        if (pa.hidden >= hidden_cols.size())
            throw ContractError("planted atom refers to hidden observable " +
                                std::to_string(pa.hidden) + " which does not exist");
        rule_atoms.push_back(Atom{hidden_cols[pa.hidden], pa.relation, pa.bound});
    }
    out.rule = Conjunction(std::move(rule_atoms));

    auto holds_rule = [&](std::size_t row) {
        for (const auto& a : out.rule.atoms()) {
            const double v = cols[a.observable][row];
            const bool ok = a.relation == Relation::le   ? v <= a.bound
                            : a.relation == Relation::ge ? v >= a.bound
                                                         : v == a.bound;
            if (!ok) return false;
        }
        return true;
    };
    std::vector<std::size_t> inside, outside;
    for (std::size_t row = 0; row < spec.n_rows; ++row)
        (holds_rule(row) ? inside : outside).push_back(row);
    if (inside.empty()) throw ContractError("planted rule holds on no generated row");

    const double precision = spec.precision.value_or(1.0);
    const auto tp = static_cast<std::size_t>(std::llround(precision * inside.size()));
    std::size_t outside_pos = 0;
    if (spec.recall) {
        if (tp == 0) throw ContractError("recall target needs at least one true positive");
        const auto total = static_cast<std::size_t>(std::llround(tp / *spec.recall));
        outside_pos = total > tp ? total - tp : 0;
        if (outside_pos > outside.size())
            throw ContractError("recall target needs " + std::to_string(outside_pos) +
                                " positives outside the rule but only " +
                                std::to_string(outside.size()) + " rows are available");
    }

    std::vector<double> label(spec.n_rows, 0.0);
    rng.shuffle(inside);
    rng.shuffle(outside);
    for (std::size_t i = 0; i < tp; ++i) label[inside[i]] = 1.0;
    for (std::size_t i = 0; i < outside_pos; ++i) label[outside[i]] = 1.0;
    if (spec.noise > 0.0)
        for (auto& y : label)
            if (rng.uniform() < spec.noise) y = 1.0 - y;

    const std::size_t label_col = obs.size();
    obs.push_back({"y", RangeKind::categorical, "output", 0, {"0", "1"}});
    cols.push_back(std::move(label));

    out.table = std::make_shared<const Table>(std::move(obs), std::move(cols),
                                              "synth seed=" + std::to_string(spec.seed));
    out.label_true = Atom{label_col, Relation::eq, 1.0};

    // Realized statistics by direct count over the finished table.
    SynthAnnotation& ann = out.annotation;
    ann.rule = describe(out.rule, *out.table);
    ann.seed = spec.seed;
    ann.n_rows = spec.n_rows;
    ann.precision_target = precision;
    ann.recall_target = spec.recall;
    ann.noise = spec.noise;
    for (std::size_t row = 0; row < spec.n_rows; ++row) {
        const bool in = out.rule.holds(*out.table, row);
        const bool pos = out.label_true.holds(*out.table, row);
        ann.rule_support += in;
        ann.positives += pos;
        ann.true_positives += in && pos;
    }
    ann.realized_precision = Ratio{ann.true_positives, ann.rule_support};
    if (ann.positives > 0) ann.realized_recall = Ratio{ann.true_positives, ann.positives};
    return out;
}

}  // namespace bitp
