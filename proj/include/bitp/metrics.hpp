#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/fractiles.hpp>
#include <bitp/miner.hpp>
#include <bitp/parallel.hpp>
#include <bitp/predicates.hpp>

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace bitp {

/// Held-out quality of one interpolant I for conclusion B.
struct EvalResult {
    std::uint64_t rows = 0;
    std::uint64_t support = 0;         // rows satisfying I
    std::uint64_t b_support = 0;       // rows satisfying B
    std::uint64_t true_positives = 0;  // rows satisfying I and B
    std::size_t complexity = 0;

    // Q(B | I); undefined iff support == 0.
    [[nodiscard]] std::optional<Ratio> precision() const
    {
        if (support == 0) return std::nullopt;
        return Ratio{true_positives, support};
    }
    // Q(I | B); undefined iff b_support == 0.
    [[nodiscard]] std::optional<Ratio> recall() const
    {
        if (b_support == 0) return std::nullopt;
        return Ratio{true_positives, b_support};
    }
};

template <RowPredicate C>
EvalResult evaluate(const Conjunction& interpolant, const C& conclusion, const Dataset& test)
{
    if (test.empty()) throw UndefinedMeasure("evaluation on an empty dataset");
    EvalResult r;
    r.rows = test.size();
    r.complexity = interpolant.complexity();
    for (RowIndex row : test.rows()) {
        const bool i = interpolant.holds(test.table(), row);
        const bool b = conclusion.holds(test.table(), row);
        r.support += i;
        r.b_support += b;
        r.true_positives += i && b;
    }
    return r;
}

struct EvalCase {
    Conjunction interpolant;
    Conjunction conclusion;
};

/// Precision of all predictions made by a pool of interpolants:
/// sum of true positives over sum of supports. Undefined when every
/// interpolant has zero support.
inline std::optional<Ratio> pooled_precision(std::span<const EvalCase> cases, const Dataset& test)
{
    std::uint64_t tp = 0, support = 0;
    for (const auto& c : cases) {
        const EvalResult r = evaluate(c.interpolant, c.conclusion, test);
        tp += r.true_positives;
        support += r.support;
    }
    if (support == 0) return std::nullopt;
    return Ratio{tp, support};
}

// One explanation task: explain why `premise` leads to `conclusion`.
struct PremiseCase {
    Premise premise;
    Conjunction conclusion;
};

struct SweepConfig {
    double alpha = 0.98;
    std::vector<double> gammas;
    std::vector<double> mus;
    std::size_t kappa = 10;
    std::vector<std::size_t> vocabulary;
    std::string vocabulary_tag;
    unsigned jobs = 1;
};

struct SweepPoint {
    double gamma = 0.0;
    double mu = 0.0;
    std::optional<double> avg_precision;  // over defined test precisions
    std::optional<double> avg_recall;     // over defined test recalls
    std::optional<double> avg_complexity; // over successfully mined premises
    std::size_t n_undefined = 0;          // zero test support
    std::size_t n_failed = 0;             // mining raised an error
    std::size_t n_total = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // gamma-major, mu-minor
};

/// Mine every premise on `train` at every (gamma, mu) grid point and average
/// the held-out metrics on `test`. Mining failures are counted, not thrown.
inline SweepResult sweep(std::span<const PremiseCase> batch, const Dataset& train,
                         const Dataset& test, const SweepConfig& cfg)
{
    if (batch.empty()) throw ContractError("sweep needs at least one premise");
    if (cfg.gammas.empty() || cfg.mus.empty()) throw ContractError("sweep grid is empty");

    struct Outcome {
        bool failed = false;
        EvalResult eval;
    };
    const std::size_t n_points = cfg.gammas.size() * cfg.mus.size();
    std::vector<Outcome> outcomes(n_points * batch.size());

    // First-round row sets (D|B for each conclusion) recur across the grid.
    FractileCache cache;
    parallel_for(outcomes.size(), cfg.jobs, [&](std::size_t task) {
        const std::size_t point = task / batch.size();
        const PremiseCase& pc = batch[task % batch.size()];
        MiningParams params;
        params.alpha = cfg.alpha;
        params.gamma = cfg.gammas[point / cfg.mus.size()];
        params.mu = cfg.mus[point % cfg.mus.size()];
        params.kappa = cfg.kappa;
        params.vocabulary = cfg.vocabulary;
        params.vocabulary_tag = cfg.vocabulary_tag;
        try {
            const auto report = conj_interp(pc.premise, pc.conclusion, train, params, &cache);
            outcomes[task].eval = evaluate(report.interpolant, pc.conclusion, test);
        } catch (const Error&) {
            outcomes[task].failed = true;
        }
    });

    SweepResult result;
    for (std::size_t point = 0; point < n_points; ++point) {
        SweepPoint sp;
        sp.gamma = cfg.gammas[point / cfg.mus.size()];
        sp.mu = cfg.mus[point % cfg.mus.size()];
        sp.n_total = batch.size();
        double sum_p = 0, sum_r = 0, sum_c = 0;
        std::size_t n_p = 0, n_r = 0, n_c = 0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const Outcome& o = outcomes[point * batch.size() + i];
            if (o.failed) {
                ++sp.n_failed;
                continue;
            }
            sum_c += static_cast<double>(o.eval.complexity);
            ++n_c;
            if (auto p = o.eval.precision()) {
                sum_p += p->value();
                ++n_p;
            } else {
                ++sp.n_undefined;
            }
            if (auto r = o.eval.recall()) {
                sum_r += r->value();
                ++n_r;
            }
        }
        if (n_p) sp.avg_precision = sum_p / static_cast<double>(n_p);
        if (n_r) sp.avg_recall = sum_r / static_cast<double>(n_r);
        if (n_c) sp.avg_complexity = sum_c / static_cast<double>(n_c);
        result.points.push_back(sp);
    }
    return result;
}

namespace detail {
// Shortest round-trip decimal form; identical on every conforming platform.
inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}
inline std::string format_optional(const std::optional<double>& v, std::string_view missing)
{
    return v ? format_double(*v) : std::string(missing);
}
}  // namespace detail

// CSV with header; undefined averages are empty fields.
inline void write_sweep_csv(const SweepResult& r, std::ostream& os)
{
    os << "gamma,mu,avg_precision,avg_recall,avg_complexity,n_undefined,n_total\n";
    for (const auto& p : r.points) {
        os << detail::format_double(p.gamma) << ',' << detail::format_double(p.mu) << ','
           << detail::format_optional(p.avg_precision, "") << ','
           << detail::format_optional(p.avg_recall, "") << ','
           << detail::format_optional(p.avg_complexity, "") << ',' << p.n_undefined << ','
           << p.n_total << '\n';
    }
}

// Whitespace-separated blocks, one per gamma, separated by blank lines, the
// layout gnuplot's splot expects for grid data.
inline void write_sweep_gnuplot(const SweepResult& r, std::ostream& os)
{
    os << "# gamma mu avg_precision avg_recall avg_complexity n_undefined n_total n_failed\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        if (i > 0 && p.gamma != r.points[i - 1].gamma) os << '\n';
        os << detail::format_double(p.gamma) << ' ' << detail::format_double(p.mu) << ' '
           << detail::format_optional(p.avg_precision, "NaN") << ' '
           << detail::format_optional(p.avg_recall, "NaN") << ' '
           << detail::format_optional(p.avg_complexity, "NaN") << ' ' << p.n_undefined << ' '
           << p.n_total << ' ' << p.n_failed << '\n';
    }
}

}  // namespace bitp
