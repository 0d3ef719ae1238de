#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>

#include <bit>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bitp {

enum class Relation { le, ge, eq };

inline std::string_view to_string(Relation r)
{
    switch (r) {
    case Relation::le: return "le";
    case Relation::ge: return "ge";
    case Relation::eq: return "eq";
    }
    return "?";
}

inline std::string_view symbol(Relation r)
{
    switch (r) {
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
    case Relation::eq: return "=";
    }
    return "?";
}

inline std::optional<Relation> parse_relation(std::string_view s)
{
    if (s == "le" || s == "<=") return Relation::le;
    if (s == "ge" || s == ">=") return Relation::ge;
    if (s == "eq" || s == "=") return Relation::eq;
    return std::nullopt;
}

/// A bound or equality predicate on one observable: v <= c, v >= c, v = c.
///
/// The observable is a column index into the table the atom was built for.
/// Comparison is plain IEEE on stored values; bounds produced by the miner
/// are themselves stored values, so no tolerance is involved.
struct Atom {
    std::size_t observable = 0;
    Relation relation = Relation::le;
    double bound = 0.0;

    [[nodiscard]] bool holds(const Table& t, std::size_t row) const
    {
        if (observable >= t.cols())
            throw EvaluationError("atom references column " + std::to_string(observable) +
                                  " but the table has " + std::to_string(t.cols()));
        const double v = t.value(row, observable);
        switch (relation) {
        case Relation::le: return v <= bound;
        case Relation::ge: return v >= bound;
        case Relation::eq: return v == bound;
        }
        return false;
    }

    friend bool operator==(const Atom&, const Atom&) = default;
};

// Builds an atom by observable name, enforcing the range-kind rules: only
// `eq` on categoricals, and categorical bounds given as declared labels.
inline Atom make_atom(const Table& t, std::string_view name, Relation rel, double bound)
{
    const std::size_t c = t.index_of(name);
    const auto& obs = t.observable(c);
    if (obs.range_kind == RangeKind::categorical && rel != Relation::eq)
        throw EvaluationError("relation " + std::string(to_string(rel)) +
                              " is not allowed on categorical observable '" + obs.name + "'");
    return Atom{c, rel, bound};
}

inline Atom make_category_atom(const Table& t, std::string_view name, std::string_view label)
{
    const std::size_t c = t.index_of(name);
    const auto& obs = t.observable(c);
    if (obs.range_kind != RangeKind::categorical)
        throw EvaluationError("observable '" + obs.name + "' is not categorical");
    auto code = obs.category_code(label);
    if (!code)
        throw EvaluationError("'" + std::string(label) + "' is not a declared category of '" +
                              obs.name + "'");
    return Atom{c, Relation::eq, *code};
}

inline void validate(const Atom& a, const Table& t)
{
    if (a.observable >= t.cols())
        throw EvaluationError("atom references unknown column " + std::to_string(a.observable));
    const auto& obs = t.observable(a.observable);
    if (obs.range_kind == RangeKind::categorical && a.relation != Relation::eq)
        throw EvaluationError("relation " + std::string(to_string(a.relation)) +
                              " is not allowed on categorical observable '" + obs.name + "'");
}

inline std::string describe(const Atom& a, const Table& t)
{
    const auto& obs = t.observable(a.observable);
    std::string bound;
    if (obs.range_kind == RangeKind::categorical) {
        const auto i = static_cast<std::size_t>(a.bound);
        bound = i < obs.categories.size() ? obs.categories[i] : std::to_string(a.bound);
    } else {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, a.bound);
        bound.assign(buf, end);
    }
    return obs.name + " " + std::string(symbol(a.relation)) + " " + bound;
}

/// Ordered conjunction of atoms. Empty means `true`.
class Conjunction {
public:
    Conjunction() = default;
    Conjunction(std::initializer_list<Atom> atoms) : atoms_(atoms) {}
    explicit Conjunction(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

    [[nodiscard]] bool holds(const Table& t, std::size_t row) const
    {
        for (const auto& a : atoms_)
            if (!a.holds(t, row)) return false;
        return true;
    }

    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] bool empty() const noexcept { return atoms_.empty(); }

    // |phi|: number of atoms, duplicates included.
    [[nodiscard]] std::size_t complexity() const noexcept { return atoms_.size(); }

    [[nodiscard]] std::set<std::size_t> vocabulary() const
    {
        std::set<std::size_t> v;
        for (const auto& a : atoms_) v.insert(a.observable);
        return v;
    }

    friend bool operator==(const Conjunction&, const Conjunction&) = default;

private:
    friend Conjunction conjoin(Conjunction phi, const Atom& a);
    friend Conjunction conjoin(Conjunction phi, const Conjunction& psi);
    std::vector<Atom> atoms_;
};

inline Conjunction conjoin(Conjunction phi, const Atom& a)
{
    phi.atoms_.push_back(a);
    return phi;
}

inline Conjunction conjoin(Conjunction phi, const Conjunction& psi)
{
    phi.atoms_.insert(phi.atoms_.end(), psi.atoms_.begin(), psi.atoms_.end());
    return phi;
}

inline std::string describe(const Conjunction& phi, const Table& t)
{
    if (phi.empty()) return "true";
    std::string out;
    for (const auto& a : phi.atoms()) {
        if (!out.empty()) out += " & ";
        out += describe(a, t);
    }
    return out;
}

/// A single observation viewed as a predicate's model: one row of a table.
struct Observation {
    const Table* table = nullptr;
    std::size_t row = 0;

    [[nodiscard]] double operator[](std::size_t col) const { return table->value(row, col); }
    [[nodiscard]] std::size_t size() const { return table->cols(); }
};

template <RowPredicate F>
bool holds(const Observation& m, const F& phi)
{
    return phi.holds(*m.table, m.row);
}

/// "The input is exactly this row": equality with a designated row on every
/// observable of one layer.
///
/// Kept as (table, row, layer) instead of one eq atom per input observable.
/// Equality is bitwise on the stored doubles.
class Premise {
public:
    Premise(std::shared_ptr<const Table> source, std::size_t row, std::string layer_tag)
        : source_(std::move(source)), row_(row), layer_tag_(std::move(layer_tag))
    {
        if (!source_) throw ContractError("premise requires a table");
        if (row_ >= source_->rows())
            throw ContractError("premise row " + std::to_string(row_) + " out of range (" +
                                std::to_string(source_->rows()) + " rows)");
        columns_ = source_->layer(layer_tag_);
        if (columns_.empty())
            throw ContractError("layer '" + layer_tag_ + "' has no observables");
    }

    [[nodiscard]] bool holds(const Table& t, std::size_t row) const
    {
        for (std::size_t c : columns_) {
            if (c >= t.cols()) throw EvaluationError("premise column missing from table");
            if (std::bit_cast<std::uint64_t>(t.value(row, c)) !=
                std::bit_cast<std::uint64_t>(source_->value(row_, c)))
                return false;
        }
        return true;
    }

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] const std::string& layer_tag() const noexcept { return layer_tag_; }
    [[nodiscard]] std::span<const std::size_t> columns() const noexcept { return columns_; }
    [[nodiscard]] const Table& source() const noexcept { return *source_; }

private:
    std::shared_ptr<const Table> source_;
    std::size_t row_;
    std::string layer_tag_;
    std::vector<std::size_t> columns_;
};

// `row_index` is a row of the underlying table; it need not be in the view.
inline Premise premise_of_row(const Dataset& d, std::size_t row_index, std::string_view input_layer)
{
    return Premise(d.table_ptr(), row_index, std::string(input_layer));
}

}  // namespace bitp
