#pragma once

#include <bitp/error.hpp>
#include <bitp/hash.hpp>
#include <bitp/ratio.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bitp {

enum class RangeKind { real, integer, categorical };

inline std::string_view to_string(RangeKind k)
{
    switch (k) {
    case RangeKind::real: return "real";
    case RangeKind::integer: return "integer";
    case RangeKind::categorical: return "categorical";
    }
    return "?";
}

inline std::optional<RangeKind> parse_range_kind(std::string_view s)
{
    if (s == "real") return RangeKind::real;
    if (s == "integer") return RangeKind::integer;
    if (s == "categorical") return RangeKind::categorical;
    return std::nullopt;
}

// A named column. Categorical values are stored as the index of the label in
// `categories`, so every cell of every table is a double.
struct Observable {
    std::string name;
    RangeKind range_kind = RangeKind::real;
    std::string layer_tag;
    std::size_t index_in_layer = 0;
    std::vector<std::string> categories;

    [[nodiscard]] std::optional<double> category_code(std::string_view label) const
    {
        auto it = std::find(categories.begin(), categories.end(), label);
        if (it == categories.end()) return std::nullopt;
        return static_cast<double>(it - categories.begin());
    }

    // Whether `v` is a legal stored value for this observable.
    [[nodiscard]] bool admits(double v) const
    {
        if (!std::isfinite(v)) return false;
        switch (range_kind) {
        case RangeKind::real: return true;
        case RangeKind::integer: return std::trunc(v) == v;
        case RangeKind::categorical:
            return std::trunc(v) == v && v >= 0 && v < static_cast<double>(categories.size());
        }
        return false;
    }
};

/// Immutable column-major observation table.
///
/// Rows are observations, columns are observables. Construct through
/// TableBuilder (row-wise) or directly from columns; either path validates
/// names, widths and range kinds.
class Table {
public:
    Table(std::vector<Observable> observables, std::vector<std::vector<double>> columns,
          std::string provenance = {})
        : observables_(std::move(observables)), columns_(std::move(columns)),
          provenance_(std::move(provenance))
    {
        if (columns_.size() != observables_.size())
            throw LoadError("table has " + std::to_string(observables_.size()) +
                            " observables but " + std::to_string(columns_.size()) + " columns");
        for (std::size_t c = 0; c < observables_.size(); ++c) {
            const auto& name = observables_[c].name;
            if (name.empty()) throw LoadError("observable " + std::to_string(c) + " has no name");
            if (!by_name_.emplace(name, c).second)
                throw LoadError("duplicate observable name '" + name + "'");
            if (columns_[c].size() != columns_.front().size())
                throw LoadError("column '" + name + "' has a different row count");
            for (std::size_t r = 0; r < columns_[c].size(); ++r)
                if (!observables_[c].admits(columns_[c][r]))
                    throw LoadError("row " + std::to_string(r) + ", column '" + name +
                                    "': value outside declared " +
                                    std::string(to_string(observables_[c].range_kind)) + " range");
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept
    {
        return columns_.empty() ? 0 : columns_.front().size();
    }
    [[nodiscard]] std::size_t cols() const noexcept { return observables_.size(); }

    [[nodiscard]] const std::vector<Observable>& observables() const noexcept { return observables_; }
    [[nodiscard]] const Observable& observable(std::size_t c) const { return observables_.at(c); }
    [[nodiscard]] std::span<const double> column(std::size_t c) const { return columns_.at(c); }
    [[nodiscard]] double value(std::size_t row, std::size_t col) const noexcept
    {
        return columns_[col][row];
    }
    [[nodiscard]] const std::string& provenance() const noexcept { return provenance_; }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const
    {
        auto it = by_name_.find(std::string(name));
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }
    [[nodiscard]] std::size_t index_of(std::string_view name) const
    {
        if (auto c = find(name)) return *c;
        throw EvaluationError("unknown observable '" + std::string(name) + "'");
    }

    // Columns carrying `layer_tag`, ordered by index_in_layer then column.
    [[nodiscard]] std::vector<std::size_t> layer(std::string_view layer_tag) const
    {
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < observables_.size(); ++c)
            if (observables_[c].layer_tag == layer_tag) out.push_back(c);
        std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
            return observables_[a].index_in_layer < observables_[b].index_in_layer;
        });
        return out;
    }

    // Same names, kinds and categories in the same order.
    [[nodiscard]] bool same_schema(const Table& other) const
    {
        if (cols() != other.cols()) return false;
        for (std::size_t c = 0; c < cols(); ++c) {
            const auto& a = observables_[c];
            const auto& b = other.observables_[c];
            if (a.name != b.name || a.range_kind != b.range_kind || a.categories != b.categories)
                return false;
        }
        return true;
    }

private:
    std::vector<Observable> observables_;
    std::vector<std::vector<double>> columns_;
    std::string provenance_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

class TableBuilder {
public:
    explicit TableBuilder(std::vector<Observable> observables)
        : observables_(std::move(observables)), columns_(observables_.size())
    {
    }

    TableBuilder& add_row(std::span<const double> values) &
    {
        if (values.size() != observables_.size())
            throw LoadError("row " + std::to_string(rows_) + ": expected " +
                            std::to_string(observables_.size()) + " values, got " +
                            std::to_string(values.size()));
        for (std::size_t c = 0; c < values.size(); ++c) columns_[c].push_back(values[c]);
        ++rows_;
        return *this;
    }
    TableBuilder& add_row(std::initializer_list<double> values) &
    {
        return add_row(std::span<const double>(values.begin(), values.size()));
    }
    // Chaining on a temporary: TableBuilder(obs).add_row({...}).build().
    TableBuilder&& add_row(std::initializer_list<double> values) &&
    {
        add_row(values);
        return std::move(*this);
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }

    std::shared_ptr<const Table> build(std::string provenance = {}) &&
    {
        return std::make_shared<const Table>(std::move(observables_), std::move(columns_),
                                             std::move(provenance));
    }

private:
    std::vector<Observable> observables_;
    std::vector<std::vector<double>> columns_;
    std::size_t rows_ = 0;
};

/// Anything that can be evaluated on a table row: atoms, conjunctions,
/// premises, and their combinations.
template <typename F>
concept RowPredicate = requires(const F& f, const Table& t, std::size_t row) {
    { f.holds(t, row) } -> std::convertible_to<bool>;
};

// Conjunction of two heterogeneous predicates, e.g. an interpolant and a
// conclusion when counting true positives.
template <RowPredicate F, RowPredicate G>
struct Both {
    const F& first;
    const G& second;
    [[nodiscard]] bool holds(const Table& t, std::size_t row) const
    {
        return first.holds(t, row) && second.holds(t, row);
    }
};
template <RowPredicate F, RowPredicate G>
Both(const F&, const G&) -> Both<F, G>;

using RowIndex = std::uint32_t;

/// An indexed family of observations: a view of selected rows of a table.
///
/// Conditioning yields a new view sharing the same table; row indices always
/// refer to the underlying table and keep their original order.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::shared_ptr<const Table> table) : table_(std::move(table))
    {
        if (!table_) throw ContractError("dataset requires a table");
        auto all = std::make_shared<std::vector<RowIndex>>(table_->rows());
        std::iota(all->begin(), all->end(), RowIndex{0});
        rows_ = std::move(all);
    }

    Dataset(std::shared_ptr<const Table> table, std::vector<RowIndex> rows)
        : table_(std::move(table)),
          rows_(std::make_shared<const std::vector<RowIndex>>(std::move(rows)))
    {
        if (!table_) throw ContractError("dataset requires a table");
        for (RowIndex r : *rows_)
            if (r >= table_->rows()) throw ContractError("row index out of range");
    }

    [[nodiscard]] const Table& table() const noexcept { return *table_; }
    [[nodiscard]] const std::shared_ptr<const Table>& table_ptr() const noexcept { return table_; }
    [[nodiscard]] std::span<const RowIndex> rows() const noexcept
    {
        return rows_ ? std::span<const RowIndex>(*rows_) : std::span<const RowIndex>();
    }
    [[nodiscard]] std::size_t size() const noexcept { return rows_ ? rows_->size() : 0; }
    [[nodiscard]] bool empty() const noexcept { return size() == 0; }
    [[nodiscard]] const std::string& provenance() const noexcept { return table_->provenance(); }

    // Identity of the row set, for caches. Equal row sets hash equal.
    [[nodiscard]] std::uint64_t row_set_hash() const noexcept
    {
        Fnv1a h;
        h.update_u64(size());
        for (RowIndex r : rows()) h.update_u64(r);
        return h.digest();
    }
    [[nodiscard]] bool same_rows(const Dataset& other) const noexcept
    {
        if (table_ != other.table_) return false;
        if (rows_ == other.rows_) return true;
        return std::ranges::equal(rows(), other.rows());
    }

    template <RowPredicate F>
    [[nodiscard]] std::size_t count(const F& phi) const
    {
        std::size_t n = 0;
        for (RowIndex r : rows()) n += phi.holds(*table_, r) ? 1 : 0;
        return n;
    }

    template <RowPredicate F>
    [[nodiscard]] Dataset condition(const F& phi) const
    {
        std::vector<RowIndex> kept;
        kept.reserve(size());
        for (RowIndex r : rows())
            if (phi.holds(*table_, r)) kept.push_back(r);
        if (kept.size() == size()) return *this;
        return Dataset(table_, std::move(kept), unchecked{});
    }

private:
    struct unchecked {};
    Dataset(std::shared_ptr<const Table> table, std::vector<RowIndex> rows, unchecked)
        : table_(std::move(table)),
          rows_(std::make_shared<const std::vector<RowIndex>>(std::move(rows)))
    {
    }

    std::shared_ptr<const Table> table_;
    std::shared_ptr<const std::vector<RowIndex>> rows_;
};

/// Q_D(phi): fraction of rows of `d` satisfying `phi`, as an exact count ratio.
template <RowPredicate F>
Ratio frequency(const Dataset& d, const F& phi)
{
    if (d.empty()) throw UndefinedMeasure("frequency over an empty dataset");
    return Ratio{d.count(phi), d.size()};
}

template <RowPredicate F>
Dataset condition(const Dataset& d, const F& phi)
{
    return d.condition(phi);
}

/// Q_D(psi | phi), or nullopt when no row satisfies phi.
template <RowPredicate F, RowPredicate G>
std::optional<Ratio> conditional(const Dataset& d, const F& psi, const G& phi)
{
    std::uint64_t support = 0, both = 0;
    for (RowIndex r : d.rows()) {
        if (!phi.holds(d.table(), r)) continue;
        ++support;
        both += psi.holds(d.table(), r) ? 1 : 0;
    }
    if (support == 0) return std::nullopt;
    return Ratio{both, support};
}

}  // namespace bitp
