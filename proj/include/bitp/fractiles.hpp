#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/ratio.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace bitp {

enum class Direction { upper, lower };

inline void check_fractile_probability(double p)
{
    if (!(p > 0.0 && p <= 1.0))
        throw ContractError("fractile probability must lie in (0, 1], got " + std::to_string(p));
}

/// Least k in [1, n] with k/n >= p under Ratio's comparison rule.
///
/// ceil(p*n) is the starting guess; the two loops correct for the rounding
/// of the product so the result agrees with a direct threshold scan.
inline std::size_t fractile_rank(double p, std::size_t n)
{
    check_fractile_probability(p);
    if (n == 0) throw UndefinedMeasure("fractile of an empty set");
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    while (k > 1 && Ratio{k - 1, n}.at_least(p)) --k;
    while (k < n && !Ratio{k, n}.at_least(p)) ++k;
    return k;
}

/// One column of a (conditioned) dataset, sorted ascending.
///
/// upper(p) is the least stored value c with P(v <= c) >= p, i.e. the
/// rank-th smallest value; lower(p) is the greatest c with P(v >= c) >= p,
/// the rank-th largest. Results are always elements of the column.
class SortedColumn {
public:
    SortedColumn(const Dataset& d, std::size_t column)
    {
        if (column >= d.table().cols())
            throw EvaluationError("fractile of unknown column " + std::to_string(column));
        values_.reserve(d.size());
        const auto col = d.table().column(column);
        for (RowIndex r : d.rows()) values_.push_back(col[r]);
        std::sort(values_.begin(), values_.end());
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    [[nodiscard]] double upper(double p) const
    {
        const std::size_t k = fractile_rank(p, values_.size());
        return values_[k - 1];
    }
    [[nodiscard]] double lower(double p) const
    {
        const std::size_t k = fractile_rank(p, values_.size());
        return values_[values_.size() - k];
    }
    [[nodiscard]] double fractile(double p, Direction dir) const
    {
        return dir == Direction::upper ? upper(p) : lower(p);
    }

private:
    std::vector<double> values_;
};

/// Sorted columns keyed by (column, row set). Safe for concurrent use.
///
/// Lookups hash the row set, then confirm the stored row set is identical,
/// so a hash collision costs a sort, never a wrong answer.
class FractileCache {
public:
    std::shared_ptr<const SortedColumn> get(const Dataset& d, std::size_t column)
    {
        const Key key{column, d.row_set_hash()};
        {
            std::shared_lock lock(mutex_);
            if (auto hit = lookup(key, d)) return hit;
        }
        auto fresh = std::make_shared<const SortedColumn>(d, column);
        std::unique_lock lock(mutex_);
        if (auto hit = lookup(key, d)) return hit;
        entries_.emplace(key, Entry{d, fresh});
        return fresh;
    }

    [[nodiscard]] std::size_t size() const
    {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

    void clear()
    {
        std::unique_lock lock(mutex_);
        entries_.clear();
    }

private:
    using Key = std::pair<std::size_t, std::uint64_t>;
    struct Entry {
        Dataset rows;
        std::shared_ptr<const SortedColumn> sorted;
    };

    std::shared_ptr<const SortedColumn> lookup(const Key& key, const Dataset& d) const
    {
        auto [lo, hi] = entries_.equal_range(key);
        for (auto it = lo; it != hi; ++it)
            if (it->second.rows.same_rows(d)) return it->second.sorted;
        return nullptr;
    }

    mutable std::shared_mutex mutex_;
    std::multimap<Key, Entry> entries_;
};

/// F+_p(v | phi) on D: least c among the values of v on D|phi with
/// Q(v <= c | phi) >= p.
template <RowPredicate F>
double upper_fractile(const Dataset& d, double p, std::size_t column, const F& phi)
{
    check_fractile_probability(p);
    const Dataset sub = d.condition(phi);
    if (sub.empty()) throw UndefinedMeasure("fractile under a condition with zero support");
    return SortedColumn(sub, column).upper(p);
}

/// F-_p(v | phi) on D: greatest c with Q(v >= c | phi) >= p.
template <RowPredicate F>
double lower_fractile(const Dataset& d, double p, std::size_t column, const F& phi)
{
    check_fractile_probability(p);
    const Dataset sub = d.condition(phi);
    if (sub.empty()) throw UndefinedMeasure("fractile under a condition with zero support");
    return SortedColumn(sub, column).lower(p);
}

}  // namespace bitp
