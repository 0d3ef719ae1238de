#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace bitp {

/// Exact empirical probability: a count over a population size.
///
/// Frequencies stay as integer pairs until they reach a reporting boundary.
/// Threshold tests (`at_least`) divide the two counts in IEEE double, which
/// is correctly rounded, and compare against the threshold as given. A
/// decimal threshold such as 0.55 and a ratio that equals it exactly (11/20)
/// round to the same double, so the comparison behaves as the decimal
/// reading suggests and is identical on every platform.
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    [[nodiscard]] double value() const noexcept
    {
        return static_cast<double>(num) / static_cast<double>(den);
    }

    [[nodiscard]] bool at_least(double p) const noexcept { return value() >= p; }
    [[nodiscard]] bool below(double p) const noexcept { return !at_least(p); }

    // Value comparison by cross-multiplication. Counts are bounded by the row
    // count of a table, so the products fit comfortably in 128 bits.
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) noexcept
    {
        const auto lhs = static_cast<unsigned __int128>(a.num) * b.den;
        const auto rhs = static_cast<unsigned __int128>(b.num) * a.den;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend bool operator==(const Ratio& a, const Ratio& b) noexcept
    {
        return (a <=> b) == std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Ratio& r)
    {
        return os << r.num << '/' << r.den;
    }
};

}  // namespace bitp
