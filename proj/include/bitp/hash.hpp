#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace bitp {

// 64-bit FNV-1a. Used for row-set cache keys and artifact manifests; not a
// cryptographic hash.
class Fnv1a {
public:
    static constexpr std::uint64_t offset_basis = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t prime = 0x100000001b3ULL;

    constexpr void update(std::span<const unsigned char> bytes) noexcept
    {
        for (unsigned char b : bytes) {
            state_ ^= b;
            state_ *= prime;
        }
    }
    void update(std::string_view s) noexcept
    {
        update({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
    }
    // Little-endian byte order regardless of host.
    constexpr void update_u64(std::uint64_t v) noexcept
    {
        for (int i = 0; i < 8; ++i) {
            state_ ^= static_cast<unsigned char>(v >> (8 * i));
            state_ *= prime;
        }
    }

    [[nodiscard]] constexpr std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = offset_basis;
};

inline std::uint64_t fnv1a(std::string_view s) noexcept
{
    Fnv1a h;
    h.update(s);
    return h.digest();
}

}  // namespace bitp
