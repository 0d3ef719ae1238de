#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/predicates.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace bitp {

enum class PixelClass : std::uint8_t { unconstrained, upper_bound, lower_bound };

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb upper_bound_color{192, 0, 160};    // dark magenta
inline constexpr Rgb lower_bound_color{255, 240, 64};   // bright yellow
inline constexpr Rgb unconstrained_color{180, 220, 180};  // light green

inline Rgb color_of(PixelClass c)
{
    switch (c) {
    case PixelClass::upper_bound: return upper_bound_color;
    case PixelClass::lower_bound: return lower_bound_color;
    case PixelClass::unconstrained: break;
    }
    return unconstrained_color;
}

// Row-major placement of input observables on a width x height grid.
class PixelLayout {
public:
    PixelLayout(std::size_t width, std::size_t height, std::vector<std::size_t> columns)
        : width_(width), height_(height), columns_(std::move(columns))
    {
        if (width_ == 0 || height_ == 0) throw RenderError("layout dimensions must be positive");
        if (columns_.size() != width_ * height_)
            throw RenderError("layout is " + std::to_string(width_) + "x" +
                              std::to_string(height_) + " but " +
                              std::to_string(columns_.size()) + " observables were given");
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (!pixel_of_.emplace(columns_[i], i).second)
                throw RenderError("observable mapped to two pixels");
    }

    // The observables of `layer_tag` in index_in_layer order.
    static PixelLayout from_layer(const Table& t, std::string_view layer_tag, std::size_t width,
                                  std::size_t height)
    {
        return PixelLayout(width, height, t.layer(layer_tag));
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::span<const std::size_t> columns() const noexcept { return columns_; }

    [[nodiscard]] std::optional<std::size_t> pixel_of(std::size_t column) const
    {
        auto it = pixel_of_.find(column);
        if (it == pixel_of_.end()) return std::nullopt;
        return it->second;
    }

    // Gray levels of one observation in pixel order.
    [[nodiscard]] std::vector<double> background(const Observation& m) const
    {
        std::vector<double> out;
        out.reserve(columns_.size());
        for (std::size_t c : columns_) out.push_back(m[c]);
        return out;
    }

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<std::size_t> columns_;
    std::unordered_map<std::size_t, std::size_t> pixel_of_;
};

struct PixelClassMap {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<PixelClass> classes;  // row-major

    [[nodiscard]] PixelClass at(std::size_t row, std::size_t col) const
    {
        return classes[row * width + col];
    }
    [[nodiscard]] std::size_t count(PixelClass c) const
    {
        return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), c));
    }
};

inline PixelClassMap classify_pixels(const Conjunction& interpolant, const PixelLayout& layout)
{
    PixelClassMap map{layout.width(), layout.height(),
                      std::vector<PixelClass>(layout.width() * layout.height(),
                                              PixelClass::unconstrained)};
    for (const Atom& a : interpolant.atoms()) {
        const auto pixel = layout.pixel_of(a.observable);
        if (!pixel)
            throw RenderError("atom on column " + std::to_string(a.observable) +
                              " is outside the pixel layout");
        PixelClass cls;
        switch (a.relation) {
        case Relation::le: cls = PixelClass::upper_bound; break;
        case Relation::ge: cls = PixelClass::lower_bound; break;
        default:
            throw RenderError("equality atom at pixel " + std::to_string(*pixel) +
                              " has no bound direction");
        }
        auto& slot = map.classes[*pixel];
        if (slot != PixelClass::unconstrained && slot != cls)
            throw RenderError("pixel (" + std::to_string(*pixel / layout.width()) + ", " +
                              std::to_string(*pixel % layout.width()) +
                              ") has both an upper and a lower bound");
        slot = cls;
    }
    return map;
}

/// Binary PPM (P6). With a background, each channel is
/// (3 * class_color + gray + 2) / 4 in integer arithmetic, gray being the
/// background value clamped to [0, 1] and scaled to 0..255.
inline void write_ppm(const PixelClassMap& map, std::optional<std::span<const double>> background,
                      std::ostream& os)
{
    const std::size_t n = map.width * map.height;
    if (map.classes.size() != n) throw RenderError("pixel map size does not match its dimensions");
    if (background && background->size() != n)
        throw RenderError("background has " + std::to_string(background->size()) +
                          " values, expected " + std::to_string(n));

    os << "P6\n" << map.width << ' ' << map.height << "\n255\n";
    std::vector<char> payload;
    payload.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Rgb c = color_of(map.classes[i]);
        unsigned gray = 0;
        if (background) {
            const double v = std::clamp((*background)[i], 0.0, 1.0);
            gray = static_cast<unsigned>(std::lround(v * 255.0));
        }
        for (std::uint8_t channel : c) {
            const unsigned out = background ? (3u * channel + gray + 2u) / 4u : channel;
            payload.push_back(static_cast<char>(static_cast<std::uint8_t>(out)));
        }
    }
    os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

inline void write_image(const PixelClassMap& map, std::optional<std::span<const double>> background,
                        const std::filesystem::path& out_path)
{
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw RenderError("cannot open '" + out_path.string() + "' for writing");
    write_ppm(map, background, f);
    if (!f.flush()) throw RenderError("failed writing '" + out_path.string() + "'");
}

}  // namespace bitp
