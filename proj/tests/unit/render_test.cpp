#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace bitp;
using namespace bitp::testing;

namespace {

std::shared_ptr<const Table> grid(std::size_t side)
{
    std::vector<Observable> obs;
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c)
            obs.push_back(real("p_" + std::to_string(r) + "_" + std::to_string(c), "input",
                               r * side + c));
    TableBuilder tb(obs);
    std::vector<double> row(obs.size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = double(i % 5) / 4;
    tb.add_row(row);
    return std::move(tb).build();
}

std::string ppm(const PixelClassMap& m, std::optional<std::span<const double>> bg = std::nullopt)
{
    std::ostringstream os;
    write_ppm(m, bg, os);
    return os.str();
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST(ClassifyPixels, EmptyInterpolantIsUnconstrained)
{
    auto t = grid(28);
    const auto m = classify_pixels(Conjunction{}, PixelLayout::from_layer(*t, "input", 28, 28));
    EXPECT_EQ(m.count(PixelClass::unconstrained), 784u);
}

TEST(ClassifyPixels, OneUpperOneLower)
{
    auto t = grid(28);
    const Conjunction i({make_atom(*t, "p_3_4", Relation::le, 0.1),
                         make_atom(*t, "p_10_11", Relation::ge, 0.9)});
    const auto m = classify_pixels(i, PixelLayout::from_layer(*t, "input", 28, 28));
    EXPECT_EQ(m.count(PixelClass::upper_bound), 1u);
    EXPECT_EQ(m.count(PixelClass::lower_bound), 1u);
    EXPECT_EQ(m.at(3, 4), PixelClass::upper_bound);
    EXPECT_EQ(m.at(10, 11), PixelClass::lower_bound);
}

TEST(ClassifyPixels, TwelveAtomsTwelvePixels)
{
    auto t = grid(28);
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < 12; ++k)
        atoms.push_back(Atom{k * 61 % 784, k % 3 ? Relation::le : Relation::ge, 0.5});
    const auto m = classify_pixels(Conjunction(atoms), PixelLayout::from_layer(*t, "input", 28, 28));
    EXPECT_EQ(m.count(PixelClass::unconstrained), 772u);
    EXPECT_EQ(m.count(PixelClass::upper_bound) + m.count(PixelClass::lower_bound), 12u);
}

TEST(ClassifyPixels, ConflictsAndStrayAtomsAreErrors)
{
    auto t = grid(2);
    const auto layout = PixelLayout::from_layer(*t, "input", 2, 2);
    try {
        (void)classify_pixels(Conjunction({Atom{3, Relation::le, 0.2}, Atom{3, Relation::ge, 0.1}}),
                              layout);
        FAIL() << "conflict not reported";
    } catch (const RenderError& e) {
        EXPECT_NE(std::string(e.what()).find("(1, 1)"), std::string::npos);
    }
    EXPECT_THROW((void)classify_pixels(Conjunction({Atom{9, Relation::le, 0}}), layout),
                 RenderError);
    EXPECT_THROW((void)classify_pixels(Conjunction({Atom{0, Relation::eq, 0}}), layout),
                 RenderError);
    // Repeating the same direction on a pixel is not a conflict.
    EXPECT_NO_THROW((void)classify_pixels(
        Conjunction({Atom{1, Relation::le, 0.2}, Atom{1, Relation::le, 0.1}}), layout));
    EXPECT_THROW(PixelLayout::from_layer(*t, "input", 3, 3), RenderError);
}

TEST(WritePpm, AllUnconstrainedTwoByTwo)
{
    const PixelClassMap m{2, 2, std::vector<PixelClass>(4, PixelClass::unconstrained)};
    const std::string out = ppm(m);
    const std::string header = "P6\n2 2\n255\n";
    ASSERT_EQ(out.size(), header.size() + 12);
    EXPECT_EQ(out.substr(0, header.size()), header);
    for (std::size_t i = header.size(); i < out.size(); i += 3) {
        EXPECT_EQ(static_cast<unsigned char>(out[i]), 180);
        EXPECT_EQ(static_cast<unsigned char>(out[i + 1]), 220);
        EXPECT_EQ(static_cast<unsigned char>(out[i + 2]), 180);
    }
}

TEST(WritePpm, SingleMagentaPixel)
{
    const PixelClassMap m{1, 1, {PixelClass::upper_bound}};
    EXPECT_EQ(ppm(m), std::string("P6\n1 1\n255\n\xC0\x00\xA0", 14));
}

TEST(WritePpm, BackgroundBlend)
{
    const PixelClassMap m{2, 1, {PixelClass::lower_bound, PixelClass::unconstrained}};
    const double bg[] = {1.0, 0.0};
    // (3*255 + 255 + 2)/4 = 255, (3*240 + 255 + 2)/4 = 244, (3*64 + 255 + 2)/4 = 112;
    // (3*180 + 0 + 2)/4 = 135, (3*220 + 2)/4 = 165.
    EXPECT_EQ(ppm(m, std::span<const double>(bg)),
              std::string("P6\n2 1\n255\n\xFF\xF4\x70\x87\xA5\x87", 17));
    const double short_bg[] = {0.5};
    EXPECT_THROW((void)ppm(m, std::span<const double>(short_bg)), RenderError);
}

TEST(WriteImage, UnwritablePath)
{
    const PixelClassMap m{1, 1, {PixelClass::upper_bound}};
    EXPECT_THROW(write_image(m, std::nullopt, "/nonexistent-dir/x.ppm"), RenderError);
}

// Frozen output: the interpolant file and table in tests/data were rendered
// once and the PPM bytes checked in.
TEST(RenderGolden, StoredInterpolant28x28)
{
    const auto dir = data_dir();
    auto t = load_table(dir / "render28.meta.json", dir / "render28.csv");
    const auto f = interpolant_from_json(parse_json_file(dir / "render28.interp.json"), *t);
    const auto layout = PixelLayout::from_layer(*t, "input", 28, 28);
    const auto m = classify_pixels(f.conjuncts, layout);
    EXPECT_EQ(ppm(m), slurp(dir / "render28.ppm"));
    const auto bg = layout.background(Observation{t.get(), 0});
    EXPECT_EQ(ppm(m, std::span<const double>(bg)), slurp(dir / "render28_bg.ppm"));
}
