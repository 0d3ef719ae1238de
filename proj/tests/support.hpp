#pragma once

#include <bitp/bitp.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace bitp::testing {

inline Observable real(std::string name, std::string layer, std::size_t index = 0)
{
    return {std::move(name), RangeKind::real, std::move(layer), index, {}};
}
inline Observable integer(std::string name, std::string layer, std::size_t index = 0)
{
    return {std::move(name), RangeKind::integer, std::move(layer), index, {}};
}
inline Observable label(std::string name = "b")
{
    return {std::move(name), RangeKind::categorical, "output", 0, {"0", "1"}};
}

// Atom "b = 1" on a label column.
inline Atom positive(const Table& t, std::string_view name = "b")
{
    return make_category_atom(t, name, "1");
}

/// One observable v, premise A = (a = 1), conclusion B = (b = 1).
/// Positives: v in {2,3,4,4,5,5,6,6}, the two 6s being the A rows.
/// Negatives: v in {1,3,7,8}.
inline std::shared_ptr<const Table> single_atom_fixture()
{
    TableBuilder tb({real("v", "hidden"), integer("a", "input"), label()});
    for (double v : {2, 3, 4, 4, 5, 5}) tb.add_row({v, 0, 1});
    tb.add_row({6, 1, 1}).add_row({6, 1, 1});
    for (double v : {1, 3, 7, 8}) tb.add_row({v, 0, 0});
    return std::move(tb).build("single-atom fixture");
}

/// Two observables v1, v2 and a unique id per row; the premise is row 0.
inline std::shared_ptr<const Table> boosting_fixture()
{
    TableBuilder tb({integer("id", "input"), real("v1", "hidden", 0), real("v2", "hidden", 1),
                     label()});
    const double rows[][3] = {{5, 2, 1},   {4, 3, 1}, {6, 1, 1}, {7, 4, 1}, {3, 2.5, 1},
                              {1, 5, 1},   {8, 6, 0}, {5, 7, 0}, {1, 3, 0}, {2, 2, 0},
                              {0.5, 1, 0}};
    double id = 0;
    for (const auto& r : rows) tb.add_row({id++, r[0], r[1], r[2]});
    return std::move(tb).build("boosting fixture");
}

struct RandomCase {
    std::shared_ptr<const Table> table;
    Conjunction premise;  // g = k on the group column, or id = k
    Atom conclusion;      // b = 1
    std::vector<std::size_t> vocabulary;
};

/// Random table: `id` (unique), `g` (group in 0..3), hidden reals h0..,
/// quantized to `levels` values when levels > 0 so columns have ties, and a
/// label b correlated with h0 so interpolants are not trivial.
inline RandomCase random_case(std::uint64_t seed, std::size_t rows, std::size_t n_hidden,
                              std::size_t levels)
{
    SynthRng rng(seed);
    std::vector<Observable> obs{integer("id", "input", 0), integer("g", "input", 1)};
    for (std::size_t i = 0; i < n_hidden; ++i)
        obs.push_back(real("h" + std::to_string(i), "hidden", i));
    obs.push_back(label());

    for (;;) {
        TableBuilder tb(obs);
        std::vector<double> row(obs.size());
        for (std::size_t r = 0; r < rows; ++r) {
            row[0] = static_cast<double>(r);
            row[1] = static_cast<double>(rng.below(4));
            for (std::size_t i = 0; i < n_hidden; ++i) {
                double v = rng.uniform();
                if (levels > 0) v = static_cast<double>(rng.below(levels));
                row[2 + i] = v;
            }
            const double h0 = levels > 0 ? row[2] / static_cast<double>(levels) : row[2];
            row.back() = rng.uniform() < 0.15 + 0.7 * h0 ? 1.0 : 0.0;
            tb.add_row(row);
        }
        auto table = std::move(tb).build("random seed=" + std::to_string(seed));
        RandomCase rc{table, {}, positive(*table), {}};
        for (std::size_t i = 0; i < n_hidden; ++i) rc.vocabulary.push_back(2 + i);

        // Premise: a group (several rows) on even seeds, a single row otherwise.
        // Retry until both premise and conclusion have support.
        Dataset d(table);
        const std::size_t col = seed % 2 == 0 ? 1 : 0;
        const double key =
            col == 1 ? static_cast<double>(rng.below(4)) : static_cast<double>(rng.below(rows));
        rc.premise = Conjunction({Atom{col, Relation::eq, key}});
        if (d.count(rc.premise) > 0 && d.count(rc.conclusion) > 0) return rc;
    }
}

inline std::filesystem::path data_dir()
{
    return std::filesystem::path(BITP_TEST_DATA_DIR);
}

// Fresh scratch directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("bitp-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace bitp::testing
