#pragma once

#include <bitp/dataset.hpp>
#include <bitp/error.hpp>
#include <bitp/metrics.hpp>
#include <bitp/miner.hpp>
#include <bitp/predicates.hpp>
#include <bitp/ratio.hpp>
#include <bitp/sequence.hpp>
#include <bitp/synth.hpp>

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace bitp {

using json = nlohmann::json;

inline constexpr std::string_view binary_magic = "BITP1";

namespace detail {

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) throw LoadError("cannot open '" + p.string() + "'");
    return std::string(std::istreambuf_iterator<char>(f), {});
}

inline void write_file(const std::filesystem::path& p, std::string_view bytes)
{
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + p.string() + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f.flush()) throw Error("failed writing '" + p.string() + "'");
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_real(std::string_view s)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_integer(std::string_view s)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return static_cast<double>(v);
}

// Parse one cell according to the observable's range kind.
inline double parse_cell(const Observable& obs, std::string_view text, std::size_t row)
{
    auto fail = [&](const std::string& why) -> double {
        throw LoadError("row " + std::to_string(row) + ", column '" + obs.name + "': " + why);
    };
    std::optional<double> v;
    switch (obs.range_kind) {
    case RangeKind::real: v = parse_real(text); break;
    case RangeKind::integer: v = parse_integer(text); break;
    case RangeKind::categorical:
        v = obs.category_code(text);
        if (!v) return fail("'" + std::string(text) + "' is not a declared category");
        break;
    }
    if (!v) return fail("cannot parse '" + std::string(text) + "' as " +
                        std::string(to_string(obs.range_kind)));
    if (!obs.admits(*v))
        return fail("value '" + std::string(text) + "' outside declared " +
                    std::string(to_string(obs.range_kind)) + " range");
    return *v;
}

inline std::string format_real(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline std::string format_cell(const Observable& obs, double v)
{
    switch (obs.range_kind) {
    case RangeKind::categorical: return obs.categories.at(static_cast<std::size_t>(v));
    case RangeKind::integer: return std::to_string(static_cast<long long>(v));
    case RangeKind::real: break;
    }
    return format_real(v);
}

}  // namespace detail

// ---------------------------------------------------------------- metadata

inline std::vector<Observable> observables_from_json(const json& meta)
{
    if (!meta.is_object() || !meta.contains("observables") || !meta["observables"].is_array())
        throw LoadError("metadata must be an object with an \"observables\" array");
    std::vector<Observable> out;
    for (std::size_t i = 0; i < meta["observables"].size(); ++i) {
        const json& o = meta["observables"][i];
        auto where = "metadata observable " + std::to_string(i);
        try {
            Observable obs;
            obs.name = o.at("name").get<std::string>();
            const auto kind = parse_range_kind(o.at("range_kind").get<std::string>());
            if (!kind) throw LoadError(where + ": unknown range_kind");
            obs.range_kind = *kind;
            obs.layer_tag = o.at("layer_tag").get<std::string>();
            obs.index_in_layer = o.at("index_in_layer").get<std::size_t>();
            if (o.contains("categories")) {
                for (const auto& c : o["categories"])
                    obs.categories.push_back(c.is_string() ? c.get<std::string>() : c.dump());
            }
            if (obs.range_kind == RangeKind::categorical && obs.categories.empty())
                throw LoadError(where + " ('" + obs.name + "'): categorical without categories");
            out.push_back(std::move(obs));
        } catch (const json::exception& e) {
            throw LoadError(where + ": " + e.what());
        }
    }
    if (out.empty()) throw LoadError("metadata declares no observables");
    return out;
}

inline json observables_to_json(const std::vector<Observable>& obs)
{
    json arr = json::array();
    for (const auto& o : obs) {
        json j{{"name", o.name},
               {"range_kind", std::string(to_string(o.range_kind))},
               {"layer_tag", o.layer_tag},
               {"index_in_layer", o.index_in_layer}};
        if (!o.categories.empty()) j["categories"] = o.categories;
        arr.push_back(std::move(j));
    }
    return json{{"observables", std::move(arr)}};
}

inline std::vector<Observable> load_metadata(const std::filesystem::path& path)
{
    json meta;
    try {
        meta = json::parse(detail::read_file(path));
    } catch (const json::parse_error& e) {
        throw LoadError("malformed metadata '" + path.string() + "': " + e.what());
    }
    return observables_from_json(meta);
}

// ---------------------------------------------------------------- data

inline std::shared_ptr<const Table> parse_csv(std::vector<Observable> obs, std::string_view text,
                                              std::string provenance = {})
{
    std::vector<std::vector<double>> cols(obs.size());
    std::size_t row = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty()) continue;

        std::size_t col = 0, start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            std::string_view field =
                detail::trim(line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                                : comma - start));
            if (col >= obs.size())
                throw LoadError("row " + std::to_string(row) + ": width mismatch, more than " +
                                std::to_string(obs.size()) + " values");
            cols[col].push_back(detail::parse_cell(obs[col], field, row));
            ++col;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (col != obs.size())
            throw LoadError("row " + std::to_string(row) + ": width mismatch, expected " +
                            std::to_string(obs.size()) + " values, got " + std::to_string(col));
        ++row;
    }
    return std::make_shared<const Table>(std::move(obs), std::move(cols), std::move(provenance));
}

inline std::shared_ptr<const Table> parse_binary(std::vector<Observable> obs, std::string_view bytes,
                                                 std::string provenance = {})
{
    if (bytes.substr(0, binary_magic.size()) != binary_magic)
        throw LoadError("binary table lacks the BITP1 magic");
    bytes.remove_prefix(binary_magic.size());
    const std::size_t width = obs.size() * 4;
    if (bytes.size() % width != 0)
        throw LoadError("binary payload of " + std::to_string(bytes.size()) +
                        " bytes is not a whole number of " + std::to_string(obs.size()) +
                        "-column rows");
    const std::size_t rows = bytes.size() / width;
    std::vector<std::vector<double>> cols(obs.size(), std::vector<double>(rows));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < obs.size(); ++c) {
            const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + r * width + c * 4;
            const std::uint32_t bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
                                       std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
            const double v = static_cast<double>(std::bit_cast<float>(bits));
            if (!obs[c].admits(v))
                throw LoadError("row " + std::to_string(r) + ", column '" + obs[c].name +
                                "': value " + detail::format_real(v) + " outside declared " +
                                std::string(to_string(obs[c].range_kind)) + " range");
            cols[c][r] = v;
        }
    return std::make_shared<const Table>(std::move(obs), std::move(cols), std::move(provenance));
}

/// Load a table from metadata JSON plus a data file, CSV or BITP1 binary
/// (detected by the magic bytes).
inline std::shared_ptr<const Table> load_table(const std::filesystem::path& metadata_path,
                                               const std::filesystem::path& data_path)
{
    auto obs = load_metadata(metadata_path);
    const std::string bytes = detail::read_file(data_path);
    const std::string provenance = data_path.filename().string();
    if (std::string_view(bytes).substr(0, binary_magic.size()) == binary_magic)
        return parse_binary(std::move(obs), bytes, provenance);
    return parse_csv(std::move(obs), bytes, provenance);
}

inline std::string to_csv(const Table& t)
{
    std::string out;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.cols(); ++c) {
            if (c) out += ',';
            out += detail::format_cell(t.observable(c), t.value(r, c));
        }
        out += '\n';
    }
    return out;
}

inline std::string to_binary(const Table& t)
{
    std::string out(binary_magic);
    out.reserve(binary_magic.size() + t.rows() * t.cols() * 4);
    for (std::size_t r = 0; r < t.rows(); ++r)
        for (std::size_t c = 0; c < t.cols(); ++c) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(t.value(r, c)));
            for (int b = 0; b < 4; ++b) out += static_cast<char>((bits >> (8 * b)) & 0xff);
        }
    return out;
}

inline void save_table(const Table& t, const std::filesystem::path& metadata_path,
                       const std::filesystem::path& data_path, bool binary = false)
{
    detail::write_file(metadata_path, observables_to_json(t.observables()).dump(2) + "\n");
    detail::write_file(data_path, binary ? to_binary(t) : to_csv(t));
}

// ---------------------------------------------------------------- formulas

inline json to_json(const Ratio& r)
{
    return json{{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

inline json atom_to_json(const Atom& a, const Table& t)
{
    const auto& obs = t.observable(a.observable);
    json j{{"observable", obs.name}, {"relation", std::string(to_string(a.relation))}};
    if (obs.range_kind == RangeKind::categorical)
        j["bound"] = obs.categories.at(static_cast<std::size_t>(a.bound));
    else if (obs.range_kind == RangeKind::integer)
        j["bound"] = static_cast<long long>(a.bound);
    else
        j["bound"] = a.bound;
    return j;
}

inline Atom atom_from_json(const json& j, const Table& t)
{
    try {
        const auto name = j.at("observable").get<std::string>();
        const auto rel = parse_relation(j.at("relation").get<std::string>());
        if (!rel) throw LoadError("unknown relation in atom on '" + name + "'");
        const json& b = j.at("bound");
        if (b.is_string()) {
            if (*rel != Relation::eq)
                throw LoadError("string bound requires relation eq (observable '" + name + "')");
            return make_category_atom(t, name, b.get<std::string>());
        }
        return make_atom(t, name, *rel, b.get<double>());
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed atom: ") + e.what());
    }
}

inline json conjunction_to_json(const Conjunction& phi, const Table& t)
{
    json arr = json::array();
    for (const auto& a : phi.atoms()) arr.push_back(atom_to_json(a, t));
    return arr;
}

inline Conjunction conjunction_from_json(const json& arr, const Table& t)
{
    if (!arr.is_array()) throw LoadError("conjunction must be a JSON array");
    std::vector<Atom> atoms;
    for (const auto& j : arr) atoms.push_back(atom_from_json(j, t));
    return Conjunction(std::move(atoms));
}

/// Parse a conclusion such as "w=7", "u_3 >= 0.5" or "x0<=2".
inline Atom parse_conclusion(const Table& t, std::string_view text)
{
    static constexpr std::string_view ops[] = {"<=", ">=", "="};
    for (std::string_view op : ops) {
        const auto at = text.find(op);
        if (at == std::string_view::npos) continue;
        const auto name = detail::trim(text.substr(0, at));
        const auto rhs = detail::trim(text.substr(at + op.size()));
        const auto rel = *parse_relation(op);
        const std::size_t c = t.index_of(name);
        const auto& obs = t.observable(c);
        if (obs.range_kind == RangeKind::categorical) {
            if (rel != Relation::eq)
                throw EvaluationError("conclusion on categorical '" + obs.name + "' must use '='");
            return make_category_atom(t, name, rhs);
        }
        const auto v = detail::parse_real(rhs);
        if (!v) throw EvaluationError("cannot parse bound '" + std::string(rhs) + "'");
        return make_atom(t, name, rel, *v);
    }
    throw EvaluationError("conclusion '" + std::string(text) + "' has no relation");
}

// ---------------------------------------------------------------- reports

inline json round_to_json(const RoundRecord& r, const Table& t, std::size_t index)
{
    return json{{"round", index + 1},
                {"atom", atom_to_json(r.atom, t)},
                {"precision", to_json(r.precision)},
                {"recall", to_json(r.recall)},
                {"surviving_rows", r.surviving_rows},
                {"surviving_positives", r.surviving_positives},
                {"gamma", r.gamma},
                {"conjoined", r.conjoined}};
}

inline json report_to_json(const InterpolantReport& rep, const Table& t)
{
    json trace = json::array();
    for (std::size_t i = 0; i < rep.trace.size(); ++i)
        trace.push_back(round_to_json(rep.trace[i], t, i));
    json j{{"train_precision", to_json(rep.train_precision)},
           {"train_recall", to_json(rep.train_recall)},
           {"complexity", rep.complexity},
           {"termination", std::string(to_string(rep.termination))},
           {"trace", std::move(trace)}};
    if (!rep.diagnostic.empty()) j["diagnostic"] = rep.diagnostic;
    return j;
}

// Line-delimited JSON, one object per round.
inline std::string trace_to_ndjson(const InterpolantReport& rep, const Table& t)
{
    std::string out;
    for (std::size_t i = 0; i < rep.trace.size(); ++i)
        out += round_to_json(rep.trace[i], t, i).dump() + "\n";
    return out;
}

inline json params_to_json(const MiningParams& p)
{
    return json{{"alpha", p.alpha},
                {"gamma", p.gamma},
                {"mu", p.mu},
                {"kappa", p.kappa},
                {"vocabulary", p.vocabulary_tag}};
}

struct Provenance {
    std::optional<std::size_t> premise_row;
    std::string conclusion;
};

/// Contents of an interpolant file.
struct InterpolantFile {
    Conjunction conjuncts;
    MiningParams params;  // vocabulary holds only the tag
    Provenance provenance;
    std::optional<json> report;
};

inline json interpolant_to_json(const Conjunction& phi, const MiningParams& params,
                                const Provenance& prov, const Table& t,
                                const InterpolantReport* report = nullptr)
{
    json provj{{"conclusion", prov.conclusion}};
    provj["premise_row"] = prov.premise_row ? json(*prov.premise_row) : json(nullptr);
    json j{{"conjuncts", conjunction_to_json(phi, t)},
           {"params", params_to_json(params)},
           {"provenance", std::move(provj)}};
    if (report) j["report"] = report_to_json(*report, t);
    return j;
}

inline InterpolantFile interpolant_from_json(const json& j, const Table& t)
{
    InterpolantFile f;
    try {
        f.conjuncts = conjunction_from_json(j.at("conjuncts"), t);
        if (j.contains("params")) {
            const json& p = j["params"];
            f.params.alpha = p.value("alpha", f.params.alpha);
            f.params.gamma = p.value("gamma", f.params.gamma);
            f.params.mu = p.value("mu", f.params.mu);
            f.params.kappa = p.value("kappa", f.params.kappa);
            f.params.vocabulary_tag = p.value("vocabulary", std::string());
        }
        if (j.contains("provenance")) {
            const json& p = j["provenance"];
            if (p.contains("premise_row") && !p["premise_row"].is_null())
                f.provenance.premise_row = p["premise_row"].get<std::size_t>();
            f.provenance.conclusion = p.value("conclusion", std::string());
        }
        if (j.contains("report")) f.report = j["report"];
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed interpolant file: ") + e.what());
    }
    return f;
}

inline json parse_json_file(const std::filesystem::path& path)
{
    try {
        return json::parse(detail::read_file(path));
    } catch (const json::parse_error& e) {
        throw LoadError("malformed JSON '" + path.string() + "': " + e.what());
    }
}

// ---------------------------------------------------------------- sequence

inline json sequence_to_json(const SequenceInterpolant& s, const MiningParams& params,
                             const Provenance& prov, const Table& t)
{
    json parts = json::array();
    json stage1_parts = json::array();
    for (std::size_t i = 0; i < s.parts.size(); ++i) {
        const auto& p = s.parts[i];
        json vocab = json::array();
        for (std::size_t c : p.vocabulary) vocab.push_back(t.observable(c).name);
        json pj{{"stage2_atom", atom_to_json(p.stage2_atom, t)},
                {"vocabulary", std::move(vocab)},
                {"failed", p.failed}};
        if (p.failed)
            pj["failure"] = p.failure;
        else
            pj["report"] = report_to_json(p.report, t);
        parts.push_back(std::move(pj));
        stage1_parts.push_back(conjunction_to_json(s.stage1_parts[i], t));
    }
    json provj{{"conclusion", prov.conclusion}};
    provj["premise_row"] = prov.premise_row ? json(*prov.premise_row) : json(nullptr);
    return json{{"stage2", conjunction_to_json(s.stage2, t)},
                {"stage1_parts", std::move(stage1_parts)},
                {"stage1", conjunction_to_json(s.stage1, t)},
                {"stage1_atom_count", s.stage1_atom_count()},
                {"failed_parts", s.failed_parts()},
                {"parts", std::move(parts)},
                {"params", params_to_json(params)},
                {"provenance", std::move(provj)}};
}

inline DependencyMap dependency_map_from_json(const json& j)
{
    if (!j.is_object()) throw LoadError("dependency map must be a JSON object");
    std::map<std::string, std::vector<std::string>> entries;
    try {
        for (const auto& [k, v] : j.items()) entries[k] = v.get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed dependency map: ") + e.what());
    }
    return DependencyMap(std::move(entries));
}

inline json dependency_map_to_json(const DependencyMap& m)
{
    json j = json::object();
    for (const auto& [k, v] : m.entries()) j[k] = v;
    return j;
}

// ---------------------------------------------------------------- metrics

inline json eval_to_json(const EvalResult& r)
{
    auto opt = [](const std::optional<Ratio>& x) { return x ? to_json(*x) : json(nullptr); };
    return json{{"precision", opt(r.precision())},
                {"recall", opt(r.recall())},
                {"support", r.support},
                {"b_support", r.b_support},
                {"true_positives", r.true_positives},
                {"rows", r.rows},
                {"complexity", r.complexity}};
}

inline json annotation_to_json(const SynthAnnotation& a)
{
    json j{{"rule", a.rule},
           {"seed", a.seed},
           {"n_rows", a.n_rows},
           {"rule_support", a.rule_support},
           {"positives", a.positives},
           {"true_positives", a.true_positives},
           {"precision_target", a.precision_target},
           {"noise", a.noise},
           {"realized_precision", to_json(a.realized_precision)}};
    j["recall_target"] = a.recall_target ? json(*a.recall_target) : json(nullptr);
    j["realized_recall"] = a.realized_recall ? to_json(*a.realized_recall) : json(nullptr);
    return j;
}

}  // namespace bitp
