#include "cli.hpp"

#include <bitp/bitp.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitp::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    // shared
    std::string config;
    std::string manifest;
    std::string out;
    unsigned jobs = 1;
    // data and premises
    std::string train;
    std::string test;
    std::vector<std::size_t> rows;
    std::size_t premises = 0;
    std::string input_layer = "input";
    std::string conclusion;
    std::string vocab;
    std::string trace;
    std::string depmap;
    std::string interp;
    // mining; defaults are the settings the method was evaluated with, and
    // a cap of 10 conjuncts, well above the 3-4 typically produced
    double alpha = 0.98;
    double gamma = 0.55;
    double mu = 0.9;
    std::size_t kappa = 10;
    // sweep
    std::string gammas = "0.55";
    std::string mus = "0.9";
    std::string gnuplot;
    // synth
    std::uint64_t seed = 1;
    std::size_t n_rows = 1000;
    std::size_t hidden = 4;
    std::size_t levels = 0;
    std::size_t image_side = 0;
    std::string rule;
    double precision = 1.0;
    double recall = 1.0;
    double noise = 0.0;
    bool binary = false;
    // render
    std::string table;
    std::string layer = "input";
    std::size_t width = 0;
    std::size_t height = 0;
    long background_row = -1;
};

std::string hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Hashes of everything read and written, plus the resolved configuration.
class Manifest {
public:
    json config = json::object();

    void input(const fs::path& p)
    {
        const std::string bytes = detail::read_file(p);
        inputs_.push_back({{"path", p.generic_string()}, {"fnv1a64", hex(fnv1a(bytes))}});
    }

    void artifact(const std::string& path, std::string_view bytes)
    {
        artifacts_.push_back(
            {{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", hex(fnv1a(bytes))}});
    }

    // Returns the manifest hash.
    std::string write(const fs::path& path, std::string_view subcommand) const
    {
        json m{{"tool", "bitp"},
               {"subcommand", subcommand},
               {"config", config},
               {"inputs", inputs_},
               {"artifacts", artifacts_}};
        const std::string h = hex(fnv1a(m.dump()));
        m["manifest_hash"] = h;
        detail::write_file(path, m.dump(2) + "\n");
        return h;
    }

private:
    json inputs_ = json::array();
    json artifacts_ = json::array();
};

Manifest start(const Opts& o)
{
    Manifest m;
    if (!o.config.empty()) m.input(o.config);
    return m;
}

void emit(const std::string& path, const std::string& bytes, std::ostream& out, Manifest& m)
{
    if (path.empty() || path == "-") {
        out << bytes;
        m.artifact("-", bytes);
    } else {
        detail::write_file(path, bytes);
        m.artifact(path, bytes);
    }
}

fs::path manifest_path(const Opts& o, std::string_view cmd)
{
    if (!o.manifest.empty()) return o.manifest;
    if (!o.out.empty() && o.out != "-") return o.out + ".manifest.json";
    return "bitp-" + std::string(cmd) + ".manifest.json";
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// A table is named by its metadata file, its data file, or the shared stem:
// `t` means t.meta.json with t.csv (or t.bin).
struct TablePaths {
    fs::path meta;
    fs::path data;
};

TablePaths resolve_table(const std::string& spec)
{
    if (spec.empty()) throw UsageError("missing table path");
    std::string stem = spec;
    std::optional<fs::path> data;
    if (ends_with(spec, ".meta.json")) {
        stem = spec.substr(0, spec.size() - 10);
    } else if (ends_with(spec, ".csv") || ends_with(spec, ".bin")) {
        stem = spec.substr(0, spec.size() - 4);
        data = spec;
    }
    if (!data) {
        if (fs::exists(stem + ".csv"))
            data = stem + ".csv";
        else if (fs::exists(stem + ".bin"))
            data = stem + ".bin";
        else
            throw LoadError("no data file " + stem + ".csv or " + stem + ".bin");
    }
    return {stem + ".meta.json", *data};
}

std::shared_ptr<const Table> load(const std::string& spec, Manifest& m)
{
    const TablePaths p = resolve_table(spec);
    auto t = load_table(p.meta, p.data);
    m.input(p.meta);
    m.input(p.data);
    return t;
}

json load_json(const std::string& path, Manifest& m)
{
    json j = parse_json_file(path);
    m.input(path);
    return j;
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t at = s.find(sep, start);
        out.emplace_back(detail::trim(s.substr(start, at == std::string_view::npos ? s.npos : at - start)));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return out;
}

// "layer:TAG", "list:a,b,c", or a bare layer tag.
std::vector<std::size_t> resolve_vocab(const Table& t, const std::string& sel)
{
    if (sel.empty()) throw UsageError("--vocab is required");
    std::vector<std::size_t> cols;
    if (sel.rfind("list:", 0) == 0) {
        for (const auto& name : split(std::string_view(sel).substr(5), ','))
            cols.push_back(t.index_of(name));
    } else {
        const std::string tag = sel.rfind("layer:", 0) == 0 ? sel.substr(6) : sel;
        cols = t.layer(tag);
        if (cols.empty()) throw ContractError("layer '" + tag + "' has no observables");
    }
    return normalized_vocabulary(std::move(cols));
}

double parse_number(const std::string& s, const char* what)
{
    const auto v = detail::parse_real(s);
    if (!v) throw UsageError(std::string("cannot parse ") + what + " value '" + s + "'");
    return *v;
}

// "a:b:step" (inclusive of b) or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec, const char* what)
{
    std::vector<double> out;
    const auto parts = split(spec, ':');
    if (parts.size() == 3) {
        const double a = parse_number(parts[0], what), b = parse_number(parts[1], what),
                     step = parse_number(parts[2], what);
        if (!(step > 0) || b < a) throw UsageError(std::string("bad ") + what + " range " + spec);
        for (std::size_t i = 0;; ++i) {
            // Round away the drift of a + i*step so 0.35 + 0.05 prints as 0.4.
            const double v = std::round((a + double(i) * step) * 1e12) / 1e12;
            if (v > b + 1e-9) break;
            out.push_back(v);
        }
    } else if (parts.size() == 1) {
        for (const auto& s : split(spec, ',')) out.push_back(parse_number(s, what));
    } else {
        throw UsageError(std::string("bad ") + what + " grid '" + spec + "'");
    }
    return out;
}

MiningParams params_from(const Opts& o, const Table& t, const std::string& vocab)
{
    MiningParams p;
    p.alpha = o.alpha;
    p.gamma = o.gamma;
    p.mu = o.mu;
    p.kappa = o.kappa;
    p.vocabulary = resolve_vocab(t, vocab);
    p.vocabulary_tag = vocab;
    p.validate(t);
    return p;
}

json params_echo(const Opts& o)
{
    return {{"alpha", o.alpha}, {"gamma", o.gamma}, {"mu", o.mu}, {"kappa", o.kappa}};
}

std::string summary(const InterpolantReport& r, const Table& t)
{
    std::ostringstream os;
    os << describe(r.interpolant, t) << " (precision " << r.train_precision << ", recall "
       << r.train_recall << ", " << to_string(r.termination) << ")";
    return os.str();
}

// ---------------------------------------------------------------- commands

int cmd_mine(const Opts& o, std::ostream& out, std::ostream& err)
{
    Manifest m = start(o);
    m.config = params_echo(o);
    m.config.update({{"train", o.train}, {"rows", o.rows}, {"conclusion", o.conclusion},
                     {"vocab", o.vocab}, {"input_layer", o.input_layer}, {"trace", o.trace},
                     {"out", o.out}, {"jobs", o.jobs}});
    auto table = load(o.train, m);
    const Table& t = *table;
    const Atom b = parse_conclusion(t, o.conclusion);
    const MiningParams p = params_from(o, t, o.vocab);
    const Dataset d(table);

    std::vector<InterpolantReport> reports(o.rows.size());
    FractileCache cache;
    parallel_for(o.rows.size(), o.jobs, [&](std::size_t i) {
        reports[i] = conj_interp(Premise(table, o.rows[i], o.input_layer), b, d, p, &cache);
    });

    json result = json::array();
    std::string trace;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        result.push_back(
            interpolant_to_json(reports[i].interpolant, p, {o.rows[i], o.conclusion}, t, &reports[i]));
        for (std::size_t k = 0; k < reports[i].trace.size(); ++k) {
            json line = round_to_json(reports[i].trace[k], t, k);
            line["premise_row"] = o.rows[i];
            trace += line.dump() + "\n";
        }
        err << "row " << o.rows[i] << ": " << summary(reports[i], t) << "\n";
    }
    if (result.size() == 1) result = result[0];
    emit(o.out, result.dump(2) + "\n", out, m);
    if (!o.trace.empty()) emit(o.trace, trace, out, m);
    m.write(manifest_path(o, "mine"), "mine");
    return ok;
}

int cmd_mine_seq(const Opts& o, std::ostream& out, std::ostream& err)
{
    if (o.rows.size() != 1) throw UsageError("mine-seq takes exactly one --row");
    Manifest m = start(o);
    m.config = params_echo(o);
    m.config.update({{"train", o.train}, {"row", o.rows[0]}, {"conclusion", o.conclusion},
                     {"vocab", o.vocab}, {"depmap", o.depmap}, {"input_layer", o.input_layer},
                     {"out", o.out}, {"jobs", o.jobs}});
    auto table = load(o.train, m);
    const Table& t = *table;
    const Atom b = parse_conclusion(t, o.conclusion);
    const MiningParams p = params_from(o, t, o.vocab);
    const DependencyMap deps = dependency_map_from_json(load_json(o.depmap, m));
    const Dataset d(table);
    const Premise premise(table, o.rows[0], o.input_layer);

    FractileCache cache;
    const InterpolantReport stage2 = conj_interp(premise, b, d, p, &cache);
    err << "stage 2: " << summary(stage2, t) << "\n";
    SequenceOptions opt;
    opt.params = p;
    opt.jobs = o.jobs;
    const SequenceInterpolant seq = sequence_interp(premise, stage2.interpolant, d, deps, opt, &cache);
    err << "stage 1: " << seq.stage1_atom_count() << " atoms from " << seq.parts.size()
        << " parts, " << seq.failed_parts() << " failed\n";

    json j = sequence_to_json(seq, p, {o.rows[0], o.conclusion}, t);
    j["stage2_report"] = report_to_json(stage2, t);
    emit(o.out, j.dump(2) + "\n", out, m);
    m.write(manifest_path(o, "mine-seq"), "mine-seq");
    return ok;
}

std::string conclusion_of(const Opts& o, const InterpolantFile& f)
{
    if (!o.conclusion.empty()) return o.conclusion;
    if (f.provenance.conclusion.empty())
        throw UsageError("interpolant file names no conclusion; pass --conclusion");
    return f.provenance.conclusion;
}

json with_provenance(json j, const InterpolantFile& f, const std::string& conclusion)
{
    j["conclusion"] = conclusion;
    j["premise_row"] = f.provenance.premise_row ? json(*f.provenance.premise_row) : json(nullptr);
    return j;
}

int cmd_eval(const Opts& o, std::ostream& out, std::ostream& err)
{
    Manifest m = start(o);
    m.config = {{"interp", o.interp}, {"test", o.test}, {"conclusion", o.conclusion},
                {"out", o.out}};
    const json file = load_json(o.interp, m);
    auto table = load(o.test, m);
    const Table& t = *table;
    const Dataset test(table);

    json result;
    if (file.is_array()) {
        std::vector<EvalCase> cases;
        json results = json::array();
        std::size_t undefined = 0;
        for (const auto& item : file) {
            const auto f = interpolant_from_json(item, t);
            const std::string c = conclusion_of(o, f);
            cases.push_back({f.conjuncts, Conjunction({parse_conclusion(t, c)})});
            const EvalResult r = evaluate(cases.back().interpolant, cases.back().conclusion, test);
            undefined += !r.precision();
            results.push_back(with_provenance(eval_to_json(r), f, c));
        }
        const auto pooled = pooled_precision(cases, test);
        result = {{"results", std::move(results)},
                  {"pooled_precision", pooled ? to_json(*pooled) : json(nullptr)},
                  {"n_undefined", undefined},
                  {"n_total", cases.size()}};
        err << cases.size() << " interpolants, " << undefined << " with zero test support\n";
    } else if (file.is_object() && file.contains("stage1")) {
        json as_interp = file;
        as_interp["conjuncts"] = file["stage1"];
        const auto f = interpolant_from_json(as_interp, t);
        const std::string c = conclusion_of(o, f);
        const Atom b = parse_conclusion(t, c);
        const Conjunction stage2 = conjunction_from_json(file.at("stage2"), t);
        result = with_provenance(json::object(), f, c);
        result["stage1"] = eval_to_json(evaluate(f.conjuncts, b, test));
        result["stage2"] = eval_to_json(evaluate(stage2, b, test));
    } else {
        const auto f = interpolant_from_json(file, t);
        const std::string c = conclusion_of(o, f);
        const EvalResult r = evaluate(f.conjuncts, parse_conclusion(t, c), test);
        result = with_provenance(eval_to_json(r), f, c);
        err << "support " << r.support << ", true positives " << r.true_positives << "\n";
    }
    emit(o.out, result.dump(2) + "\n", out, m);
    m.write(manifest_path(o, "eval"), "eval");
    return ok;
}

int cmd_sweep(const Opts& o, std::ostream& out, std::ostream& err)
{
    Manifest m = start(o);
    m.config = {{"train", o.train},     {"test", o.test},         {"rows", o.rows},
                {"premises", o.premises}, {"conclusion", o.conclusion}, {"vocab", o.vocab},
                {"input_layer", o.input_layer}, {"alpha", o.alpha}, {"kappa", o.kappa},
                {"gammas", o.gammas},   {"mus", o.mus},           {"out", o.out},
                {"gnuplot", o.gnuplot}, {"jobs", o.jobs}};
    SweepConfig cfg;
    cfg.alpha = o.alpha;
    cfg.kappa = o.kappa;
    cfg.gammas = parse_grid(o.gammas, "gamma");
    cfg.mus = parse_grid(o.mus, "mu");
    cfg.jobs = o.jobs;

    auto train = load(o.train, m);
    auto test = o.test.empty() ? train : load(o.test, m);
    if (!train->same_schema(*test)) throw LoadError("train and test tables have different schemas");
    const Atom b = parse_conclusion(*train, o.conclusion);
    cfg.vocabulary = resolve_vocab(*train, o.vocab);
    cfg.vocabulary_tag = o.vocab;

    std::vector<std::size_t> rows = o.rows;
    if (rows.empty()) {
        if (o.premises == 0) throw UsageError("sweep needs --row or --premises");
        for (std::size_t r = 0; r < train->rows() && rows.size() < o.premises; ++r)
            if (b.holds(*train, r)) rows.push_back(r);
        if (rows.size() < o.premises)
            throw ContractError("only " + std::to_string(rows.size()) +
                                " training rows satisfy the conclusion");
    }
    std::vector<PremiseCase> batch;
    for (std::size_t r : rows)
        batch.push_back({Premise(train, r, o.input_layer), Conjunction({b})});

    const SweepResult res = sweep(batch, Dataset(train), Dataset(test), cfg);
    std::ostringstream csv, plot;
    write_sweep_csv(res, csv);
    emit(o.out, csv.str(), out, m);
    if (!o.gnuplot.empty()) {
        write_sweep_gnuplot(res, plot);
        emit(o.gnuplot, plot.str(), out, m);
    }
    err << res.points.size() << " grid points x " << batch.size() << " premises\n";
    m.write(manifest_path(o, "sweep"), "sweep");
    return ok;
}

std::vector<PlantedAtom> parse_rule(const std::string& text, const SynthSpec& spec)
{
    const auto names = hidden_names(spec);
    std::vector<PlantedAtom> rule;
    for (const auto& part : split(text, ',')) {
        std::optional<PlantedAtom> atom;
        for (std::string_view op : {"<=", ">="}) {
            const auto at = part.find(op);
            if (at == std::string::npos) continue;
            const std::string name(detail::trim(std::string_view(part).substr(0, at)));
            const auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) throw UsageError("rule names unknown observable '" + name + "'");
            atom = PlantedAtom{static_cast<std::size_t>(it - names.begin()), *parse_relation(op),
                               parse_number(part.substr(at + 2), "rule bound")};
            break;
        }
        if (!atom) throw UsageError("rule atom '" + part + "' needs <= or >=");
        rule.push_back(*atom);
    }
    return rule;
}

int cmd_synth(const Opts& o, const CLI::App& sub, std::ostream& out, std::ostream& err)
{
    if (o.out.empty() || o.out == "-") throw UsageError("synth needs -o PREFIX");
    SynthSpec spec;
    spec.seed = o.seed;
    spec.n_rows = o.n_rows;
    spec.n_hidden = o.hidden;
    spec.value_levels = o.levels;
    spec.image_side = o.image_side;
    if (sub.get_option("--precision")->count() > 0) spec.precision = o.precision;
    if (sub.get_option("--recall")->count() > 0) spec.recall = o.recall;
    spec.noise = o.noise;
    spec.rule = parse_rule(o.rule, spec);

    Manifest m = start(o);
    m.config = {{"seed", o.seed},   {"rows", o.n_rows},         {"hidden", o.hidden},
                {"levels", o.levels}, {"image_side", o.image_side}, {"rule", o.rule},
                {"noise", o.noise}, {"binary", o.binary},       {"out", o.out}};
    m.config["precision"] = spec.precision ? json(*spec.precision) : json(nullptr);
    m.config["recall"] = spec.recall ? json(*spec.recall) : json(nullptr);

    const SynthData s = generate(spec);
    emit(o.out + ".meta.json", observables_to_json(s.table->observables()).dump(2) + "\n", out, m);
    emit(o.out + (o.binary ? ".bin" : ".csv"), o.binary ? to_binary(*s.table) : to_csv(*s.table),
         out, m);
    emit(o.out + ".annotation.json", annotation_to_json(s.annotation).dump(2) + "\n", out, m);
    if (s.dependencies)
        emit(o.out + ".depmap.json", dependency_map_to_json(*s.dependencies).dump(2) + "\n", out, m);
    err << s.annotation.n_rows << " rows, rule " << s.annotation.rule << ": precision "
        << s.annotation.realized_precision << "\n";
    m.write(manifest_path(o, "synth"), "synth");
    return ok;
}

int cmd_render(const Opts& o, std::ostream& out, std::ostream& err)
{
    if (o.out.empty() || o.out == "-") throw UsageError("render needs -o FILE.ppm");
    Manifest m = start(o);
    m.config = {{"interp", o.interp}, {"table", o.table},   {"layer", o.layer},
                {"width", o.width},   {"height", o.height}, {"background_row", o.background_row},
                {"out", o.out}};
    const json file = load_json(o.interp, m);
    auto table = load(o.table, m);
    if (!file.is_object()) throw UsageError("render takes a single interpolant file");
    const json& conjuncts = file.contains("stage1") ? file["stage1"] : file.at("conjuncts");
    const Conjunction phi = conjunction_from_json(conjuncts, *table);

    std::size_t w = o.width, h = o.height;
    if (w == 0 || h == 0) {
        const std::size_t n = table->layer(o.layer).size();
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(double(n))));
        if (side * side != n || n == 0)
            throw UsageError("layer '" + o.layer + "' has " + std::to_string(n) +
                             " observables; pass --width and --height");
        w = h = side;
    }
    const auto layout = PixelLayout::from_layer(*table, o.layer, w, h);
    const PixelClassMap map = classify_pixels(phi, layout);
    std::optional<std::vector<double>> bg;
    if (o.background_row >= 0) {
        const auto row = static_cast<std::size_t>(o.background_row);
        if (row >= table->rows()) throw ContractError("background row out of range");
        bg = layout.background(Observation{table.get(), row});
    }
    std::ostringstream ppm;
    write_ppm(map, bg ? std::optional<std::span<const double>>(*bg) : std::nullopt, ppm);
    emit(o.out, ppm.str(), out, m);
    err << map.count(PixelClass::upper_bound) << " upper, " << map.count(PixelClass::lower_bound)
        << " lower, " << map.count(PixelClass::unconstrained) << " unconstrained\n";
    m.write(manifest_path(o, "render"), "render");
    return ok;
}

// ---------------------------------------------------------------- parsing

std::vector<std::string> config_inputs(const json& v)
{
    if (v.is_array()) {
        std::vector<std::string> out;
        for (const auto& e : v) {
            auto one = config_inputs(e);
            out.insert(out.end(), one.begin(), one.end());
        }
        return out;
    }
    if (v.is_string()) return {v.get<std::string>()};
    if (v.is_boolean()) return {v.get<bool>() ? "true" : "false"};
    if (v.is_number()) return {v.dump()};
    throw UsageError("config value " + v.dump() + " is not a scalar or list");
}

// Values from the JSON config fill in options not given on the command line.
void apply_config(CLI::App& sub, const std::string& path)
{
    if (path.empty()) return;
    const json cfg = parse_json_file(path);
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (!opt || key == "config") throw UsageError("config key '" + key + "' is not an option of " +
                                                      sub.get_name());
        if (opt->count() > 0) continue;
        opt->clear();
        for (const auto& s : config_inputs(value)) opt->add_result(s);
        opt->run_callback();
    }
}

void apply_jobs_env(CLI::App& sub, Opts& o)
{
    CLI::Option* opt = sub.get_option_no_throw("--jobs");
    if (!opt || opt->count() > 0) return;
    if (const char* env = std::getenv("BITP_JOBS"); env && *env) {
        const auto v = detail::parse_integer(env);
        if (!v || *v < 1) throw UsageError(std::string("BITP_JOBS must be a positive integer, got ") + env);
        o.jobs = static_cast<unsigned>(*v);
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Opts o;
    CLI::App app{"Mine, evaluate and render naive Bayesian interpolants.", "bitp"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON file of option values (flags take precedence)");
        sub->add_option("--manifest", o.manifest, "Manifest path (default: OUT.manifest.json)");
        sub->add_option("-o,--out", o.out, "Output path");
    };
    auto jobs = [&](CLI::App* sub) {
        sub->add_option("--jobs", o.jobs, "Worker threads (env BITP_JOBS)")->check(CLI::PositiveNumber);
    };
    auto mining = [&](CLI::App* sub, bool with_gamma) {
        sub->add_option("--alpha", o.alpha, "Target precision")->capture_default_str();
        if (with_gamma) {
            sub->add_option("--gamma", o.gamma, "Recall floor per atomic step")->capture_default_str();
            sub->add_option("--mu", o.mu, "Gamma decay per round")->capture_default_str();
        }
        sub->add_option("--kappa", o.kappa, "Maximum conjuncts")->capture_default_str();
    };
    auto premise = [&](CLI::App* sub) {
        sub->add_option("--train", o.train, "Training table (stem, .meta.json, .csv or .bin)")->required();
        sub->add_option("--conclusion", o.conclusion, "Conclusion atom, e.g. w=7")->required();
        sub->add_option("--vocab", o.vocab, "layer:TAG or list:a,b,c")->required();
        sub->add_option("--input-layer", o.input_layer, "Layer the premise fixes")->capture_default_str();
    };

    auto* mine = app.add_subcommand("mine", "Mine an interpolant for one or more premise rows");
    premise(mine);
    mine->add_option("--row", o.rows, "Premise row(s)")->required()->delimiter(',');
    mining(mine, true);
    mine->add_option("--trace", o.trace, "Per-round trace, one JSON object per line");
    common(mine);
    jobs(mine);

    auto* seq = app.add_subcommand("mine-seq", "Mine a two-stage sequence interpolant");
    premise(seq);
    seq->add_option("--row", o.rows, "Premise row")->required()->expected(1);
    seq->add_option("--depmap", o.depmap, "Dependency map JSON")->required();
    mining(seq, true);
    common(seq);
    jobs(seq);

    auto* eval = app.add_subcommand("eval", "Evaluate interpolants on a test table");
    eval->add_option("--interp", o.interp, "Interpolant, array or sequence file")->required();
    eval->add_option("--test", o.test, "Test table")->required();
    eval->add_option("--conclusion", o.conclusion, "Override the stored conclusion");
    common(eval);

    auto* sw = app.add_subcommand("sweep", "Average held-out metrics over a gamma x mu grid");
    premise(sw);
    sw->add_option("--test", o.test, "Test table (default: the training table)");
    sw->add_option("--row", o.rows, "Premise rows")->delimiter(',');
    sw->add_option("--premises", o.premises, "Use the first N rows satisfying the conclusion");
    mining(sw, false);
    sw->add_option("--gammas", o.gammas, "a:b:step or list")->capture_default_str();
    sw->add_option("--mus", o.mus, "a:b:step or list")->capture_default_str();
    sw->add_option("--gnuplot", o.gnuplot, "Also write the grid in gnuplot block layout");
    common(sw);
    jobs(sw);

    auto* syn = app.add_subcommand("synth", "Generate a synthetic table with a planted rule");
    syn->add_option("--seed", o.seed)->capture_default_str();
    syn->add_option("--rows", o.n_rows)->capture_default_str();
    syn->add_option("--hidden", o.hidden, "Hidden observables x0..")->capture_default_str();
    syn->add_option("--levels", o.levels, "Quantize hidden values to this many levels");
    syn->add_option("--image-side", o.image_side, "Image mode: side of the input grid (even)");
    syn->add_option("--rule", o.rule, "Planted rule, e.g. x0>=0.7,x1<=0.4")->required();
    syn->add_option("--precision", o.precision, "Target precision of the rule");
    syn->add_option("--recall", o.recall, "Target recall of the rule");
    syn->add_option("--noise", o.noise, "Label flip probability");
    syn->add_flag("--binary", o.binary, "Write BITP1 binary data instead of CSV");
    common(syn);

    auto* ren = app.add_subcommand("render", "Render a stage-1 interpolant as a PPM image");
    ren->add_option("--interp", o.interp, "Interpolant or sequence file")->required();
    ren->add_option("--table", o.table, "Table whose layer gives the pixels")->required();
    ren->add_option("--layer", o.layer)->capture_default_str();
    ren->add_option("--width", o.width);
    ren->add_option("--height", o.height);
    ren->add_option("--background-row", o.background_row, "Overlay this row's pixel values");
    common(ren);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        apply_config(*sub, o.config);
        apply_jobs_env(*sub, o);
        if (sub == mine) return cmd_mine(o, out, err);
        if (sub == seq) return cmd_mine_seq(o, out, err);
        if (sub == eval) return cmd_eval(o, out, err);
        if (sub == sw) return cmd_sweep(o, out, err);
        if (sub == syn) return cmd_synth(o, *syn, out, err);
        if (sub == ren) return cmd_render(o, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return usage_error;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return data_error;
    }
    return usage_error;
}

}  // namespace bitp::cli
