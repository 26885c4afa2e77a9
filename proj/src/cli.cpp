#include "vfva/cli.hpp"

#include "vfva/elemprop.hpp"
#include "vfva/errors.hpp"
#include "vfva/expansion.hpp"
#include "vfva/valg.hpp"
#include "vfva/vmod.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vfva::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Timer {
public:
    explicit Timer(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
    std::optional<double> seconds() const
    {
        if (!on_) {
            return std::nullopt;
        }
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool on_;
    std::chrono::steady_clock::time_point start_;
};

valg::CheckParams params_of(const RunConfig& cfg)
{
    return valg::CheckParams{cfg.window, cfg.m_max};
}

Record record_of(const valg::PropertyReport& r, std::optional<double> duration)
{
    json j = valg::to_json(r);
    json witness = j["witness"];
    if (!r.detail.empty() && r.status == valg::Status::Fail) {
        witness["detail"] = r.detail;
    }
    if (r.window > 0) {
        witness["window"] = r.window;
    }
    return Record{r.axiom, r.anchor, valg::to_string(r.status), witness, duration};
}

Record record_of(const valg::RowOutcome& r)
{
    return Record{r.id, r.anchor, r.verdict, json{{"tested", r.tested}, {"violations", r.violations}}, std::nullopt};
}

void prove_deltas(const RunConfig& cfg, RunResult& out)
{
    using expansion::DeltaIdentity;
    for (DeltaIdentity which : {DeltaIdentity::TwoTerm, DeltaIdentity::ThreeTerm}) {
        Timer timer(cfg.timings);
        auto trace = expansion::prove_identity(which);
        json pairs = json::array();
        for (const auto& [a, b] : trace.pairs) {
            pairs.push_back({a, b});
        }
        json steps = json::array();
        for (const auto& s : trace.steps) {
            steps.push_back(s.rule);
        }
        bool closed = trace.residual.empty();
        out.records.push_back(Record{"delta-" + expansion::identity_name(which),
                                     expansion::to_string(trace.lhs) + " = 0", closed ? "PASS" : "FAIL",
                                     json{{"pairs", pairs},
                                          {"steps", steps},
                                          {"expanded_terms", trace.expanded.size()},
                                          {"residual", expansion::to_string(trace.residual)}},
                                     timer.seconds()});
        out.notes.push_back(expansion::identity_name(which) + ": " + expansion::to_string(trace.lhs));
        for (std::size_t i = 0; i < trace.expanded.size(); ++i) {
            out.notes.push_back("  [" + std::to_string(i + 1) + "] " + expansion::to_string(trace.expanded[i]));
        }
        for (const auto& [a, b] : trace.pairs) {
            out.notes.push_back("  cancel [" + std::to_string(a) + "] with [" + std::to_string(b) + "]");
        }
        out.notes.push_back("  residual: " + expansion::to_string(trace.residual));
        if (!closed) {
            out.exit_code = std::max(out.exit_code, exit_code::fail);
        }
    }
}

std::string implication_anchor(elemprop::Implication i)
{
    using elemprop::Implication;
    switch (i) {
    case Implication::ia:
        return "(A) => (B)";
    case Implication::ib:
        return "(A) => (C)";
    case Implication::ic:
        return "(A) => (D)";
    case Implication::iia:
        return "(B) => (E)";
    case Implication::iib:
        return "(C) => (F)";
    case Implication::iic:
        return "(D) => (G)";
    case Implication::iiia:
        return "(E), (F) => (A)";
    case Implication::iiib:
        return "(E), (G) => (A)";
    case Implication::iiic:
        return "(F), (G) => (A)";
    }
    return "";
}

void replay_elem(const RunConfig& cfg, RunResult& out)
{
    elemprop::GeneratorConfig gen;
    long n = cfg.window.value_or(gen.window);
    long m_max = cfg.m_max.value_or(gen.m_max);
    gen.window = n;
    gen.m_max = m_max;
    std::vector<elemprop::TripleInstance> instances;
    for (long i = 0; i < cfg.count; ++i) {
        instances.push_back(elemprop::generate_instance(cfg.seed + static_cast<std::uint64_t>(i), gen));
    }
    for (auto which : elemprop::all_implications()) {
        Timer timer(cfg.timings);
        long tested = 0;
        long skipped = 0;
        long max_m = -1;
        for (const auto& t : instances) {
            try {
                auto r = elemprop::replay_implication(which, t, n, m_max);
                ++tested;
                if (r.witness) {
                    max_m = std::max(max_m, r.witness->m);
                }
            } catch (const HypothesisNotMet&) {
                ++skipped;
            }
        }
        json witness{{"instances", cfg.count}, {"tested", tested}, {"hypothesis_not_met", skipped}, {"window", n}};
        if (max_m >= 0) {
            witness["max_m"] = max_m;
        }
        out.records.push_back(Record{"replay-" + elemprop::to_string(which), implication_anchor(which),
                                     tested > 0 ? "PASS" : "UNTESTED", witness, timer.seconds()});
    }
}

void check_structure(const RunConfig& cfg, RunResult& out)
{
    if (cfg.inputs.size() != 1) {
        throw ConfigError("check takes one structure file");
    }
    auto entry = valg::load_entry(cfg.inputs[0]);
    std::vector<valg::Axiom> axioms;
    for (const auto& a : cfg.axioms) {
        axioms.push_back(valg::parse_axiom(a));
    }
    bool all = axioms.empty();
    if (all) {
        axioms = valg::all_axioms();
    }
    for (auto a : axioms) {
        Timer timer(cfg.timings);
        valg::PropertyReport r;
        if (all && valg::needs_vacuum(a) && !entry.structure.has_vacuum()) {
            r.axiom = valg::to_string(a);
            r.anchor = valg::anchor(a);
            r.status = valg::Status::NotApplicable;
            r.detail = "no vacuum vector";
        } else {
            r = valg::check_axiom(entry.structure, a, params_of(cfg));
        }
        if (r.status == valg::Status::Fail) {
            out.exit_code = std::max(out.exit_code, exit_code::fail);
        }
        out.records.push_back(record_of(r, timer.seconds()));
    }
}

void check_module(const RunConfig& cfg, RunResult& out)
{
    if (cfg.inputs.size() != 1) {
        throw ConfigError("check-module takes one module file");
    }
    auto entry = vmod::load_module(cfg.inputs[0]);
    std::vector<vmod::MAxiom> axioms;
    for (const auto& a : cfg.axioms) {
        axioms.push_back(vmod::parse_maxiom(a));
    }
    bool all = axioms.empty();
    if (all) {
        axioms = vmod::all_maxioms();
    }
    for (auto a : axioms) {
        Timer timer(cfg.timings);
        valg::PropertyReport r;
        if (all && vmod::needs_vacuum(a) && !entry.module.over().has_vacuum()) {
            r.axiom = vmod::to_string(a);
            r.anchor = vmod::anchor(a);
            r.status = valg::Status::NotApplicable;
            r.detail = "no vacuum vector";
        } else {
            r = vmod::check_module_axiom(entry.module, a, params_of(cfg));
        }
        if (r.status == valg::Status::Fail) {
            out.exit_code = std::max(out.exit_code, exit_code::fail);
        }
        out.records.push_back(record_of(r, timer.seconds()));
    }
}

bool is_module_file(const fs::path& p)
{
    std::ifstream in(p);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
    return j.is_object() && j.contains("wbasis");
}

std::vector<fs::path> config_files(const std::string& dir, bool modules)
{
    if (!fs::is_directory(dir)) {
        throw ConfigError("not a directory: " + dir);
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".cfg" && is_module_file(e.path()) == modules) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
        return fs::relative(a, dir).generic_string() < fs::relative(b, dir).generic_string();
    });
    return files;
}

void add_matrix(const valg::MatrixReport& m, RunResult& out)
{
    for (const auto& row : m.rows) {
        out.records.push_back(record_of(row));
    }
    for (const auto& member : m.members) {
        if (!member.break_confirmed) {
            continue;
        }
        json failing = json::array();
        for (const auto& r : member.reports) {
            if (r.status == valg::Status::Fail) {
                failing.push_back(r.axiom);
            }
        }
        out.records.push_back(Record{"mutant:" + member.name, "designed break observed with a counterexample",
                                     *member.break_confirmed ? "PASS" : "FAIL", json{{"failing", failing}},
                                     std::nullopt});
        if (!*member.break_confirmed) {
            out.exit_code = std::max(out.exit_code, exit_code::fail);
        }
    }
    if (!m.consistent()) {
        out.exit_code = exit_code::violation;
        for (const auto& row : m.rows) {
            for (const auto& v : row.violations) {
                out.notes.push_back("VIOLATION " + row.id + ": " + v);
            }
        }
    }
}

void add_main_theorem(const vmod::MainTheoremReport& m, RunResult& out)
{
    for (const auto& member : m.members) {
        for (const auto& c : member.comparisons) {
            json w{{"premises", c.premises ? json(*c.premises) : json(nullptr)},
                   {"jacobi", c.jacobi ? json(*c.jacobi) : json(nullptr)}};
            out.records.push_back(Record{member.name + ":" + c.id, c.anchor, c.verdict, w, std::nullopt});
        }
        if (member.break_confirmed) {
            out.records.push_back(Record{"mutant:" + member.name, "designed break observed with a counterexample",
                                         *member.break_confirmed ? "PASS" : "FAIL", nullptr, std::nullopt});
            if (!*member.break_confirmed) {
                out.exit_code = std::max(out.exit_code, exit_code::fail);
            }
        }
    }
    for (const auto& row : m.rows) {
        out.records.push_back(record_of(row));
    }
    if (!m.consistent()) {
        out.exit_code = exit_code::violation;
        out.notes.push_back("main theorem harness found an asymmetry or violation");
    }
}

void implication_matrix(const RunConfig& cfg, RunResult& out)
{
    if (cfg.inputs.size() != 1) {
        throw ConfigError("implication-matrix takes one corpus directory");
    }
    std::vector<valg::CorpusEntry> corpus;
    for (const auto& p : config_files(cfg.inputs[0], false)) {
        corpus.push_back(valg::load_entry(p));
    }
    if (corpus.empty()) {
        throw ConfigError("no structure files in " + cfg.inputs[0]);
    }
    add_matrix(valg::implication_matrix(corpus, params_of(cfg)), out);
}

void main_theorem(const RunConfig& cfg, RunResult& out)
{
    if (cfg.inputs.size() != 1) {
        throw ConfigError("main-theorem takes one corpus directory");
    }
    std::vector<vmod::ModuleEntry> corpus;
    for (const auto& p : config_files(cfg.inputs[0], true)) {
        corpus.push_back(vmod::load_module(p));
    }
    if (corpus.empty()) {
        throw ConfigError("no module files in " + cfg.inputs[0]);
    }
    add_main_theorem(vmod::main_theorem_harness(corpus, params_of(cfg)), out);
}

void write_json(const fs::path& p, const json& j)
{
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) {
        throw ConfigError("cannot write " + p.string());
    }
    f << j.dump(2) << "\n";
}

void emit_examples(const RunConfig& cfg, RunResult& out)
{
    if (cfg.inputs.size() != 1) {
        throw ConfigError("examples emit takes one output directory");
    }
    fs::path dir = cfg.inputs[0];
    auto corpus = valg::builtin_corpus();
    std::vector<std::pair<std::string, const valg::VertexStructure*>> structures;
    auto written = [&](const fs::path& p) {
        out.records.push_back(Record{fs::relative(p, dir).generic_string(), "", "WRITTEN", nullptr, std::nullopt});
    };
    for (const auto& e : corpus) {
        fs::path rel = e.breaks.empty() ? fs::path(e.name + ".cfg") : fs::path("mutants") / (e.name + ".cfg");
        write_json(dir / rel, valg::to_json(e));
        written(dir / rel);
        if (e.breaks.empty()) {
            structures.push_back({e.name, &e.structure});
        }
    }
    auto modules = vmod::module_corpus();
    for (auto& m : vmod::vacuum_free_module_corpus()) {
        modules.push_back(std::move(m));
    }
    for (const auto& m : modules) {
        auto it = std::find_if(structures.begin(), structures.end(),
                               [&](const auto& s) { return *s.second == m.module.over(); });
        if (it == structures.end()) {
            throw ConsistencyViolation("module " + m.name + " is over a structure outside the corpus");
        }
        bool mutant = !m.breaks.empty();
        fs::path rel = fs::path("modules") / (mutant ? fs::path("mutants") : fs::path()) / (m.name + ".cfg");
        std::string up = mutant ? "../../" : "../";
        write_json(dir / rel, vmod::to_json(m, up + it->first + ".cfg"));
        written(dir / rel);
    }
}

void suite(const RunConfig& cfg, RunResult& out)
{
    prove_deltas(cfg, out);
    replay_elem(cfg, out);
    RunResult matrix;
    add_matrix(valg::implication_matrix(valg::builtin_corpus(), params_of(cfg)), matrix);
    auto modules = vmod::module_corpus();
    for (auto& m : vmod::vacuum_free_module_corpus()) {
        modules.push_back(std::move(m));
    }
    add_main_theorem(vmod::main_theorem_harness(modules, params_of(cfg)), matrix);
    out.records.insert(out.records.end(), matrix.records.begin(), matrix.records.end());
    out.notes.insert(out.notes.end(), matrix.notes.begin(), matrix.notes.end());
    out.exit_code = std::max(out.exit_code, matrix.exit_code);
}

std::string witness_summary(const json& w)
{
    if (w.is_null()) {
        return "";
    }
    std::string s = w.dump();
    return s.size() > 160 ? s.substr(0, 157) + "..." : s;
}

} // namespace

json RunResult::machine(const RunConfig& cfg) const
{
    json records_json = json::array();
    for (const auto& r : records) {
        records_json.push_back({{"id", r.id},
                                {"anchor", r.anchor},
                                {"verdict", r.verdict},
                                {"witness", r.witness},
                                {"duration", r.duration ? json(*r.duration) : json(nullptr)}});
    }
    return {{"command", cfg.command},
            {"seed", cfg.seed},
            {"exit_code", exit_code},
            {"notes", notes},
            {"records", records_json}};
}

std::string RunResult::render(const RunConfig& cfg) const
{
    if (cfg.format == Format::machine) {
        return machine(cfg).dump(2) + "\n";
    }
    std::ostringstream os;
    os << "# " << cfg.command << " (seed " << cfg.seed << ")\n";
    for (const auto& n : notes) {
        os << n << "\n";
    }
    for (const auto& r : records) {
        os << r.verdict << "  " << r.id;
        if (auto w = witness_summary(r.witness); !w.empty()) {
            os << "  " << w;
        }
        if (r.duration) {
            os << "  (" << *r.duration << " s)";
        }
        os << "\n";
        if (!r.anchor.empty()) {
            os << "      " << r.anchor << "\n";
        }
    }
    os << "exit " << exit_code << "\n";
    return os.str();
}

RunResult run_command(const RunConfig& cfg)
{
    RunResult out;
    try {
        if (cfg.command == "prove-deltas") {
            prove_deltas(cfg, out);
        } else if (cfg.command == "replay-elem") {
            replay_elem(cfg, out);
        } else if (cfg.command == "check") {
            check_structure(cfg, out);
        } else if (cfg.command == "check-module") {
            check_module(cfg, out);
        } else if (cfg.command == "implication-matrix") {
            implication_matrix(cfg, out);
        } else if (cfg.command == "main-theorem") {
            main_theorem(cfg, out);
        } else if (cfg.command == "examples-emit") {
            emit_examples(cfg, out);
        } else if (cfg.command == "suite") {
            suite(cfg, out);
        } else {
            throw ConfigError("unknown command '" + cfg.command + "'");
        }
    } catch (const ConsistencyViolation& e) {
        out.exit_code = exit_code::violation;
        out.notes.push_back(std::string("consistency violation: ") + e.what());
    } catch (const Error& e) {
        out.exit_code = exit_code::config;
        out.notes.push_back(std::string("error: ") + e.what());
    } catch (const fs::filesystem_error& e) {
        out.exit_code = exit_code::config;
        out.notes.push_back(std::string("error: ") + e.what());
    }
    return out;
}

} // namespace vfva::cli
