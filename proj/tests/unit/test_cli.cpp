#include "doctest.h"

#include "vfva/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace vfva::cli;

namespace {

RunConfig config(std::string command, std::vector<std::string> inputs = {})
{
    RunConfig c;
    c.command = std::move(command);
    c.inputs = std::move(inputs);
    return c;
}

const Record* find(const RunResult& r, const std::string& id)
{
    for (const auto& rec : r.records) {
        if (rec.id == id) {
            return &rec;
        }
    }
    return nullptr;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path emitted(const TempDir& d)
{
    auto r = run_command(config("examples-emit", {(d.path / "corpus").string()}));
    REQUIRE(r.exit_code == exit_code::pass);
    return d.path / "corpus";
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("prove-deltas closes both identities")
{
    auto r = run_command(config("prove-deltas"));
    CHECK(r.exit_code == exit_code::pass);
    REQUIRE(r.records.size() == 2);
    for (const auto& rec : r.records) {
        CHECK(rec.verdict == "PASS");
        CHECK_FALSE(rec.duration.has_value());
    }
    CHECK(find(r, "delta-two-term")->witness["pairs"] == nlohmann::json::parse("[[1,4],[2,3]]"));
    CHECK(find(r, "delta-three-term")->witness["pairs"] == nlohmann::json::parse("[[1,6],[2,4],[3,5]]"));
    auto timed = config("prove-deltas");
    timed.timings = true;
    CHECK(run_command(timed).records[0].duration.has_value());
}

TEST_CASE("replay-elem exercises every implication")
{
    auto c = config("replay-elem");
    c.count = 10;
    c.seed = 5;
    auto r = run_command(c);
    CHECK(r.exit_code == exit_code::pass);
    CHECK(r.records.size() == 9);
    for (const auto& rec : r.records) {
        INFO(rec.id);
        CHECK(rec.verdict == "PASS");
    }
    CHECK(r.render(c) == run_command(c).render(c));
}

TEST_CASE("check and check-module on emitted files")
{
    TempDir d("vfva_test_cli_check");
    auto corpus = emitted(d);
    auto ok = run_command(config("check", {(corpus / "borcherds-k4.cfg").string()}));
    CHECK(ok.exit_code == exit_code::pass);
    CHECK(ok.records.size() == 12);

    auto bad = config("check", {(corpus / "mutants" / "jacobi-break-1.cfg").string()});
    bad.axioms = {"jacobi"};
    auto r = run_command(bad);
    CHECK(r.exit_code == exit_code::fail);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].verdict == "FAIL");
    CHECK(r.records[0].witness.contains("vectors"));

    auto ideal = run_command(config("check", {(corpus / "borcherds-ideal-k3.cfg").string()}));
    CHECK(find(ideal, "vacuum_prop")->verdict == "N/A");

    auto vac = config("check", {(corpus / "borcherds-ideal-k3.cfg").string()});
    vac.axioms = {"vacuum_prop"};
    CHECK(run_command(vac).exit_code == exit_code::config);

    auto m = run_command(config("check-module", {(corpus / "modules" / "quotient-k4.cfg").string()}));
    CHECK(m.exit_code == exit_code::pass);
    auto mm = config("check-module", {(corpus / "modules" / "mutants" / "module-jacobi-break-2.cfg").string()});
    mm.axioms = {"m_jacobi"};
    CHECK(run_command(mm).exit_code == exit_code::fail);
}

TEST_CASE("implication-matrix and main-theorem on the emitted corpus")
{
    TempDir d("vfva_test_cli_matrix");
    auto corpus = emitted(d);
    auto m = run_command(config("implication-matrix", {corpus.string()}));
    CHECK(m.exit_code == exit_code::pass);
    CHECK(find(m, "wc+wa=>jacobi")->verdict == "PASS");
    CHECK(find(m, "mutant:jacobi-break-1")->verdict == "PASS");

    auto t = run_command(config("main-theorem", {corpus.string()}));
    CHECK(t.exit_code == exit_code::pass);
    CHECK(find(t, "m_wc=>m_jacobi")->verdict == "UNTESTED");
    for (const auto& rec : t.records) {
        CHECK(rec.verdict != "ASYMMETRY");
        CHECK(rec.verdict != "VIOLATION");
    }
}

TEST_CASE("configuration errors exit with 3")
{
    TempDir d("vfva_test_cli_errors");
    CHECK(run_command(config("check", {(d.path / "missing.cfg").string()})).exit_code == exit_code::config);
    std::ofstream(d.path / "garbage.cfg") << "{\"basis\": [";
    CHECK(run_command(config("check", {(d.path / "garbage.cfg").string()})).exit_code == exit_code::config);
    std::ofstream(d.path / "typed.cfg") << R"({"basis": ["a"], "modes": [{"u": "a", "n": "x", "v": "a", "coeff": {}}]})";
    CHECK(run_command(config("check", {(d.path / "typed.cfg").string()})).exit_code == exit_code::config);
    CHECK(run_command(config("implication-matrix", {(d.path / "nowhere").string()})).exit_code == exit_code::config);
    fs::create_directories(d.path / "empty");
    CHECK(run_command(config("main-theorem", {(d.path / "empty").string()})).exit_code == exit_code::config);
    CHECK(run_command(config("frobnicate")).exit_code == exit_code::config);
    auto unknown_axiom = config("check", {(d.path / "typed.cfg").string()});
    unknown_axiom.axioms = {"nope"};
    auto r = run_command(unknown_axiom);
    CHECK(r.exit_code == exit_code::config);
    CHECK_FALSE(r.notes.empty());
}

TEST_CASE("machine output is deterministic and carries the seed")
{
    auto c = config("prove-deltas");
    c.seed = 42;
    c.format = Format::machine;
    auto a = run_command(c).render(c);
    auto j = nlohmann::json::parse(a);
    CHECK(j["seed"] == 42);
    CHECK(j["command"] == "prove-deltas");
    CHECK(j["exit_code"] == 0);
    CHECK(j["records"][0]["duration"].is_null());
    CHECK(a == run_command(c).render(c));
}

#ifdef VFVA_CLI_PATH
TEST_CASE("the executable maps outcomes to exit codes")
{
    TempDir d("vfva_test_cli_binary");
    std::string exe = VFVA_CLI_PATH;
    auto run = [&](const std::string& args) {
        int rc = std::system((exe + " " + args + " > " + (d.path / "out.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    auto corpus = (d.path / "corpus").string();
    CHECK(run("examples emit " + corpus) == 0);
    CHECK(run("check " + corpus + "/borcherds-k3.cfg") == 0);
    CHECK(run("check " + corpus + "/mutants/jacobi-break-1.cfg --axiom jacobi") == 1);
    CHECK(run("check " + corpus + "/nothing.cfg") == 3);
    CHECK(run("--no-such-flag") == 3);
    CHECK(run("--format machine --seed 9 prove-deltas") == 0);
    auto j = nlohmann::json::parse(slurp(d.path / "out.txt"));
    CHECK(j["seed"] == 9);
    auto report = (d.path / "report.json").string();
    CHECK(run("--format machine --out " + report + " check-module " + corpus + "/modules/regular-k3.cfg") == 0);
    CHECK(nlohmann::json::parse(slurp(report))["records"].size() == 7);
}
#endif
