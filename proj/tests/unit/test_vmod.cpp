#include "doctest.h"

#include "vfva/errors.hpp"
#include "vfva/vmod.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace vfva;
using namespace vfva::vmod;

namespace {

VectorCoeff vec(const std::string& id, const Rational& c = 1)
{
    return VectorCoeff::basis(id, c);
}

bool passes(const ModuleStructure& m, MAxiom a)
{
    return check_module_axiom(m, a).passed();
}

// Random single-entry changes to the action table of a module.
struct ModuleMutantGen {
    std::mt19937_64 rng;

    explicit ModuleMutantGen(std::uint64_t seed) : rng(seed) {}

    long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

    ModuleStructure next()
    {
        long k = range(2, 4);
        long kind = range(0, 2);
        ModuleStructure base = kind == 0 ? regular_module(k) : kind == 1 ? ideal_module(k) : quotient_module(k);
        const auto& vb = base.over().basis();
        const auto& wb = base.wbasis();
        auto pick = [&](const std::vector<std::string>& b) { return b[std::size_t(range(0, long(b.size()) - 1))]; };
        std::string u = pick(vb), w = pick(wb);
        long n = range(-3, 1);
        VectorCoeff c;
        for (long i = 0, terms = range(0, 2); i < terms; ++i) {
            c.add(pick(wb), Rational(range(-2, 2)));
        }
        ModeTable t = base.table();
        t.set(u, n, w, c);
        return ModuleStructure(base.over_ptr(), wb, t);
    }
};

} // namespace

TEST_CASE("the regular module reproduces the algebra")
{
    for (long k = 2; k <= 5; ++k) {
        auto m = regular_module(k);
        auto s = valg::borcherds_family(k);
        CHECK(m.over() == s);
        CHECK(m.wbasis() == s.basis());
        CHECK(m.table() == s.table());
        auto ideal = regular_module(k, false);
        CHECK(ideal.table() == valg::borcherds_family(k, false).table());
    }
}

TEST_CASE("module verdicts over the algebra itself equal the algebra verdicts")
{
    for (const auto& e : valg::builtin_corpus()) {
        INFO(e.name);
        auto over = std::make_shared<const VertexStructure>(e.structure);
        ModuleStructure m(over, e.structure.basis(), e.structure.table());
        for (MAxiom a : all_maxioms()) {
            if (needs_vacuum(a) && !e.structure.has_vacuum()) {
                CHECK_THROWS_AS(check_module_axiom(m, a), MissingVacuum);
                continue;
            }
            INFO(to_string(a));
            CHECK(check_module_axiom(m, a).status == valg::check_axiom(e.structure, algebra_axiom(a)).status);
        }
    }
}

TEST_CASE("Y_W(t,x) on the ideal tA is e^{xD}t acting by multiplication")
{
    auto m = ideal_module(4);
    CHECK(m.wbasis() == std::vector<std::string>{"t", "t2", "t3"});
    // Y_W(t,x)t = t2 + x t3
    CHECK(m.table().y(vec("t"), vec("t")) == valg::Poly1{{0, vec("t2")}, {1, vec("t3")}});
    CHECK(m.table().y(vec("1"), vec("t2")) == valg::Poly1{{0, vec("t2")}});
    auto q = quotient_module(4);
    CHECK(q.wbasis() == std::vector<std::string>{"1", "t", "t2"});
    // t . t2 = t3 = 0 in A/t^3 A
    CHECK(q.table().y(vec("t"), vec("t2")).empty());
    CHECK(q.table().y(vec("t"), vec("1")) == valg::Poly1{{0, vec("t")}, {1, vec("t2")}});
}

TEST_CASE("module construction refusals")
{
    auto a = valg::truncated_polynomial(3);
    auto d = valg::raising_derivation(a);
    AlgebraModule bad_unit;
    bad_unit.wbasis = {"w"};
    CHECK_THROWS_AS(module_construct(a, d, bad_unit), ConstructionRefused);

    AlgebraModule nonassoc;
    nonassoc.wbasis = {"w"};
    nonassoc.action[{"1", "w"}] = vec("w");
    nonassoc.action[{"t", "w"}] = vec("w");
    CHECK_THROWS_AS(module_construct(a, d, nonassoc), ConstructionRefused);

    AlgebraModule trivial;
    trivial.wbasis = {"w"};
    trivial.action[{"1", "w"}] = vec("w");
    auto m = module_construct(a, d, trivial);
    for (const auto& r : check_all(m)) {
        INFO(r.axiom);
        CHECK(r.passed());
    }
}

TEST_CASE("unknown ids are configuration errors")
{
    auto over = std::make_shared<const VertexStructure>(valg::borcherds_family(3));
    ModeTable t;
    t.set("t", -1, "w", vec("w"));
    CHECK_NOTHROW(ModuleStructure(over, {"w"}, t));
    CHECK_THROWS_AS(ModuleStructure(over, {"x"}, t), ConfigError);
    CHECK_THROWS_AS(ModuleStructure(over, {"w", "w"}, t), ConfigError);
    ModeTable bad;
    bad.set("s", -1, "w", vec("w"));
    CHECK_THROWS_AS(ModuleStructure(over, {"w"}, bad), ConfigError);
    ModeTable bad_coeff;
    bad_coeff.set("t", -1, "w", vec("z"));
    CHECK_THROWS_AS(ModuleStructure(over, {"w"}, bad_coeff), ConfigError);
    CHECK_THROWS_AS(ModuleStructure(nullptr, {"w"}, t), ConfigError);
}

TEST_CASE("constructed modules satisfy every module axiom")
{
    for (long k = 2; k <= 5; ++k) {
        for (const auto& m : {regular_module(k), ideal_module(k), quotient_module(k)}) {
            for (const auto& r : check_all(m)) {
                INFO("k=" << k << " " << r.axiom);
                CHECK(r.status == Status::Pass);
            }
        }
        for (const auto& r : check_all(regular_module(k, false))) {
            if (needs_vacuum(parse_maxiom(r.axiom))) {
                CHECK(r.status == Status::NotApplicable);
            } else {
                CHECK(r.status == Status::Pass);
            }
        }
    }
}

TEST_CASE("module mutants fail the Jacobi identity and the single weak properties")
{
    for (const auto& e : module_mutants()) {
        INFO(e.name);
        auto r = check_module_axiom(e.module, MAxiom::m_jacobi);
        CHECK(r.status == Status::Fail);
        CHECK(r.counterexample.has_value());
        CHECK_FALSE(passes(e.module, MAxiom::m_weak_assoc));
        CHECK_FALSE(passes(e.module, MAxiom::m_weak_skew_assoc));
    }
}

TEST_CASE("module axiom names round trip")
{
    for (MAxiom a : all_maxioms()) {
        CHECK(parse_maxiom(to_string(a)) == a);
        CHECK_FALSE(anchor(a).empty());
    }
    CHECK_THROWS_AS(parse_maxiom("jacobi"), ConfigError);
}

TEST_CASE("main theorem harness on the built-in corpora")
{
    auto corpus = module_corpus();
    for (auto& e : vacuum_free_module_corpus()) {
        corpus.push_back(std::move(e));
    }
    auto r = main_theorem_harness(corpus);
    CHECK(r.consistent());
    for (const auto& mem : r.members) {
        INFO(mem.name);
        for (const auto& c : mem.comparisons) {
            CHECK(c.verdict != "ASYMMETRY");
            CHECK(c.verdict == (c.premises ? "AGREE" : "SKIPPED"));
        }
        if (mem.break_confirmed) {
            CHECK(*mem.break_confirmed);
        }
    }
    std::map<std::string, std::string> verdict;
    for (const auto& row : r.rows) {
        verdict[row.id] = row.verdict;
    }
    CHECK(verdict.at("m_wc=>m_jacobi") == "UNTESTED");
    CHECK(verdict.at("m_vacuum+m_wa=>m_dder") == "PASS");
    CHECK(verdict.at("m_wc+m_wa=>m_jacobi") == "PASS");
    // vacuum-free members only take part in the two-of-three comparison
    for (const auto& mem : r.members) {
        if (mem.name.rfind("regular-ideal", 0) == 0) {
            REQUIRE(mem.comparisons.size() == 1);
            CHECK(mem.comparisons[0].id == "two-of-three<=>m_jacobi");
        }
    }
}

TEST_CASE("random module mutants: weak properties agree with the Jacobi identity")
{
    ModuleMutantGen gen(99);
    std::vector<ModuleEntry> batch;
    int failures = 0;
    for (int i = 0; i < 80; ++i) {
        auto m = gen.next();
        auto r = check_module_axiom(m, MAxiom::m_jacobi);
        failures += !r.passed();
        CheckParams wider;
        wider.window = r.window + 4;
        CHECK(check_module_axiom(m, MAxiom::m_jacobi, wider).status == r.status);
        batch.push_back({"random-" + std::to_string(i), m, {"random"}, {}});
    }
    CHECK(failures > 10);
    auto report = main_theorem_harness(batch);
    for (const auto& mem : report.members) {
        for (const auto& c : mem.comparisons) {
            INFO(mem.name << " " << c.id);
            CHECK(c.verdict != "ASYMMETRY");
        }
    }
    for (const auto& row : report.rows) {
        INFO(row.id);
        CHECK(row.violations.empty());
    }
}

TEST_CASE("module JSON round trip")
{
    auto e = module_corpus().front();
    auto inline_json = vmod::to_json(e, valg::to_json(e.module.over()));
    auto back = module_from_json(inline_json, "x");
    CHECK(back.name == e.name);
    CHECK(back.module.over() == e.module.over());
    CHECK(back.module.table() == e.module.table());
    CHECK(back.module.wbasis() == e.module.wbasis());

    auto dir = std::filesystem::temp_directory_path() / "vfva_test_vmod";
    std::filesystem::create_directories(dir / "modules");
    {
        std::ofstream(dir / "over.cfg") << valg::to_json(valg::CorpusEntry{"over", e.module.over(), {}, {}}).dump(2);
        std::ofstream(dir / "modules" / "m.cfg") << vmod::to_json(e, nlohmann::json("../over.cfg")).dump(2);
        std::ofstream(dir / "modules" / "broken.cfg") << "{\"over\": \"../missing.cfg\", \"wbasis\": [], \"wmodes\": []}";
        std::ofstream(dir / "modules" / "garbage.cfg") << "{not json";
    }
    auto loaded = load_module(dir / "modules" / "m.cfg");
    CHECK(loaded.module.table() == e.module.table());
    CHECK(loaded.module.over() == e.module.over());
    CHECK_THROWS_AS(load_module(dir / "modules" / "broken.cfg"), ConfigError);
    CHECK_THROWS_AS(load_module(dir / "modules" / "garbage.cfg"), ConfigError);
    CHECK_THROWS_AS(load_module(dir / "nothing.cfg"), ConfigError);
    CHECK_THROWS_AS(module_from_json(nlohmann::json::parse(R"({"wbasis": []})"), "x"), ConfigError);
    std::filesystem::remove_all(dir);

    auto report = vmod::to_json(main_theorem_harness(module_mutants()));
    CHECK(report["consistent"] == true);
    CHECK(report["members"].size() == module_mutants().size());
}
