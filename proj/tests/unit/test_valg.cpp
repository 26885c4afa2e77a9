#include "doctest.h"

#include "vfva/errors.hpp"
#include "vfva/valg.hpp"

#include <cstdint>
#include <random>

using namespace vfva;
using namespace vfva::valg;

namespace {

VectorCoeff vec(const std::string& id, const Rational& c = 1)
{
    return VectorCoeff::basis(id, c);
}

Status status_of(const VertexStructure& s, Axiom a, const CheckParams& p = {})
{
    return check_axiom(s, a, p).status;
}

bool passes(const VertexStructure& s, Axiom a)
{
    return status_of(s, a) == Status::Pass;
}

// Every u_n v with n >= mode_bound vanishes.
long mode_bound(const VertexStructure& s)
{
    return s.table().max_pole();
}

// Borcherds identity on basis triples for l, m, n in [-r, r]:
// sum_i C(l,i) (u_{m+i}v)_{l+n-i} w
//   = sum_i (-1)^i C(m,i) (u_{l+m-i} v_{n+i} w - (-1)^m v_{m+n-i} u_{l+i} w)
bool borcherds_identity_holds(const VertexStructure& s, long r)
{
    const auto& t = s.table();
    // every mode index involved is >= i - r, and modes vanish from max_pole on
    long reach = mode_bound(s) + r;
    for (const auto& u : s.basis()) {
        for (const auto& v : s.basis()) {
            for (const auto& w : s.basis()) {
                for (long l = -r; l <= r; ++l) {
                    for (long m = -r; m <= r; ++m) {
                        for (long n = -r; n <= r; ++n) {
                            VectorCoeff lhs, rhs;
                            for (long i = 0; i <= reach; ++i) {
                                VectorCoeff uv = t.mode(vec(u), m + i, vec(v));
                                if (!uv.is_zero()) {
                                    lhs.axpy(binom(l, i), t.mode(uv, l + n - i, vec(w)));
                                }
                                Rational c = binom(m, i) * (i % 2 == 0 ? 1 : -1);
                                VectorCoeff vw = t.mode(vec(v), n + i, vec(w));
                                if (!vw.is_zero()) {
                                    rhs.axpy(c, t.mode(vec(u), l + m - i, vw));
                                }
                                VectorCoeff uw = t.mode(vec(u), l + i, vec(w));
                                if (!uw.is_zero()) {
                                    Rational sm = (m % 2 == 0) ? 1 : -1;
                                    rhs.axpy(-c * sm, t.mode(vec(v), m + n - i, uw));
                                }
                            }
                            if (lhs != rhs) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    return true;
}

bool two_of_three(const VertexStructure& s)
{
    int n = int(passes(s, Axiom::weak_comm)) + int(passes(s, Axiom::weak_assoc)) +
            int(passes(s, Axiom::weak_skew_assoc));
    return n >= 2;
}

// One table entry of a Borcherds structure overwritten.
struct MutantGen {
    std::mt19937_64 rng;

    explicit MutantGen(std::uint64_t seed) : rng(seed) {}

    long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

    std::optional<VertexStructure> next()
    {
        long k = range(2, 4);
        auto base = borcherds_family(k);
        const auto& b = base.basis();
        auto pick = [&] { return b[std::size_t(range(0, long(b.size()) - 1))]; };
        std::string u = pick(), v = pick();
        long n = range(-3, 1);
        VectorCoeff c;
        long terms = range(0, 2);
        for (long i = 0; i < terms; ++i) {
            c.add(pick(), Rational(range(-2, 2)));
        }
        ModeTable t = base.table();
        t.set(u, n, v, c);
        try {
            return VertexStructure(b, t, std::string("1"));
        } catch (const ConfigError&) {
            return std::nullopt;
        }
    }
};

} // namespace

TEST_CASE("Borcherds construction on Q[t]/(t^3)")
{
    auto s = borcherds_family(3);
    CHECK(s.basis() == std::vector<std::string>{"1", "t", "t2"});
    REQUIRE(s.has_vacuum());
    CHECK(s.vacuum()->one == "1");
    // Y(t,x)1 = e^{xD}t = t + x t2
    Poly1 y = s.table().y(vec("t"), vec("1"));
    CHECK(y == Poly1{{0, vec("t")}, {1, vec("t2")}});
    // Y(t,x)t = t2
    CHECK(s.table().y(vec("t"), vec("t")) == Poly1{{0, vec("t2")}});
    for (const auto& v : s.basis()) {
        CHECK(s.table().y(vec("1"), vec(v)) == Poly1{{0, vec(v)}});
    }
    // D = t^2 d/dt from v_{-2}1
    CHECK(s.vacuum()->dop.apply(vec("t")) == vec("t2"));
    CHECK(s.vacuum()->dop.apply(vec("t2")).is_zero());
    CHECK(s.vacuum()->dop.apply(vec("1")).is_zero());
    CHECK(to_string(y, "x") != "");
}

TEST_CASE("Y(t,x)1 in Q[t]/(t^5) is e^{xD}t")
{
    auto s = borcherds_family(5);
    // D t = t2, D t2 = 2 t3, D t3 = 3 t4
    Poly1 expect{{0, vec("t")}, {1, vec("t2")}, {2, vec("t3")}, {3, vec("t4")}};
    CHECK(s.table().y(vec("t"), vec("1")) == expect);
}

TEST_CASE("the ideal structure is the restriction of the unital one")
{
    for (long k = 2; k <= 5; ++k) {
        auto full = borcherds_family(k, true);
        auto ideal = borcherds_family(k, false);
        CHECK_FALSE(ideal.has_vacuum());
        for (const auto& [key, modes] : ideal.table().entries()) {
            const Modes* m = full.table().find(key.first, key.second);
            REQUIRE(m != nullptr);
            CHECK(*m == modes);
        }
        for (const auto& u : ideal.basis()) {
            CHECK(u != "1");
        }
    }
}

TEST_CASE("construction refusals")
{
    auto a = truncated_polynomial(3);
    CHECK_THROWS_AS(borcherds_construct(a, plain_derivative(a)), ConstructionRefused);

    auto noncomm = a;
    noncomm.product[{"t", "t"}] = vec("t2");
    noncomm.product[{"1", "t"}] = vec("t");
    noncomm.product[{"t", "1"}] = vec("t2");
    CHECK_THROWS_AS(borcherds_construct(noncomm, raising_derivation(a)), ConstructionRefused);

    auto nonassoc = a;
    nonassoc.product[{"t", "t"}] = vec("t");
    CHECK_THROWS_AS(borcherds_construct(nonassoc, raising_derivation(a)), ConstructionRefused);

    try {
        borcherds_construct(a, plain_derivative(a));
        FAIL("expected refusal");
    } catch (const ConstructionRefused& e) {
        CHECK(std::string(e.what()).find("t") != std::string::npos);
    }
}

TEST_CASE("a non-nilpotent D is a configuration error")
{
    auto base = borcherds_family(3);
    ModeTable t = base.table();
    t.set("1", -2, "1", vec("1"));
    CHECK_THROWS_AS(VertexStructure(base.basis(), t, std::string("1")), ConfigError);
    CHECK_THROWS_AS(VertexStructure(base.basis(), t, std::string("nope")), ConfigError);
}

TEST_CASE("minimal pole orders")
{
    auto s = borcherds_family(4);
    CHECK(minimal_pole_order(s, "t", "t") == 0);
    CHECK(minimal_pole_order(s, "1", "t3") == 0);
    ModeTable t = s.table();
    t.set("t", 1, "t", vec("t3"));
    CHECK(minimal_pole_order(t, "t", "t") == 2);
    t.set("t", 0, "t2", vec("t3"));
    CHECK(minimal_pole_order(t, "t", "t2") == 1);
    CHECK(minimal_pole_order(t, "t3", "t3") == 0);
}

TEST_CASE("every axiom holds for the unital family")
{
    for (long k = 2; k <= 5; ++k) {
        auto s = borcherds_family(k);
        for (const auto& r : check_all(s)) {
            INFO("k=" << k << " " << r.axiom << " " << r.detail);
            CHECK(r.status == Status::Pass);
        }
        CHECK(check_axiom(s, Axiom::weak_comm).witness == 0L);
        CHECK(check_axiom(s, Axiom::weak_assoc).witness == 0L);
        CHECK(check_axiom(s, Axiom::weak_skew_assoc).witness == 0L);
    }
}

TEST_CASE("ideal variants: vacuum axioms are not applicable")
{
    for (long k = 2; k <= 5; ++k) {
        auto s = borcherds_family(k, false);
        for (const auto& r : check_all(s)) {
            if (needs_vacuum(parse_axiom(r.axiom))) {
                CHECK(r.status == Status::NotApplicable);
            }
        }
        CHECK(passes(s, Axiom::jacobi));
        CHECK(passes(s, Axiom::weak_comm));
        CHECK(passes(s, Axiom::weak_assoc));
        CHECK(passes(s, Axiom::weak_skew_assoc));
        CHECK(passes(s, Axiom::vf_skew_symmetry));
        CHECK_THROWS_AS(check_axiom(s, Axiom::vacuum_prop), MissingVacuum);
        CHECK_THROWS_AS(check_axiom(s, Axiom::skew_symmetry), MissingVacuum);
    }
}

TEST_CASE("axiom names round trip")
{
    for (Axiom a : all_axioms()) {
        CHECK(parse_axiom(to_string(a)) == a);
        CHECK_FALSE(anchor(a).empty());
    }
    CHECK_THROWS_AS(parse_axiom("no_such_axiom"), ConfigError);
}

TEST_CASE("pole-order witnesses are valid and bound the minimal ones")
{
    std::vector<VertexStructure> pool;
    for (long k = 2; k <= 5; ++k) {
        pool.push_back(borcherds_family(k));
    }
    for (const auto& e : curated_mutants()) {
        pool.push_back(e.structure);
    }
    for (const auto& s : pool) {
        if (!passes(s, Axiom::jacobi)) {
            continue;
        }
        for (const auto& u : s.basis()) {
            for (const auto& v : s.basis()) {
                for (const auto& w : s.basis()) {
                    long m1 = minimal_pole_order(s, u, v);
                    long m2 = minimal_pole_order(s, u, w);
                    long m3 = minimal_pole_order(s, v, w);
                    CHECK(witness_valid(s, Axiom::weak_comm, u, v, w, m1));
                    CHECK(witness_valid(s, Axiom::weak_assoc, u, v, w, m2));
                    CHECK(witness_valid(s, Axiom::weak_skew_assoc, u, v, w, m3));
                    auto wc = minimal_witness(s, Axiom::weak_comm, u, v, w);
                    auto wa = minimal_witness(s, Axiom::weak_assoc, u, v, w);
                    auto ws = minimal_witness(s, Axiom::weak_skew_assoc, u, v, w);
                    REQUIRE(wc);
                    REQUIRE(wa);
                    REQUIRE(ws);
                    CHECK(*wc <= m1);
                    CHECK(*wa <= m2);
                    CHECK(*ws <= m3);
                    CHECK(witness_valid(s, Axiom::weak_comm, u, v, w, *wc));
                    CHECK(witness_valid(s, Axiom::weak_assoc, u, v, w, *wa));
                    CHECK(witness_valid(s, Axiom::weak_skew_assoc, u, v, w, *ws));
                    if (*wa > 0) {
                        CHECK_FALSE(witness_valid(s, Axiom::weak_assoc, u, v, w, *wa - 1));
                    }
                    if (*ws > 0) {
                        CHECK_FALSE(witness_valid(s, Axiom::weak_skew_assoc, u, v, w, *ws - 1));
                    }
                }
            }
        }
    }
}

TEST_CASE("Jacobi verdict agrees with the Borcherds identity oracle")
{
    for (const auto& e : builtin_corpus()) {
        INFO(e.name);
        bool jac = passes(e.structure, Axiom::jacobi);
        CHECK(jac == borcherds_identity_holds(e.structure, 6));
    }
}

TEST_CASE("curated mutants break what they claim to break")
{
    for (const auto& e : curated_mutants()) {
        INFO(e.name);
        REQUIRE_FALSE(e.breaks.empty());
        for (Axiom a : e.breaks) {
            auto r = check_axiom(e.structure, a);
            CHECK(r.status == Status::Fail);
            CHECK(r.counterexample.has_value());
        }
    }
}

TEST_CASE("random single-entry mutants: Jacobi equals two of three weak properties")
{
    MutantGen gen(20260418);
    int tested = 0, jacobi_failures = 0;
    std::vector<CorpusEntry> batch;
    for (int i = 0; i < 120; ++i) {
        auto s = gen.next();
        if (!s) {
            continue;
        }
        ++tested;
        auto r = check_axiom(*s, Axiom::jacobi);
        bool jac = r.passed();
        jacobi_failures += !jac;
        CHECK(jac == two_of_three(*s));
        CheckParams wider;
        wider.window = r.window + 4;
        CHECK(status_of(*s, Axiom::jacobi, wider) == r.status);
        if (i % 4 == 0) {
            CHECK(jac == borcherds_identity_holds(*s, 4));
        }
        if (batch.size() < 40) {
            batch.push_back({"random-" + std::to_string(i), *s, {"random"}, {}});
        }
    }
    CHECK(tested > 60);
    CHECK(jacobi_failures > 10);
    auto m = implication_matrix(batch);
    for (const auto& row : m.rows) {
        INFO(row.id);
        CHECK(row.violations.empty());
    }
    CHECK(m.consistent());
}

TEST_CASE("vf skew symmetry against skew and D-derivative on vacuum members")
{
    MutantGen gen(7);
    std::vector<VertexStructure> pool;
    for (long k = 2; k <= 5; ++k) {
        pool.push_back(borcherds_family(k));
    }
    for (const auto& e : curated_mutants()) {
        pool.push_back(e.structure);
    }
    for (int i = 0; i < 60; ++i) {
        if (auto s = gen.next()) {
            pool.push_back(*s);
        }
    }
    int tested = 0;
    for (const auto& s : pool) {
        if (!(passes(s, Axiom::injectivity) && passes(s, Axiom::vacuum_prop) && passes(s, Axiom::creation_prop))) {
            continue;
        }
        ++tested;
        bool vfss = passes(s, Axiom::vf_skew_symmetry);
        bool rhs = passes(s, Axiom::skew_symmetry) && passes(s, Axiom::d_derivative);
        CHECK(vfss == rhs);
    }
    CHECK(tested > 10);
}

TEST_CASE("component forms of the minor axioms")
{
    for (long k = 2; k <= 5; ++k) {
        auto s = borcherds_family(k);
        const auto& t = s.table();
        const auto& d = s.vacuum()->dop;
        for (const auto& u : s.basis()) {
            for (const auto& v : s.basis()) {
                for (long n = -6; n <= 4; ++n) {
                    // (Du)_n v = -n u_{n-1} v
                    CHECK(t.mode(d.apply(vec(u)), n, vec(v)) == -Rational(n) * t.mode(vec(u), n - 1, vec(v)));
                    // D(u_n v) = (Du)_n v + u_n Dv
                    CHECK(d.apply(t.mode(vec(u), n, vec(v))) ==
                          t.mode(d.apply(vec(u)), n, vec(v)) + t.mode(vec(u), n, d.apply(vec(v))));
                    // u_n v = sum_j (-1)^{n+j+1} D^j/j! v_{n+j} u
                    VectorCoeff skew;
                    for (long j = 0; j <= k + 8; ++j) {
                        VectorCoeff c = t.mode(vec(v), n + j, vec(u));
                        for (long i = 0; i < j; ++i) {
                            c = d.apply(c);
                        }
                        Rational sign = ((n + j + 1) % 2 == 0) ? 1 : -1;
                        skew.axpy(sign / Rational(factorial(j)), c);
                    }
                    CHECK(t.mode(vec(u), n, vec(v)) == skew);
                }
                // e^{zD} Y(u,x) v = Y(u,x+z) e^{zD} v, compared on z^a x^b
                Poly1 y = t.y(vec(u), vec(v));
                for (long a = 0; a <= k; ++a) {
                    for (long b = -2; b <= k + 2; ++b) {
                        // lhs: D^a/a! of the x^b coefficient
                        VectorCoeff lhs = y.count(b) ? y.at(b) : VectorCoeff{};
                        for (long i = 0; i < a; ++i) {
                            lhs = d.apply(lhs);
                        }
                        lhs *= Rational(1) / Rational(factorial(a));
                        // rhs: sum_{i+j=a} C(b+i, i) coeff_{x^{b+i}} Y(u,x) D^j v / j!
                        VectorCoeff rhs;
                        for (long j = 0; j <= a; ++j) {
                            long i = a - j;
                            VectorCoeff dv = vec(v);
                            for (long q = 0; q < j; ++q) {
                                dv = d.apply(dv);
                            }
                            Poly1 yj = t.y(vec(u), dv);
                            if (yj.count(b + i)) {
                                rhs.axpy(binom(b + i, i) / Rational(factorial(j)), yj.at(b + i));
                            }
                        }
                        CHECK(lhs == rhs);
                    }
                }
            }
        }
    }
}

TEST_CASE("series views")
{
    auto s = borcherds_family(4);
    for (const auto& v : s.basis()) {
        for (const auto& w : s.basis()) {
            // Y(1,x1)Y(v,x2)w = Y(v,x2)w
            auto c = compose_y(s, vec("1"), "x1", vec(v), "x2", vec(w));
            auto y = y_series(s, vec(v), vec(w), "x2");
            for (const auto& [key, coeff] : y.data()) {
                CHECK(c.at({0, key[0]}) == coeff);
            }
            // Y(Y(1,x0)v,x2)w = Y(v,x2)w
            auto it = iterate_y(s, vec("1"), "x0", vec(v), "x2", vec(w));
            for (const auto& [key, coeff] : y.data()) {
                CHECK(it.at({0, key[0]}) == coeff);
            }
        }
    }
    // Y(Y(u,x0)1,x2)w = Y(e^{x0 D}u, x2)w = Y(u, x2+x0)w
    for (const auto& u : s.basis()) {
        for (const auto& w : s.basis()) {
            auto it = iterate_y(s, vec(u), "x0", vec("1"), "x2", vec(w));
            Poly1 y = s.table().y(vec(u), vec(w));
            for (long a = 0; a <= 4; ++a) {
                for (long b = -3; b <= 4; ++b) {
                    VectorCoeff expect;
                    long e = a + b;
                    if (y.count(e)) {
                        expect.axpy(binom(e, a), y.at(e));
                    }
                    CHECK(it.at({a, b}) == expect);
                }
            }
        }
    }
}

TEST_CASE("structure JSON round trip")
{
    for (const auto& e : builtin_corpus()) {
        auto j = to_json(e);
        auto back = entry_from_json(j, e.name);
        CHECK(back.structure == e.structure);
        CHECK(back.tags == e.tags);
        CHECK(back.breaks == e.breaks);
        CHECK(to_json(back) == j);
    }
    CHECK_THROWS_AS(structure_from_json(nlohmann::json::parse(R"({"basis": 3})")), ConfigError);
    CHECK_THROWS_AS(structure_from_json(nlohmann::json::parse(
                        R"({"basis": ["a"], "modes": [{"u": "a", "n": 0, "v": "b", "coeff": {"a": "1"}}]})")),
                    ConfigError);
}

TEST_CASE("property report JSON")
{
    auto e = curated_mutants().front();
    auto r = check_axiom(e.structure, Axiom::jacobi);
    auto j = to_json(r);
    CHECK(j["id"] == "jacobi");
    CHECK(j["verdict"] == "FAIL");
    CHECK(j["witness"].contains("vectors"));
    auto ok = to_json(check_axiom(borcherds_family(3), Axiom::weak_assoc));
    CHECK(ok["verdict"] == "PASS");
    CHECK(ok["witness"]["m"] == 0);
}

TEST_CASE("implication matrix on the built-in corpus")
{
    auto m = implication_matrix(builtin_corpus());
    CHECK(m.consistent());
    CHECK(m.rows.size() == implication_rows().size());
    for (const auto& row : m.rows) {
        INFO(row.id);
        CHECK(row.verdict != "VIOLATION");
        CHECK((row.verdict == "PASS") == !row.tested.empty());
    }
    for (const auto& mem : m.members) {
        if (mem.break_confirmed) {
            INFO(mem.name);
            CHECK(*mem.break_confirmed);
        }
    }
}
