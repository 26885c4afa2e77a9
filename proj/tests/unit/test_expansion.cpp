#include "doctest.h"

#include "vfva/errors.hpp"
#include "vfva/expansion.hpp"

#include <random>

using namespace vfva;
using namespace vfva::expansion;

namespace {

const std::vector<std::string> xyz{"x", "y", "z"};

SignedVar P(const char* v)
{
    return SignedVar{v, 1};
}

SignedVar M(const char* v)
{
    return SignedVar{v, -1};
}

// Coefficient of x^a y^b in (x + s*y)^n by the binomial convention.
Rational binomial_oracle(long n, int s, long a, long b)
{
    if (b < 0 || a + b != n) {
        return 0;
    }
    return binom(n, b) * (s < 0 && b % 2 ? Rational(-1) : Rational(1));
}

} // namespace

TEST_CASE("atoms: canonical tails and inert detection")
{
    auto a = make_atom({P("x"), P("z"), P("y")}, 3);
    auto b = make_atom({P("x"), P("y"), P("z")}, 3);
    CHECK(a == b);
    auto c = make_atom({P("x"), P("y"), M("y")}, -2);
    CHECK(c.tail.empty());
    CHECK(make_atom({P("x"), M("x")}, -1).inert());
    CHECK_FALSE(make_atom({P("x"), P("y")}, -1).inert());
}

TEST_CASE("atom coefficients follow the binomial convention")
{
    for (long n = -4; n <= 4; ++n) {
        for (int s : {1, -1}) {
            auto atom = make_atom({P("x"), SignedVar{"y", s}}, n);
            for (long a = -6; a <= 6; ++a) {
                for (long b = -6; b <= 6; ++b) {
                    Monomial m{{"x", a}, {"y", b}};
                    CHECK(atom_coefficient(atom, m) == binomial_oracle(n, s, a, b));
                    CHECK(coeff_of(DeltaExpr::atom(atom, 1, xyz), m) == binomial_oracle(n, s, a, b));
                }
            }
        }
    }
}

TEST_CASE("two expansions of (x-y)^-1 differ by delta")
{
    // (x-y)^-1 - (-y+x)^-1 = y^-1 delta(x/y)
    auto first = DeltaExpr::atom(make_atom({P("x"), M("y")}, -1), 1, xyz);
    auto second = DeltaExpr::atom(make_atom({M("y"), P("x")}, -1), 1, xyz);
    auto diff = first - second;
    for (long a = -5; a <= 5; ++a) {
        for (long b = -5; b <= 5; ++b) {
            Monomial m{{"x", a}, {"y", b}};
            CHECK(coeff_of(diff, m) == (a + b == -1 ? 1 : 0));
        }
    }
}

TEST_CASE("prove_identity: cancellation pairs")
{
    auto two = prove_identity(DeltaIdentity::TwoTerm);
    CHECK(two.expanded.size() == 4);
    CHECK(two.pairs == std::vector<std::pair<int, int>>{{1, 4}, {2, 3}});
    CHECK(two.residual.empty());

    auto three = prove_identity(DeltaIdentity::ThreeTerm);
    CHECK(three.expanded.size() == 6);
    CHECK(three.pairs.size() == 3);
    CHECK(std::find(three.pairs.begin(), three.pairs.end(), std::make_pair(1, 6)) != three.pairs.end());
    CHECK(three.residual.empty());
    CHECK(three.steps.back().rule == "cancel_like_terms");
}

TEST_CASE("window oracle agrees with the symbolic proofs")
{
    for (auto which : {DeltaIdentity::TwoTerm, DeltaIdentity::ThreeTerm}) {
        auto lhs = identity_lhs(which);
        for (long p = -4; p <= 4; ++p) {
            for (long q = -4; q <= 4; ++q) {
                for (long r = -4; r <= 4; ++r) {
                    CHECK(coeff_of(lhs, Monomial{{"x0", p}, {"x1", q}, {"x2", r}}) == 0);
                }
            }
        }
    }
}

TEST_CASE("a single delta term is not zero")
{
    auto d = DeltaExpr::delta(make_delta({P("x1"), M("x2")}, "x0"));
    CHECK(coeff_of(d, Monomial{{"x0", -1}, {"x1", 0}, {"x2", 0}}) == 1);
    CHECK(coeff_of(d, Monomial{{"x0", -2}, {"x1", 1}, {"x2", 0}}) == 1);
    CHECK(coeff_of(d, Monomial{{"x0", -3}, {"x1", 1}, {"x2", 1}}) == -2);
    CHECK(coeff_of(d, Monomial{{"x0", 0}, {"x1", 0}, {"x2", 0}}) == 0);
}

TEST_CASE("reassociation: ((x+y)+z)^n = (x+(y+z))^n and ((x+y)-y)^n = x^n")
{
    for (long n = -4; n <= 4; ++n) {
        // ((x+y)+z)^n from (x+z)^n by x -> x+y; (x+(y+z))^n from (x+y)^n by y -> y+z.
        auto left = taylor_shift(DeltaExpr::atom(make_atom({P("x"), P("z")}, n), 1, xyz), "x", P("y"));
        auto right = taylor_shift(DeltaExpr::atom(make_atom({P("x"), P("y")}, n), 1, xyz), "y", P("z"));
        CHECK(normalize(left).terms().size() == normalize(right).terms().size());
        CHECK(content_hash(normalize(left)) == content_hash(normalize(right)));

        auto back = taylor_shift(DeltaExpr::atom(make_atom({P("x"), M("y")}, n), 1, xyz), "x", P("y"));
        CHECK(content_hash(normalize(back)) == content_hash(normalize(DeltaExpr::monomial({{"x", n}}, 1, xyz))));
    }
}

TEST_CASE("normalize is idempotent on random sums")
{
    std::mt19937_64 rng(3);
    const SignedVar vars[] = {P("x"), M("x"), P("y"), M("y"), P("z"), M("z")};
    for (int trial = 0; trial < 100; ++trial) {
        DeltaExpr e(xyz);
        int terms = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < terms; ++i) {
            std::vector<SignedVar> sum{vars[rng() % 6], vars[rng() % 6]};
            if (sum[0].var == sum[1].var) {
                continue;
            }
            long n = static_cast<long>(rng() % 7) - 3;
            e += DeltaExpr::atom(make_atom(sum, n), Rational(static_cast<long>(rng() % 5) - 2), xyz);
        }
        auto once = normalize(e);
        CHECK(content_hash(normalize(once)) == content_hash(once));
        for (long a = -3; a <= 3; ++a) {
            for (long b = -3; b <= 3; ++b) {
                for (long c = -3; c <= 3; ++c) {
                    Monomial m{{"x", a}, {"y", b}, {"z", c}};
                    CHECK(coeff_of(once, m) == coeff_of(e, m));
                }
            }
        }
    }
}

TEST_CASE("delta substitution preserves coefficients")
{
    // x1^-1 delta((x2+x0)/x1) * x1^2 -> ... * (x2+x0)^2
    auto e = DeltaExpr::delta(make_delta({P("x2"), P("x0")}, "x1")) * DeltaExpr::monomial({{"x1", 2}});
    auto s = delta_substitute(e, SubstitutionDirection::DenominatorToNumerator);
    for (long p = -3; p <= 3; ++p) {
        for (long q = -3; q <= 3; ++q) {
            for (long r = -3; r <= 3; ++r) {
                Monomial m{{"x0", p}, {"x1", q}, {"x2", r}};
                CHECK(coeff_of(s, m) == coeff_of(e, m));
            }
        }
    }
}

TEST_CASE("residue of a delta")
{
    auto d = DeltaExpr::delta(make_delta({P("x1"), M("x2")}, "x0"));
    auto r = residue(d, "x0");
    // Res_x0 x0^-1 delta((x1-x2)/x0) = 1
    CHECK(coeff_of(r, Monomial{{"x1", 0}, {"x2", 0}}) == 1);
    CHECK(coeff_of(r, Monomial{{"x1", 1}, {"x2", -1}}) == 0);
}

TEST_CASE("json round trip")
{
    auto lhs = identity_lhs(DeltaIdentity::ThreeTerm);
    auto back = expr_from_json(to_json(lhs));
    CHECK(content_hash(back) == content_hash(lhs));
    auto a = make_atom({M("y"), P("x")}, -3);
    CHECK(atom_from_json(to_json(a)) == a);
    CHECK_THROWS_AS(expr_from_json(nlohmann::json::parse(R"({"terms": 3})")), Error);
}

TEST_CASE("products of two deltas are refused")
{
    auto d = DeltaExpr::delta(make_delta({P("x1"), M("x2")}, "x0"));
    CHECK_THROWS_AS(d * d, SummabilityUnknown);
}
