#include "doctest.h"

#include "vfva/errors.hpp"
#include "vfva/series.hpp"

#include <random>

using namespace vfva;
using namespace vfva::series;

namespace {

WindowedSeries geometric(const std::string& x, long hi, int sign)
{
    // sum_{k=0}^{hi} (sign x)^k, known to vanish below 0, unknown above hi
    WindowedSeries s({Axis{x, 0, hi, true, false}});
    for (long k = 0; k <= hi; ++k) {
        s.set({k}, scalar(sign < 0 && k % 2 ? -1 : 1));
    }
    return s;
}

WindowedSeries power(const std::string& x, long n)
{
    return WindowedSeries::polynomial({x}, {{expansion::Monomial{{x, n}}, scalar(1)}});
}

std::vector<Axis> box(std::initializer_list<std::string> vars, long lo, long hi)
{
    std::vector<Axis> out;
    for (const auto& v : vars) {
        out.push_back(Axis{v, lo, hi, false, false});
    }
    return out;
}

Rational scalar_at(const WindowedSeries& s, const expansion::Monomial& m)
{
    return coeff(s, m)[kScalarId];
}

} // namespace

TEST_CASE("polynomials are exact everywhere")
{
    auto p = WindowedSeries::polynomial({"x", "y"}, {{{{"x", 2}, {"y", -1}}, scalar(3)}});
    CHECK(scalar_at(p, {{"x", 2}, {"y", -1}}) == 3);
    CHECK(scalar_at(p, {{"x", 50}, {"y", -40}}) == 0);
    CHECK(p.shape("x") == Shape::Finite);
}

TEST_CASE("unknown coefficients raise WindowUnderflow")
{
    auto g = geometric("x", 5, 1);
    CHECK(g.shape("x") == Shape::LowerTruncated);
    CHECK(scalar_at(g, {{"x", -3}}) == 0);
    CHECK_THROWS_AS(coeff(g, {{"x", 6}}), WindowUnderflow);
}

TEST_CASE("(1 + x) * sum (-x)^k = 1 on the determined window")
{
    auto one_plus_x = WindowedSeries::polynomial({"x"}, {{{{"x", 0}}, scalar(1)}, {{{"x", 1}}, scalar(1)}});
    auto prod = multiply(one_plus_x, geometric("x", 10, -1), {{"x", {0, 10}}});
    CHECK(scalar_at(prod, {{"x", 0}}) == 1);
    for (long k = 1; k <= 10; ++k) {
        CHECK(scalar_at(prod, {{"x", k}}) == 0);
    }
    CHECK_THROWS_AS(multiply(one_plus_x, geometric("x", 10, -1), {{"x", {0, 12}}}), WindowUnderflow);
}

TEST_CASE("opposite truncations are not summable")
{
    WindowedSeries upper({Axis{"x", -5, 0, false, true}});
    for (long k = -5; k <= 0; ++k) {
        upper.set({k}, scalar(1));
    }
    CHECK_THROWS_AS(multiply(upper, geometric("x", 5, 1)), SummabilityUnknown);
}

TEST_CASE("taylor_substitute reassociates on [-6,6]^2")
{
    for (long n = -4; n <= 4; ++n) {
        // ((x+y)+z)^n: u^n, u -> u + z, then u -> x + y
        auto a = taylor_substitute(power("u", n), "u", {"u", 1}, {"z", 1}, box({"u", "z"}, -30, 30));
        a = taylor_substitute(a, "u", {"x", 1}, {"y", 1}, box({"x", "z", "y"}, -6, 6));
        // (x+(y+z))^n: x^n, x -> x + w, then w -> y + z
        auto b = taylor_substitute(power("x", n), "x", {"x", 1}, {"w", 1}, box({"x", "w"}, -30, 30));
        b = taylor_substitute(b, "w", {"y", 1}, {"z", 1}, box({"x", "y", "z"}, -6, 6));
        // ((x+y)-y)^n: u^n, u -> u - y, then u -> x + y
        auto c = taylor_substitute(power("u", n), "u", {"u", 1}, {"y", -1}, box({"u", "y"}, -30, 30));
        c = taylor_substitute(c, "u", {"x", 1}, {"y", 1}, box({"x", "y"}, -6, 6));
        for (long i = -6; i <= 6; ++i) {
            for (long j = -6; j <= 6; ++j) {
                expansion::Monomial m{{"x", i}, {"y", j}, {"z", n - i - j}};
                if (n - i - j >= -6 && n - i - j <= 6) {
                    CHECK(scalar_at(a, m) == scalar_at(b, m));
                }
                CHECK(scalar_at(c, {{"x", i}, {"y", j}}) == (i == n && j == 0 ? 1 : 0));
            }
        }
    }
}

TEST_CASE("tail variables must be lower truncated")
{
    WindowedSeries s({Axis{"u", -3, 3, true, true}, Axis{"y", -3, 3, false, true}});
    s.set({0, 0}, scalar(1));
    CHECK_THROWS_AS(taylor_substitute(s, "u", {"x", 1}, {"y", 1}, box({"x", "y"}, -2, 2)), SummabilityUnknown);
}

TEST_CASE("derivative and residue")
{
    std::map<expansion::Monomial, VectorCoeff> terms;
    for (long k = -3; k <= 3; ++k) {
        terms[{{"x", k}}] = scalar(k + 10);
    }
    auto p = WindowedSeries::polynomial({"x"}, terms);
    auto d = derivative(p, "x");
    for (long k = -3; k <= 3; ++k) {
        CHECK(scalar_at(d, {{"x", k - 1}}) == k * (k + 10));
    }
    CHECK(coeff(residue(p, "x"), {})[kScalarId] == 9);
    // Res_x d/dx f = 0
    CHECK(coeff(residue(d, "x"), {}).is_zero());
}

TEST_CASE("exp_endo of a nilpotent operator")
{
    LinearMap d({"a", "b", "c"});
    d.set_image("a", VectorCoeff{{"b", 1}});
    d.set_image("b", VectorCoeff{{"c", 1}});
    d.set_image("c", {});
    auto e = exp_endo(d, "x", VectorCoeff{{"a", 1}});
    CHECK(coeff(e, {{"x", 0}}) == VectorCoeff{{"a", 1}});
    CHECK(coeff(e, {{"x", 1}}) == VectorCoeff{{"b", 1}});
    CHECK(coeff(e, {{"x", 2}}) == VectorCoeff{{"c", Rational(1, 2)}});
    CHECK(coeff(e, {{"x", 3}}).is_zero());

    LinearMap id({"a"});
    id.set_image("a", VectorCoeff{{"a", 1}});
    CHECK_THROWS_AS(exp_endo(id, "x", VectorCoeff{{"a", 1}}), SummabilityUnknown);
}

TEST_CASE("random polynomial products are commutative and associative")
{
    std::mt19937_64 rng(5);
    auto random_poly = [&] {
        std::map<expansion::Monomial, VectorCoeff> terms;
        for (int i = 0; i < 4; ++i) {
            long a = static_cast<long>(rng() % 7) - 3;
            long b = static_cast<long>(rng() % 7) - 3;
            terms[{{"x", a}, {"y", b}}] = scalar(static_cast<long>(rng() % 9) - 4);
        }
        std::erase_if(terms, [](const auto& kv) { return kv.second.is_zero(); });
        return WindowedSeries::polynomial({"x", "y"}, terms);
    };
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_poly();
        auto b = random_poly();
        auto c = random_poly();
        auto ab_c = multiply(multiply(a, b), c);
        auto a_bc = multiply(a, multiply(b, c));
        auto ba = multiply(b, a);
        auto ab = multiply(a, b);
        for (long i = -9; i <= 9; ++i) {
            for (long j = -9; j <= 9; ++j) {
                expansion::Monomial m{{"x", i}, {"y", j}};
                CHECK(scalar_at(ab_c, m) == scalar_at(a_bc, m));
                CHECK(scalar_at(ab, m) == scalar_at(ba, m));
            }
        }
    }
}

TEST_CASE("json round trip keeps window flags")
{
    auto g = geometric("x", 4, -1);
    auto back = series_from_json(to_json(g));
    CHECK(back == g);
}
