#include "vfva/elemprop.hpp"

#include "vfva/errors.hpp"

#include <algorithm>
#include <climits>
#include <random>

namespace vfva::elemprop {

using series::Axis;

namespace {

using Poly2 = std::map<std::pair<long, long>, VectorCoeff>;

int parity_sign(long n)
{
    return (n % 2 == 0) ? 1 : -1;
}

const Rational& binom_cached(long n, long k)
{
    static thread_local std::map<std::pair<long, long>, Rational> cache;
    auto [it, inserted] = cache.try_emplace({n, k});
    if (inserted) {
        it->second = binom(n, k);
    }
    return it->second;
}

// Dense view of a two-variable series with basis-indexed coefficients.
class Grid {
public:
    Grid(const WindowedSeries& s, const std::vector<std::string>& basis) : basis_dim_(basis.size())
    {
        if (s.arity() != 2) {
            throw DomainError("triple series must have exactly two variables");
        }
        a1_ = s.axes()[0];
        a2_ = s.axes()[1];
        w1_ = a1_.hi - a1_.lo + 1;
        w2_ = a2_.hi - a2_.lo + 1;
        cells_.assign(static_cast<std::size_t>(std::max(0L, w1_ * w2_)) * basis_dim_, Rational(0));
        nonzero_.assign(static_cast<std::size_t>(std::max(0L, w1_ * w2_)), false);
        for (const auto& [k, c] : s.data()) {
            auto cell = index(k[0], k[1]);
            nonzero_[cell] = true;
            for (const auto& [id, r] : c.entries()) {
                auto pos = std::find(basis.begin(), basis.end(), id) - basis.begin();
                cells_[cell * basis_dim_ + static_cast<std::size_t>(pos)] = r;
            }
        }
    }

    // nullptr for a coefficient known to be zero.
    const Rational* at(long i, long j) const
    {
        if (i < a1_.lo || j < a2_.lo || i > a1_.hi || j > a2_.hi) {
            bool zero = (i < a1_.lo && a1_.lower_exact) || (i > a1_.hi && a1_.upper_exact) ||
                        (j < a2_.lo && a2_.lower_exact) || (j > a2_.hi && a2_.upper_exact);
            if (!zero) {
                throw WindowUnderflow("coefficient (" + std::to_string(i) + ", " + std::to_string(j) +
                                      ") lies outside the known window");
            }
            return nullptr;
        }
        auto cell = index(i, j);
        return nonzero_[cell] ? &cells_[cell * basis_dim_] : nullptr;
    }

    // Summation in the second variable downwards stops here.
    long floor2() const
    {
        if (!a2_.lower_exact) {
            throw SummabilityUnknown("series is not lower truncated in its second variable");
        }
        return a2_.lo;
    }

    bool beyond1(long i) const { return i > a1_.hi && a1_.upper_exact; }

private:
    std::size_t index(long i, long j) const
    {
        return static_cast<std::size_t>((i - a1_.lo) * w2_ + (j - a2_.lo));
    }

    std::size_t basis_dim_;
    Axis a1_, a2_;
    long w1_ = 0, w2_ = 0;
    std::vector<Rational> cells_;
    std::vector<bool> nonzero_;
};

// Dense accumulator over a basis.
struct Acc {
    std::vector<Rational> v;
    explicit Acc(std::size_t dim) : v(dim, Rational(0)) {}
    void axpy(const Rational& c, const Rational* x)
    {
        if (x == nullptr) {
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (x[i] != 0) {
                v[i] += c * x[i];
            }
        }
    }
    bool zero() const
    {
        return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r == 0; });
    }
    void clear()
    {
        for (auto& r : v) {
            r = 0;
        }
    }
    VectorCoeff to_vector(const std::vector<std::string>& basis) const
    {
        VectorCoeff out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.add(basis[i], v[i]);
        }
        return out;
    }
};

std::vector<std::string> basis_of(std::initializer_list<const WindowedSeries*> parts)
{
    std::vector<std::string> basis;
    for (const auto* s : parts) {
        for (const auto& [k, c] : s->data()) {
            for (const auto& [id, r] : c.entries()) {
                if (std::find(basis.begin(), basis.end(), id) == basis.end()) {
                    basis.push_back(id);
                }
            }
        }
    }
    std::sort(basis.begin(), basis.end());
    return basis;
}

// Dense two-variable table on a box, used for the shifted series of the
// witness displays.
struct Table {
    long lo1 = 0, hi1 = -1, lo2 = 0, hi2 = -1;
    std::size_t dim = 0;
    std::vector<Rational> cells;

    Table(long l1, long h1, long l2, long h2, std::size_t d) : lo1(l1), hi1(h1), lo2(l2), hi2(h2), dim(d)
    {
        cells.assign(static_cast<std::size_t>((h1 - l1 + 1) * (h2 - l2 + 1)) * d, Rational(0));
    }
    bool inside(long i, long j) const { return i >= lo1 && i <= hi1 && j >= lo2 && j <= hi2; }
    Rational* at(long i, long j)
    {
        return &cells[static_cast<std::size_t>((i - lo1) * (hi2 - lo2 + 1) + (j - lo2)) * dim];
    }
    const Rational* at(long i, long j) const
    {
        return &cells[static_cast<std::size_t>((i - lo1) * (hi2 - lo2 + 1) + (j - lo2)) * dim];
    }
};

Verdict fail_at(const std::vector<std::string>& vars, const std::vector<long>& exps, const Acc& acc,
                const std::vector<std::string>& basis, std::string detail)
{
    Verdict v;
    v.holds = false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        v.monomial[vars[i]] = exps[i];
    }
    v.value = acc.to_vector(basis);
    v.detail = std::move(detail);
    return v;
}

// Sum_k binom(i+k, k) sign(k) s(i+k, j-k) over k >= 0: the Taylor shift of the
// first variable by the second.
void shifted_entry(const Grid& s, long i, long j, bool alternate_k, Acc& out)
{
    long floor = s.floor2();
    for (long k = 0; j - k >= floor; ++k) {
        if (s.beyond1(i + k)) {
            break;
        }
        const Rational* x = s.at(i + k, j - k);
        if (x == nullptr) {
            continue;
        }
        Rational coef = binom_cached(i + k, k);
        if (alternate_k && k % 2 != 0) {
            coef = -coef;
        }
        out.axpy(coef, x);
    }
}

// Difference series D of the chosen witness display on [lo, hi]^2, in the
// display's own coordinates: (x1,x2) for M1, (x0,x2) for M2, (x0,x1) for M3.
Table witness_difference(const TripleInstance& t, WitnessKind kind, long lo, long hi,
                         const std::vector<std::string>& basis)
{
    Grid f(t.f, basis), g(t.g, basis), h(t.h, basis);
    std::size_t dim = basis.size();
    Table d(lo, hi, lo, hi, dim);
    Acc acc(dim);
    for (long i = lo; i <= hi; ++i) {
        for (long j = lo; j <= hi; ++j) {
            acc.clear();
            switch (kind) {
            case WitnessKind::M1:
                // f(x1,x2) - g(x2,x1)
                acc.axpy(1, f.at(i, j));
                acc.axpy(-1, g.at(j, i));
                break;
            case WitnessKind::M2: {
                // f(x0+x2,x2) - h(x2,x0)
                shifted_entry(f, i, j, false, acc);
                acc.axpy(-1, h.at(j, i));
                break;
            }
            case WitnessKind::M3: {
                // g(-x0+x1,x1) - h(x1-x0,x0)
                Acc gpart(dim);
                shifted_entry(g, i, j, false, gpart);
                Rational sign = parity_sign(i);
                for (std::size_t b = 0; b < dim; ++b) {
                    acc.v[b] += sign * gpart.v[b];
                }
                Acc hpart(dim);
                shifted_entry(h, j, i, true, hpart);
                for (std::size_t b = 0; b < dim; ++b) {
                    acc.v[b] -= hpart.v[b];
                }
                break;
            }
            }
            std::copy(acc.v.begin(), acc.v.end(), d.at(i, j));
        }
    }
    return d;
}

// (binomial)^m * D at (i, j); the binomial is (x1-x2), (x0+x2) or (x1-x0).
void clear_pole(const Table& d, WitnessKind kind, long m, long i, long j, Acc& out)
{
    out.clear();
    for (long k = 0; k <= m; ++k) {
        const Rational& bc = binom_cached(m, k);
        long si = 0, sj = 0;
        int sign = 1;
        switch (kind) {
        case WitnessKind::M1: // x1^{m-k} (-x2)^k
            si = i - m + k;
            sj = j - k;
            sign = parity_sign(k);
            break;
        case WitnessKind::M2: // x0^{m-k} x2^k
            si = i - m + k;
            sj = j - k;
            break;
        case WitnessKind::M3: // x1^{m-k} (-x0)^k, coordinates (x0, x1)
            si = i - k;
            sj = j - m + k;
            sign = parity_sign(k);
            break;
        }
        if (!d.inside(si, sj)) {
            throw WindowUnderflow("pole clearing needs the difference outside its computed window");
        }
        out.axpy(sign < 0 ? Rational(-bc) : bc, d.at(si, sj));
    }
}

std::vector<std::string> witness_vars(WitnessKind kind)
{
    switch (kind) {
    case WitnessKind::M1:
        return {"x1", "x2"};
    case WitnessKind::M2:
        return {"x0", "x2"};
    case WitnessKind::M3:
        return {"x0", "x1"};
    }
    return {};
}

Poly2 poly_mul(const Poly2& p, const std::map<std::pair<long, long>, Rational>& q)
{
    Poly2 out;
    for (const auto& [e1, c1] : p) {
        for (const auto& [e2, c2] : q) {
            out[{e1.first + e2.first, e1.second + e2.second}].axpy(c2, c1);
        }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
}

// (su u + sv v)^d as a scalar polynomial, d >= 0.
std::map<std::pair<long, long>, Rational> binomial_power(int su, int sv, long d)
{
    std::map<std::pair<long, long>, Rational> out;
    for (long k = 0; k <= d; ++k) {
        Rational c = binom(d, k);
        if (su < 0 && (d - k) % 2 != 0) {
            c = -c;
        }
        if (sv < 0 && k % 2 != 0) {
            c = -c;
        }
        out[{d - k, k}] = c;
    }
    return out;
}

struct FormShape {
    int su = 1;   // sign of u in the listed binomial
    int sv = 1;   // sign of v
    long eu = 0;  // plain power of u in the denominator
    long ev = 0;  // plain power of v
    long e = 0;   // binomial power
};

FormShape shape_of(const RationalForm& r)
{
    switch (r.kind) {
    case FormKind::E:
        return {1, -1, r.b, r.c, r.a};
    case FormKind::F:
        return {1, 1, r.a, r.c, r.b};
    case FormKind::G:
        return {-1, 1, r.a, r.b, r.c};
    }
    return {};
}

} // namespace

std::pair<std::string, std::string> form_vars(FormKind kind)
{
    switch (kind) {
    case FormKind::E:
        return {"x1", "x2"};
    case FormKind::F:
        return {"x0", "x2"};
    case FormKind::G:
        return {"x0", "x1"};
    }
    return {};
}

std::string to_string(FormKind kind)
{
    switch (kind) {
    case FormKind::E:
        return "E";
    case FormKind::F:
        return "F";
    case FormKind::G:
        return "G";
    }
    return "?";
}

std::string to_string(WitnessKind k)
{
    switch (k) {
    case WitnessKind::M1:
        return "m1";
    case WitnessKind::M2:
        return "m2";
    case WitnessKind::M3:
        return "m3";
    }
    return "?";
}

WindowedSeries expand_rational_form(const RationalForm& r, ExpansionMode mode, Range u_range, Range v_range)
{
    if (r.a < 0 || r.b < 0 || r.c < 0) {
        throw DomainError("rational form exponents must be nonnegative");
    }
    FormShape fs = shape_of(r);
    auto [u, v] = form_vars(r.kind);
    // Head of the expansion: u for the first mode, v for the second.
    bool head_is_u = mode == ExpansionMode::First;
    int head_sign = head_is_u ? fs.su : fs.sv;
    int tail_sign = head_is_u ? fs.sv : fs.su;

    long head_hi = LONG_MIN / 4;
    long tail_lo = LONG_MAX / 4;
    for (const auto& [e, c] : r.numerator) {
        if (c.is_zero()) {
            continue;
        }
        long hu = head_is_u ? e.first - fs.eu : e.second - fs.ev;
        long tv = head_is_u ? e.second - fs.ev : e.first - fs.eu;
        head_hi = std::max(head_hi, hu - fs.e);
        tail_lo = std::min(tail_lo, tv);
    }
    bool empty = head_hi == LONG_MIN / 4;

    Range head_range = head_is_u ? u_range : v_range;
    Range tail_range = head_is_u ? v_range : u_range;
    Axis head_axis{head_is_u ? u : v, head_range.lo, head_range.hi, empty, empty || head_range.hi >= head_hi};
    Axis tail_axis{head_is_u ? v : u, tail_range.lo, tail_range.hi, empty || tail_range.lo <= tail_lo, empty};
    WindowedSeries out = head_is_u ? WindowedSeries({head_axis, tail_axis}) : WindowedSeries({tail_axis, head_axis});

    for (const auto& [e, c] : r.numerator) {
        long h0 = (head_is_u ? e.first - fs.eu : e.second - fs.ev) - fs.e;
        long t0 = head_is_u ? e.second - fs.ev : e.first - fs.eu;
        // (sh H + st T)^{-e} = sum_k binom(-e,k) sh^{-e-k} st^k H^{-e-k} T^k
        for (long k = 0;; ++k) {
            long he = h0 - k;
            long te = t0 + k;
            if (te > tail_range.hi || he < head_range.lo) {
                break;
            }
            if (te < tail_range.lo || he > head_range.hi) {
                continue;
            }
            Rational coef = binom(-fs.e, k);
            if (head_sign < 0 && (-fs.e - k) % 2 != 0) {
                coef = -coef;
            }
            if (tail_sign < 0 && k % 2 != 0) {
                coef = -coef;
            }
            series::WindowedSeries::Key key = head_is_u ? std::vector<long>{he, te} : std::vector<long>{te, he};
            out.add(key, coef * c);
            if (fs.e == 0) {
                break;
            }
        }
    }
    return out;
}

Verdict check_A(const TripleInstance& t, long n)
{
    auto basis = basis_of({&t.f, &t.g, &t.h});
    Grid f(t.f, basis), g(t.g, basis), h(t.h, basis);
    std::size_t dim = basis.size();
    Acc acc(dim);
    long ff = f.floor2(), gf = g.floor2(), hf = h.floor2();
    for (long p = -n; p <= n; ++p) {
        for (long q = -n; q <= n; ++q) {
            for (long r = -n; r <= n; ++r) {
                acc.clear();
                // x0^{-1} delta((x1-x2)/x0) f(x1,x2)
                long e = -p - 1;
                for (long j = 0; r - j >= ff; ++j) {
                    if (f.beyond1(q - e + j)) {
                        break;
                    }
                    const Rational& bc = binom_cached(e, j);
                    acc.axpy(j % 2 == 0 ? bc : Rational(-bc), f.at(q - e + j, r - j));
                }
                // - x0^{-1} delta((-x2+x1)/x0) g(x2,x1)
                for (long j = 0; q - j >= gf; ++j) {
                    if (g.beyond1(r - e + j)) {
                        break;
                    }
                    const Rational& bc = binom_cached(e, j);
                    acc.axpy((e - j) % 2 == 0 ? Rational(-bc) : bc, g.at(r - e + j, q - j));
                }
                // - x1^{-1} delta((x2+x0)/x1) h(x2,x0)
                long e3 = -q - 1;
                for (long j = 0; p - j >= hf; ++j) {
                    if (h.beyond1(r - e3 + j)) {
                        break;
                    }
                    acc.axpy(-binom_cached(e3, j), h.at(r - e3 + j, p - j));
                }
                if (!acc.zero()) {
                    return fail_at({"x0", "x1", "x2"}, {p, q, r}, acc, basis, "three-term combination is nonzero");
                }
            }
        }
    }
    return {};
}

Verdict pole_clears(const TripleInstance& t, WitnessKind kind, long m, long n)
{
    auto basis = basis_of({&t.f, &t.g, &t.h});
    Table d = witness_difference(t, kind, -n - m, n, basis);
    Acc acc(basis.size());
    for (long i = -n; i <= n; ++i) {
        for (long j = -n; j <= n; ++j) {
            clear_pole(d, kind, m, i, j, acc);
            if (!acc.zero()) {
                return fail_at(witness_vars(kind), {i, j}, acc, basis,
                               to_string(kind) + " = " + std::to_string(m) + " does not clear the pole");
            }
        }
    }
    return {};
}

std::optional<PoleWitness> find_pole_witness(const TripleInstance& t, WitnessKind kind, long m_max, long n)
{
    auto basis = basis_of({&t.f, &t.g, &t.h});
    Table d = witness_difference(t, kind, -n - m_max, n, basis);
    Acc acc(basis.size());
    for (long m = 0; m <= m_max; ++m) {
        bool ok = true;
        for (long i = -n; i <= n && ok; ++i) {
            for (long j = -n; j <= n && ok; ++j) {
                clear_pole(d, kind, m, i, j, acc);
                ok = acc.zero();
            }
        }
        if (ok) {
            return PoleWitness{m, kind};
        }
    }
    return std::nullopt;
}

namespace {

// Series of the triple in the coordinates of a form kind, restricted to the
// test box: E -> (f(x1,x2), g(x2,x1)); F -> (f(x0+x2,x2), h(x2,x0));
// G -> (g(-x0+x1,x1), h(x1-x0,x0)).
std::pair<Table, Table> sides_for(const TripleInstance& t, FormKind kind, long lo, long hi,
                                  const std::vector<std::string>& basis)
{
    Grid f(t.f, basis), g(t.g, basis), h(t.h, basis);
    std::size_t dim = basis.size();
    Table first(lo, hi, lo, hi, dim), second(lo, hi, lo, hi, dim);
    for (long i = lo; i <= hi; ++i) {
        for (long j = lo; j <= hi; ++j) {
            Acc a(dim), b(dim);
            switch (kind) {
            case FormKind::E:
                a.axpy(1, f.at(i, j));
                b.axpy(1, g.at(j, i));
                break;
            case FormKind::F:
                shifted_entry(f, i, j, false, a);
                b.axpy(1, h.at(j, i));
                break;
            case FormKind::G: {
                shifted_entry(g, i, j, false, a);
                if (i % 2 != 0) {
                    for (auto& x : a.v) {
                        x = -x;
                    }
                }
                shifted_entry(h, j, i, true, b);
                break;
            }
            }
            std::copy(a.v.begin(), a.v.end(), first.at(i, j));
            std::copy(b.v.begin(), b.v.end(), second.at(i, j));
        }
    }
    return {std::move(first), std::move(second)};
}

FormKind kind_for(WitnessKind w)
{
    switch (w) {
    case WitnessKind::M1:
        return FormKind::E;
    case WitnessKind::M2:
        return FormKind::F;
    case WitnessKind::M3:
        return FormKind::G;
    }
    return FormKind::E;
}

} // namespace

Verdict check_form(const TripleInstance& t, const RationalForm& r, long n)
{
    auto basis = basis_of({&t.f, &t.g, &t.h});
    for (const auto& [e, c] : r.numerator) {
        for (const auto& [id, x] : c.entries()) {
            if (std::find(basis.begin(), basis.end(), id) == basis.end()) {
                basis.push_back(id);
            }
        }
    }
    auto [first, second] = sides_for(t, r.kind, -n, n, basis);
    WindowedSeries e1 = expand_rational_form(r, ExpansionMode::First, {-n, n}, {-n, n});
    WindowedSeries e2 = expand_rational_form(r, ExpansionMode::Second, {-n, n}, {-n, n});
    Grid g1(e1, basis), g2(e2, basis);
    auto vars = form_vars(r.kind);
    Acc acc(basis.size());
    for (long i = -n; i <= n; ++i) {
        for (long j = -n; j <= n; ++j) {
            for (int side = 0; side < 2; ++side) {
                acc.clear();
                acc.axpy(1, side == 0 ? first.at(i, j) : second.at(i, j));
                acc.axpy(-1, side == 0 ? g1.at(i, j) : g2.at(i, j));
                if (!acc.zero()) {
                    return fail_at({vars.first, vars.second}, {i, j}, acc, basis,
                                   std::string(side == 0 ? "first" : "second") + " expansion of the " +
                                       to_string(r.kind) + "-form differs");
                }
            }
        }
    }
    return {};
}

RationalForm reconstruct_form(const TripleInstance& t, const PoleWitness& w, long n)
{
    auto basis = basis_of({&t.f, &t.g, &t.h});
    FormKind kind = kind_for(w.kind);
    long m = w.m;
    // Pole-cleared first side on the box, then shifted to a polynomial.
    auto [first, second] = sides_for(t, kind, -n - m, n, basis);
    (void)second;
    Table d = first;
    Acc acc(basis.size());
    Poly2 cleared;
    for (long i = -n; i <= n; ++i) {
        for (long j = -n; j <= n; ++j) {
            clear_pole(d, w.kind, m, i, j, acc);
            if (!acc.zero()) {
                cleared[{i, j}] = acc.to_vector(basis);
            }
        }
    }
    long min_u = 0, min_v = 0;
    for (const auto& [e, c] : cleared) {
        min_u = std::min(min_u, e.first);
        min_v = std::min(min_v, e.second);
    }
    RationalForm r;
    r.kind = kind;
    for (const auto& [e, c] : cleared) {
        r.numerator[{e.first - min_u, e.second - min_v}] = c;
    }
    switch (kind) {
    case FormKind::E:
        r.a = m;
        r.b = -min_u;
        r.c = -min_v;
        break;
    case FormKind::F:
        r.a = -min_u;
        r.b = m;
        r.c = -min_v;
        break;
    case FormKind::G:
        r.a = -min_u;
        r.b = -min_v;
        r.c = m;
        break;
    }
    return r;
}

std::optional<RationalForm> rewrite_over(const RationalForm& r, long a, long b, long c)
{
    if (a < r.a || b < r.b || c < r.c) {
        return std::nullopt;
    }
    FormShape fs = shape_of(r);
    RationalForm target = r;
    target.a = a;
    target.b = b;
    target.c = c;
    FormShape ts = shape_of(target);
    std::map<std::pair<long, long>, Rational> factor = binomial_power(fs.su, fs.sv, ts.e - fs.e);
    std::map<std::pair<long, long>, Rational> mono{{{ts.eu - fs.eu, ts.ev - fs.ev}, Rational(1)}};
    target.numerator = poly_mul(poly_mul(r.numerator, factor), mono);
    return target;
}

// Implications -------------------------------------------------------------------

std::string to_string(Implication i)
{
    switch (i) {
    case Implication::ia:
        return "ia";
    case Implication::ib:
        return "ib";
    case Implication::ic:
        return "ic";
    case Implication::iia:
        return "iia";
    case Implication::iib:
        return "iib";
    case Implication::iic:
        return "iic";
    case Implication::iiia:
        return "iiia";
    case Implication::iiib:
        return "iiib";
    case Implication::iiic:
        return "iiic";
    }
    return "?";
}

const std::vector<Implication>& all_implications()
{
    static const std::vector<Implication> all{Implication::ia,   Implication::ib,   Implication::ic,
                                              Implication::iia,  Implication::iib,  Implication::iic,
                                              Implication::iiia, Implication::iiib, Implication::iiic};
    return all;
}

Implication parse_implication(const std::string& s)
{
    for (auto i : all_implications()) {
        if (to_string(i) == s) {
            return i;
        }
    }
    throw ConfigError("unknown implication '" + s + "'");
}

ReplayResult replay_implication(Implication which, const TripleInstance& t, long n, long m_max)
{
    ReplayResult out;
    out.which = which;
    auto need_form = [&](const std::optional<RationalForm>& r, const char* name) -> const RationalForm& {
        if (!r) {
            throw HypothesisNotMet(to_string(which) + ": instance carries no " + name + "-form");
        }
        Verdict v = check_form(t, *r, n);
        if (!v.holds) {
            throw HypothesisNotMet(to_string(which) + ": (" + name + ") fails: " + v.detail);
        }
        return *r;
    };
    switch (which) {
    case Implication::ia:
    case Implication::ib:
    case Implication::ic: {
        Verdict a = check_A(t, n);
        if (!a.holds) {
            throw HypothesisNotMet(to_string(which) + ": (A) fails: " + a.detail);
        }
        WitnessKind kind = which == Implication::ia   ? WitnessKind::M1
                           : which == Implication::ib ? WitnessKind::M2
                                                      : WitnessKind::M3;
        out.witness = find_pole_witness(t, kind, m_max, n);
        if (!out.witness) {
            throw ConsistencyViolation(to_string(which) + ": (A) holds but no " + to_string(kind) +
                                       " <= " + std::to_string(m_max) + " clears the pole");
        }
        out.detail = to_string(kind) + " = " + std::to_string(out.witness->m);
        break;
    }
    case Implication::iia:
    case Implication::iib:
    case Implication::iic: {
        WitnessKind kind = which == Implication::iia   ? WitnessKind::M1
                           : which == Implication::iib ? WitnessKind::M2
                                                       : WitnessKind::M3;
        out.witness = find_pole_witness(t, kind, m_max, n);
        if (!out.witness) {
            throw HypothesisNotMet(to_string(which) + ": no " + to_string(kind) + " <= " + std::to_string(m_max));
        }
        out.constructed = reconstruct_form(t, *out.witness, n);
        Verdict v = check_form(t, *out.constructed, n);
        if (!v.holds) {
            throw ConsistencyViolation(to_string(which) + ": constructed form does not re-expand: " + v.detail);
        }
        out.detail = "constructed " + to_string(out.constructed->kind) + "-form a=" +
                     std::to_string(out.constructed->a) + " b=" + std::to_string(out.constructed->b) +
                     " c=" + std::to_string(out.constructed->c);
        break;
    }
    case Implication::iiia:
    case Implication::iiib:
    case Implication::iiic: {
        if (which != Implication::iiic) {
            need_form(t.e_form, "E");
        }
        if (which != Implication::iiib) {
            need_form(t.f_form, "F");
        }
        if (which != Implication::iiia) {
            need_form(t.g_form, "G");
        }
        Verdict a = check_A(t, n);
        if (!a.holds) {
            throw ConsistencyViolation(to_string(which) + ": hypotheses hold but (A) fails: " + a.detail);
        }
        out.detail = "(A) holds on [-" + std::to_string(n) + ", " + std::to_string(n) + "]^3";
        break;
    }
    }
    return out;
}

// Generation ---------------------------------------------------------------------

RationalForm induced_f_form(const RationalForm& e_form)
{
    // p2(x0,x2) = p1(x0+x2, x2)
    RationalForm r;
    r.kind = FormKind::F;
    r.a = e_form.a;
    r.b = e_form.b;
    r.c = e_form.c;
    for (const auto& [e, c] : e_form.numerator) {
        for (const auto& [k, bc] : binomial_power(1, 1, e.first)) {
            r.numerator[{k.first, k.second + e.second}].axpy(bc, c);
        }
    }
    std::erase_if(r.numerator, [](const auto& kv) { return kv.second.is_zero(); });
    return r;
}

RationalForm induced_g_form(const RationalForm& e_form)
{
    // p3(x0,x1) = p1(x1, x1-x0)
    RationalForm r;
    r.kind = FormKind::G;
    r.a = e_form.a;
    r.b = e_form.b;
    r.c = e_form.c;
    for (const auto& [e, c] : e_form.numerator) {
        // (x1 - x0)^j as (u=x0, v=x1) polynomial, times x1^i
        for (const auto& [k, bc] : binomial_power(-1, 1, e.second)) {
            r.numerator[{k.first, k.second + e.first}].axpy(bc, c);
        }
    }
    std::erase_if(r.numerator, [](const auto& kv) { return kv.second.is_zero(); });
    return r;
}

namespace {

WindowedSeries transpose(const WindowedSeries& s, const std::string& y1, const std::string& y2)
{
    Axis a1 = s.axes()[1];
    Axis a2 = s.axes()[0];
    a1.var = y1;
    a2.var = y2;
    WindowedSeries out({a1, a2});
    for (const auto& [k, c] : s.data()) {
        out.add({k[1], k[0]}, c);
    }
    return out;
}

WindowedSeries rename(const WindowedSeries& s, const std::string& y1, const std::string& y2)
{
    Axis a1 = s.axes()[0];
    Axis a2 = s.axes()[1];
    a1.var = y1;
    a2.var = y2;
    WindowedSeries out({a1, a2});
    for (const auto& [k, c] : s.data()) {
        out.add(k, c);
    }
    return out;
}

} // namespace

TripleInstance instance_from_form(const RationalForm& e_form, long n, long m_max)
{
    if (e_form.kind != FormKind::E) {
        throw DomainError("instance_from_form needs an E-form");
    }
    // Head variables must reach far down for the delta convolutions; tail
    // variables only need [true floor, n].
    long degree = 0;
    for (const auto& [e, c] : e_form.numerator) {
        degree = std::max(degree, e.first + e.second);
    }
    long head_lo = -(2 * n + m_max + 2);
    long head_hi = std::max(n, degree + 1);
    long tail_lo = -(e_form.a + e_form.b + e_form.c + 1);
    long tail_hi = n;
    RationalForm f_form = induced_f_form(e_form);
    TripleInstance t;
    // f(y1,y2) = E-first(x1=y1, x2=y2)
    t.f = rename(expand_rational_form(e_form, ExpansionMode::First, {head_lo, head_hi}, {tail_lo, tail_hi}), "y1",
                 "y2");
    // g(x2,x1) = E-second(x1,x2): head x2, tail x1
    t.g = transpose(expand_rational_form(e_form, ExpansionMode::Second, {tail_lo, tail_hi}, {head_lo, head_hi}),
                    "y1", "y2");
    // h(x2,x0) = F-second(x0,x2): head x2, tail x0
    t.h = transpose(expand_rational_form(f_form, ExpansionMode::Second, {tail_lo, tail_hi}, {head_lo, head_hi}),
                    "y1", "y2");
    t.e_form = e_form;
    t.f_form = f_form;
    t.g_form = induced_g_form(e_form);
    return t;
}

TripleInstance generate_instance(std::uint64_t seed, const GeneratorConfig& cfg)
{
    std::mt19937_64 rng(seed);
    // Plain modulo keeps the stream identical across standard libraries.
    auto uniform = [&](long lo, long hi) {
        return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    RationalForm r;
    r.kind = FormKind::E;
    long terms = uniform(1, cfg.max_terms);
    for (long i = 0; i < terms; ++i) {
        long deg = uniform(0, cfg.max_degree);
        long e1 = uniform(0, deg);
        VectorCoeff c;
        for (const auto& id : cfg.basis) {
            c.add(id, Rational(uniform(-cfg.coeff_bound, cfg.coeff_bound)));
        }
        if (c.is_zero()) {
            c.add(cfg.basis.front(), 1);
        }
        r.numerator[{e1, deg - e1}] += c;
    }
    std::erase_if(r.numerator, [](const auto& kv) { return kv.second.is_zero(); });
    if (r.numerator.empty()) {
        r.numerator[{0, 0}] = VectorCoeff::basis(cfg.basis.front());
    }
    r.a = uniform(0, cfg.max_pole);
    r.b = uniform(0, cfg.max_pole);
    r.c = uniform(0, cfg.max_pole);
    TripleInstance t = instance_from_form(r, cfg.window, cfg.m_max);
    t.seed = seed;
    return t;
}

nlohmann::json to_json(const RationalForm& r)
{
    nlohmann::json num = nlohmann::json::array();
    auto [u, v] = form_vars(r.kind);
    for (const auto& [e, c] : r.numerator) {
        nlohmann::json coeff = nlohmann::json::object();
        for (const auto& [id, x] : c.entries()) {
            coeff[id] = vfva::to_string(x);
        }
        num.push_back({{"monomial", {{u, e.first}, {v, e.second}}}, {"coeff", coeff}});
    }
    return {{"kind", to_string(r.kind)}, {"numerator", num}, {"a", r.a}, {"b", r.b}, {"c", r.c}};
}

nlohmann::json to_json(const Verdict& v)
{
    nlohmann::json j{{"holds", v.holds}};
    if (!v.holds) {
        j["monomial"] = v.monomial;
        nlohmann::json coeff = nlohmann::json::object();
        for (const auto& [id, x] : v.value.entries()) {
            coeff[id] = vfva::to_string(x);
        }
        j["value"] = coeff;
        j["detail"] = v.detail;
    }
    return j;
}

} // namespace vfva::elemprop
