#include "vfva/valg.hpp"

#include "vfva/errors.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

namespace vfva::valg {

namespace {

using nlohmann::json;

const Rational& binom_memo(long n, long k)
{
    static std::map<std::pair<long, long>, Rational> cache;
    auto it = cache.find({n, k});
    if (it == cache.end()) {
        it = cache.emplace(std::make_pair(n, k), binom(n, k)).first;
    }
    return it->second;
}

Rational sign_of(long e)
{
    return (e % 2 == 0) ? Rational(1) : Rational(-1);
}

template <class Key>
void accumulate(std::map<Key, VectorCoeff>& p, const Key& key, const Rational& c, const VectorCoeff& v)
{
    if (c == 0 || v.is_zero()) {
        return;
    }
    auto& slot = p[key];
    slot.axpy(c, v);
    if (slot.is_zero()) {
        p.erase(key);
    }
}

template <class Key>
std::optional<std::pair<Key, VectorCoeff>> first_difference(const std::map<Key, VectorCoeff>& a,
                                                             const std::map<Key, VectorCoeff>& b)
{
    std::set<Key> keys;
    for (const auto& [k, c] : a) {
        keys.insert(k);
    }
    for (const auto& [k, c] : b) {
        keys.insert(k);
    }
    for (const auto& k : keys) {
        VectorCoeff d;
        if (auto it = a.find(k); it != a.end()) {
            d += it->second;
        }
        if (auto it = b.find(k); it != b.end()) {
            d -= it->second;
        }
        if (!d.is_zero()) {
            return std::make_pair(k, d);
        }
    }
    return std::nullopt;
}

VectorCoeff vec(const std::string& id)
{
    return VectorCoeff::basis(id);
}

// Y_act(u,y1) Y_act(v,y2) w
Poly2 compose(const ModeTable& act, const VectorCoeff& u, const VectorCoeff& v, const VectorCoeff& w)
{
    Poly2 out;
    for (const auto& [e2, c2] : act.y(v, w)) {
        for (const auto& [e1, c1] : act.y(u, c2)) {
            accumulate(out, std::make_pair(e1, e2), Rational(1), c1);
        }
    }
    return out;
}

// Y_act(Y_alg(u,y2)v, y1) w
Poly2 iterate(const ModeTable& alg, const ModeTable& act, const VectorCoeff& u, const VectorCoeff& v,
              const VectorCoeff& w)
{
    Poly2 out;
    for (const auto& [e2, c] : alg.y(u, v)) {
        for (const auto& [e1, c1] : act.y(c, w)) {
            accumulate(out, std::make_pair(e1, e2), Rational(1), c1);
        }
    }
    return out;
}

long least_first(const Poly2& p)
{
    long m = 0;
    for (const auto& [k, c] : p) {
        m = std::min(m, k.first);
    }
    return -m;
}

WindowedSeries poly2_series(const Poly2& p, const std::string& a, const std::string& b)
{
    std::map<Monomial, VectorCoeff> terms;
    for (const auto& [k, c] : p) {
        terms[Monomial{{a, k.first}, {b, k.second}}] = c;
    }
    return WindowedSeries::polynomial({a, b}, terms);
}

WindowedSeries poly1_series(const Poly1& p, const std::string& x)
{
    std::map<Monomial, VectorCoeff> terms;
    for (const auto& [e, c] : p) {
        terms[Monomial{{x, e}}] = c;
    }
    return WindowedSeries::polynomial({x}, terms);
}

Poly1 derivative(const Poly1& p)
{
    Poly1 out;
    for (const auto& [e, c] : p) {
        accumulate(out, e - 1, Rational(e), c);
    }
    return out;
}

// sum_j x^j D^j p / j!
Poly1 exp_d(const LinearMap& d, const Poly1& p)
{
    Poly1 out;
    for (const auto& [e, c] : p) {
        VectorCoeff cur = c;
        Rational inv_fact = 1;
        for (long j = 0; !cur.is_zero(); ++j) {
            if (j > 0) {
                inv_fact /= j;
            }
            accumulate(out, e + j, inv_fact, cur);
            cur = d.apply(cur);
        }
    }
    return out;
}

Poly1 apply_map(const LinearMap& d, const Poly1& p)
{
    Poly1 out;
    for (const auto& [e, c] : p) {
        accumulate(out, e, Rational(1), d.apply(c));
    }
    return out;
}

Poly1 subtract(Poly1 a, const Poly1& b)
{
    for (const auto& [e, c] : b) {
        accumulate(a, e, Rational(-1), c);
    }
    return a;
}

PropertyReport base_report(Axiom a)
{
    PropertyReport r;
    r.axiom = to_string(a);
    r.anchor = anchor(a);
    return r;
}

void set_failure(PropertyReport& r, std::vector<std::string> vectors, Monomial m, VectorCoeff value,
                 std::string detail)
{
    r.status = Status::Fail;
    r.counterexample = Counterexample{std::move(vectors), std::move(m), std::move(value)};
    r.detail = std::move(detail);
}

// Coefficients of the three delta functions of the Jacobi identity, through
// the symbolic layer's window oracle.
class DeltaOracle {
public:
    DeltaOracle()
    {
        using expansion::DeltaExpr;
        using expansion::make_delta;
        using expansion::SignedVar;
        d_[0] = DeltaExpr::delta(make_delta({SignedVar{"x1", 1}, SignedVar{"x2", -1}}, "x0"));
        d_[1] = DeltaExpr::delta(make_delta({SignedVar{"x2", -1}, SignedVar{"x1", 1}}, "x0"));
        d_[2] = DeltaExpr::delta(make_delta({SignedVar{"x2", 1}, SignedVar{"x0", 1}}, "x1"));
    }

    const Rational& coeff(int which, long p, long q, long r)
    {
        static const Rational zero(0);
        if (p + q + r != -1) {
            return zero;
        }
        std::array<long, 4> key{which, p, q, r};
        auto it = memo_.find(key);
        if (it == memo_.end()) {
            Rational c = expansion::coeff_of(d_[which], Monomial{{"x0", p}, {"x1", q}, {"x2", r}});
            it = memo_.emplace(key, c).first;
        }
        return it->second;
    }

private:
    expansion::DeltaExpr d_[3];
    std::map<std::array<long, 4>, Rational> memo_;
};

DeltaOracle& oracle()
{
    static DeltaOracle o;
    return o;
}

struct Failure {
    std::array<long, 3> at;
    VectorCoeff value;
};

using ByDegree = std::map<long, std::vector<std::pair<std::pair<long, long>, const VectorCoeff*>>>;

ByDegree by_degree(const Poly2& p)
{
    ByDegree out;
    for (const auto& [k, c] : p) {
        out[k.first + k.second].push_back({k, &c});
    }
    return out;
}

// First nonzero coefficient (in x0, x1, x2 lexicographic order over
// [-n, n]^3) of the three-term Jacobi combination.
std::optional<Failure> jacobi_by_deltas(const Poly2& f, const Poly2& g, const Poly2& h, long n)
{
    auto fd = by_degree(f), gd = by_degree(g), hd = by_degree(h);
    auto& o = oracle();
    static const std::vector<std::pair<std::pair<long, long>, const VectorCoeff*>> none;
    auto get = [](const ByDegree& m, long s) -> const auto& {
        auto it = m.find(s);
        return it == m.end() ? none : it->second;
    };
    for (long p = -n; p <= n; ++p) {
        for (long q = -n; q <= n; ++q) {
            for (long r = -n; r <= n; ++r) {
                long s = p + q + r + 1;
                const auto& fs = get(fd, s);
                const auto& gs = get(gd, s);
                const auto& hs = get(hd, s);
                if (fs.empty() && gs.empty() && hs.empty()) {
                    continue;
                }
                VectorCoeff acc;
                for (const auto& [k, c] : fs) {
                    acc.axpy(o.coeff(0, p, q - k.first, r - k.second), *c);
                }
                // g(x2, x1)
                for (const auto& [k, c] : gs) {
                    acc.axpy(-o.coeff(1, p, q - k.second, r - k.first), *c);
                }
                // h(x2, x0)
                for (const auto& [k, c] : hs) {
                    acc.axpy(-o.coeff(2, p - k.second, q, r - k.first), *c);
                }
                if (!acc.is_zero()) {
                    return Failure{{p, q, r}, acc};
                }
            }
        }
    }
    return std::nullopt;
}

struct Action {
    const VertexStructure& alg;
    const ModeTable& act;
    const std::vector<std::string>& space;
};

long default_m_max(const Action& a)
{
    return std::max(a.alg.table().max_pole(), a.act.max_pole()) + 2;
}

PropertyReport check_jacobi(const Action& a, const CheckParams& params)
{
    auto r = base_report(Axiom::jacobi);
    long n = params.window.value_or(jacobi_window(a.alg.table(), a.act));
    r.window = n;
    for (const auto& u : a.alg.basis()) {
        for (const auto& v : a.alg.basis()) {
            for (const auto& w : a.space) {
                Poly2 f = compose(a.act, vec(u), vec(v), vec(w));
                Poly2 g = compose(a.act, vec(v), vec(u), vec(w));
                Poly2 h = iterate(a.alg.table(), a.act, vec(u), vec(v), vec(w));
                if (f.empty() && g.empty() && h.empty()) {
                    continue;
                }
                auto by_deltas = jacobi_by_deltas(f, g, h, n);
                elemprop::TripleInstance t;
                t.f = poly2_series(f, "y1", "y2");
                t.g = poly2_series(g, "y1", "y2");
                t.h = poly2_series(h, "y1", "y2");
                auto by_triple = elemprop::check_A(t, n);
                bool agree = by_deltas.has_value() == !by_triple.holds;
                if (agree && by_deltas) {
                    Monomial m{{"x0", by_deltas->at[0]}, {"x1", by_deltas->at[1]}, {"x2", by_deltas->at[2]}};
                    agree = m == by_triple.monomial && by_deltas->value == by_triple.value;
                }
                if (!agree) {
                    throw ConsistencyViolation("jacobi: delta-expansion and three-term checks disagree on (" + u +
                                               ", " + v + ", " + w + ")");
                }
                if (by_deltas) {
                    set_failure(r, {u, v, w},
                                Monomial{{"x0", by_deltas->at[0]}, {"x1", by_deltas->at[1]}, {"x2", by_deltas->at[2]}},
                                by_deltas->value, "three-term combination is nonzero");
                    return r;
                }
            }
        }
    }
    return r;
}

struct WeakSides {
    Poly2 lhs;
    Poly2 rhs;
    // least clearing power when lhs == rhs
    long m = 0;
};

// Both sides of a weak property after clearing poles with the least power
// that makes each side a Laurent polynomial; the property holds iff they agree.
WeakSides weak_sides(const Action& a, Axiom axiom, const std::string& u, const std::string& v, const std::string& w)
{
    WeakSides out;
    switch (axiom) {
    case Axiom::weak_comm: {
        // Both products are Laurent polynomials, so a clearing power exists
        // only when they agree outright.
        out.lhs = compose(a.act, vec(u), vec(v), vec(w));
        for (const auto& [k, c] : compose(a.act, vec(v), vec(u), vec(w))) {
            out.rhs[{k.second, k.first}] = c;
        }
        return out;
    }
    case Axiom::weak_assoc: {
        Poly2 f = compose(a.act, vec(u), vec(v), vec(w));
        Poly2 h = iterate(a.alg.table(), a.act, vec(u), vec(v), vec(w));
        long m = out.m = least_first(f);
        // keys (x0, x2)
        for (const auto& [k, c] : f) {
            long e = k.first + m;
            for (long j = 0; j <= e; ++j) {
                accumulate(out.lhs, std::make_pair(e - j, k.second + j), binom_memo(e, j), c);
            }
        }
        for (const auto& [k, c] : h) { // x2^{k.first} x0^{k.second}
            for (long j = 0; j <= m; ++j) {
                accumulate(out.rhs, std::make_pair(k.second + m - j, k.first + j), binom_memo(m, j), c);
            }
        }
        return out;
    }
    case Axiom::weak_skew_assoc: {
        Poly2 g = compose(a.act, vec(v), vec(u), vec(w));
        Poly2 h = iterate(a.alg.table(), a.act, vec(u), vec(v), vec(w));
        long m = out.m = std::max(least_first(g), least_first(h));
        // keys (x0, x1); g(-x0+x1, x1)
        for (const auto& [k, c] : g) {
            long e = k.first + m;
            for (long j = 0; j <= e; ++j) {
                accumulate(out.lhs, std::make_pair(e - j, k.second + j), binom_memo(e, j) * sign_of(e - j), c);
            }
        }
        // h(x1-x0, x0)
        for (const auto& [k, c] : h) {
            long e = k.first + m;
            for (long j = 0; j <= e; ++j) {
                accumulate(out.rhs, std::make_pair(k.second + j, e - j), binom_memo(e, j) * sign_of(j), c);
            }
        }
        return out;
    }
    default:
        throw DomainError(to_string(axiom) + " is not a weak property");
    }
}

std::pair<std::string, std::string> weak_vars(Axiom axiom)
{
    switch (axiom) {
    case Axiom::weak_comm:
        return {"x1", "x2"};
    case Axiom::weak_assoc:
        return {"x0", "x2"};
    default:
        return {"x0", "x1"};
    }
}

PropertyReport check_weak(const Action& a, Axiom axiom, const CheckParams& params)
{
    auto r = base_report(axiom);
    long m_max = params.m_max.value_or(default_m_max(a));
    auto [v0, v1] = weak_vars(axiom);
    long best = 0;
    for (const auto& u : a.alg.basis()) {
        for (const auto& v : a.alg.basis()) {
            for (const auto& w : a.space) {
                auto sides = weak_sides(a, axiom, u, v, w);
                if (auto d = first_difference(sides.lhs, sides.rhs)) {
                    set_failure(r, {u, v, w}, Monomial{{v0, d->first.first}, {v1, d->first.second}}, d->second,
                                "difference survives every pole-clearing power");
                    return r;
                }
                if (sides.m > m_max) {
                    set_failure(r, {u, v, w}, Monomial{}, VectorCoeff{},
                                "least clearing power " + std::to_string(sides.m) + " exceeds m_max " +
                                    std::to_string(m_max));
                    return r;
                }
                best = std::max(best, sides.m);
            }
        }
    }
    r.witness = best;
    return r;
}

PropertyReport check_vf_skew(const Action& a)
{
    auto r = base_report(Axiom::vf_skew_symmetry);
    for (const auto& u : a.alg.basis()) {
        for (const auto& v : a.alg.basis()) {
            for (const auto& w : a.space) {
                Poly2 huv = iterate(a.alg.table(), a.act, vec(u), vec(v), vec(w));
                Poly2 hvu = iterate(a.alg.table(), a.act, vec(v), vec(u), vec(w));
                long p = least_first(hvu);
                Poly2 lhs, rhs; // keys (x0, x2), both sides times (x2+x0)^p
                for (const auto& [k, c] : huv) {
                    for (long j = 0; j <= p; ++j) {
                        accumulate(lhs, std::make_pair(k.second + j, k.first + p - j), binom_memo(p, j), c);
                    }
                }
                for (const auto& [k, c] : hvu) {
                    long e = k.first + p;
                    for (long j = 0; j <= e; ++j) {
                        accumulate(rhs, std::make_pair(k.second + j, e - j), binom_memo(e, j) * sign_of(k.second), c);
                    }
                }
                if (auto d = first_difference(lhs, rhs)) {
                    set_failure(r, {u, v, w}, Monomial{{"x0", d->first.first}, {"x2", d->first.second}}, d->second,
                                "sides differ after clearing (x2+x0)^" + std::to_string(p));
                    return r;
                }
            }
        }
    }
    return r;
}

const VacuumData& need_vacuum(const VertexStructure& s, Axiom a)
{
    if (!s.vacuum()) {
        throw MissingVacuum(to_string(a) + " needs a vacuum vector");
    }
    return *s.vacuum();
}

template <class Sides>
PropertyReport check_pairs(Axiom axiom, const std::vector<std::string>& left, const std::vector<std::string>& right,
                           Sides sides)
{
    auto r = base_report(axiom);
    for (const auto& u : left) {
        for (const auto& w : right) {
            auto [lhs, rhs] = sides(u, w);
            if (auto d = first_difference(lhs, rhs)) {
                set_failure(r, {u, w}, Monomial{{"x", d->first}}, d->second, "sides differ");
                return r;
            }
        }
    }
    return r;
}

PropertyReport check_vacuum_prop(const Action& a)
{
    const auto& vac = need_vacuum(a.alg, Axiom::vacuum_prop);
    return check_pairs(Axiom::vacuum_prop, {vac.one}, a.space, [&](const auto& one, const auto& w) {
        return std::make_pair(a.act.y(vec(one), vec(w)), Poly1{{0, vec(w)}});
    });
}

PropertyReport check_d_derivative(const Action& a)
{
    const auto& vac = need_vacuum(a.alg, Axiom::d_derivative);
    return check_pairs(Axiom::d_derivative, a.alg.basis(), a.space, [&](const auto& u, const auto& w) {
        return std::make_pair(a.act.y(vac.dop.apply(vec(u)), vec(w)), derivative(a.act.y(vec(u), vec(w))));
    });
}

PropertyReport check_skew(const VertexStructure& s)
{
    const auto& vac = need_vacuum(s, Axiom::skew_symmetry);
    return check_pairs(Axiom::skew_symmetry, s.basis(), s.basis(), [&](const auto& u, const auto& v) {
        Poly1 reflected;
        for (const auto& [e, c] : s.table().y(vec(v), vec(u))) {
            accumulate(reflected, e, sign_of(e), c);
        }
        return std::make_pair(s.table().y(vec(u), vec(v)), exp_d(vac.dop, reflected));
    });
}

PropertyReport check_d_bracket(const VertexStructure& s)
{
    const auto& vac = need_vacuum(s, Axiom::d_bracket);
    return check_pairs(Axiom::d_bracket, s.basis(), s.basis(), [&](const auto& u, const auto& w) {
        Poly1 y = s.table().y(vec(u), vec(w));
        Poly1 bracket = subtract(apply_map(vac.dop, y), s.table().y(vec(u), vac.dop.apply(vec(w))));
        return std::make_pair(bracket, derivative(y));
    });
}

PropertyReport check_creation(const VertexStructure& s)
{
    const auto& vac = need_vacuum(s, Axiom::creation_prop);
    auto r = base_report(Axiom::creation_prop);
    for (const auto& u : s.basis()) {
        Poly1 y = s.table().y(vec(u), vec(vac.one));
        for (const auto& [e, c] : y) {
            if (e < 0) {
                set_failure(r, {u, vac.one}, Monomial{{"x", e}}, c, "Y(u,x)1 has a negative power");
                return r;
            }
        }
        VectorCoeff constant = y.count(0) ? y.at(0) : VectorCoeff{};
        if (constant != vec(u)) {
            set_failure(r, {u, vac.one}, Monomial{{"x", 0}}, constant - vec(u), "u_{-1}1 differs from u");
            return r;
        }
    }
    return r;
}

PropertyReport check_strong_creation(const VertexStructure& s)
{
    const auto& vac = need_vacuum(s, Axiom::strong_creation);
    return check_pairs(Axiom::strong_creation, s.basis(), {vac.one}, [&](const auto& u, const auto& one) {
        return std::make_pair(s.table().y(vec(u), vec(one)), exp_d(vac.dop, Poly1{{0, vec(u)}}));
    });
}

PropertyReport check_injectivity(const VertexStructure& s)
{
    auto r = base_report(Axiom::injectivity);
    std::vector<VectorCoeff> rows;
    for (const auto& u : s.basis()) {
        VectorCoeff row;
        for (const auto& v : s.basis()) {
            if (const Modes* modes = s.table().find(u, v)) {
                for (const auto& [n, c] : *modes) {
                    for (const auto& [id, q] : c.entries()) {
                        row.add(v + "|" + std::to_string(n) + "|" + id, q);
                    }
                }
            }
        }
        std::size_t before = rank(rows);
        rows.push_back(row);
        if (rank(rows) == before) {
            set_failure(r, {u}, Monomial{}, VectorCoeff{},
                        "Y(" + u + ",x) lies in the span of the preceding vertex operators");
            return r;
        }
    }
    return r;
}

long power_index(const std::string& id)
{
    if (id == "1") {
        return 0;
    }
    if (id == "t") {
        return 1;
    }
    if (id.size() > 1 && id[0] == 't') {
        return std::stol(id.substr(1));
    }
    throw ConfigError("not a power of t: '" + id + "'");
}

json vector_json(const VectorCoeff& v)
{
    json j = json::object();
    for (const auto& [id, c] : v.entries()) {
        j[id] = vfva::to_string(c);
    }
    return j;
}

VectorCoeff vector_from_json(const json& j)
{
    if (!j.is_object()) {
        throw ConfigError("coefficient must be an object of basis -> rational");
    }
    VectorCoeff v;
    for (const auto& [id, c] : j.items()) {
        v.add(id, parse_rational(c.is_string() ? c.get<std::string>() : c.dump()));
    }
    return v;
}

} // namespace

// ModeTable ---------------------------------------------------------------------

void ModeTable::set(const std::string& u, long n, const std::string& v, const VectorCoeff& c)
{
    auto& modes = entries_[{u, v}];
    if (c.is_zero()) {
        modes.erase(n);
    } else {
        modes[n] = c;
    }
    if (modes.empty()) {
        entries_.erase({u, v});
    }
}

void ModeTable::add(const std::string& u, long n, const std::string& v, const VectorCoeff& c)
{
    VectorCoeff cur;
    if (const Modes* m = find(u, v)) {
        if (auto it = m->find(n); it != m->end()) {
            cur = it->second;
        }
    }
    set(u, n, v, cur + c);
}

const Modes* ModeTable::find(const std::string& u, const std::string& v) const
{
    auto it = entries_.find({u, v});
    return it == entries_.end() ? nullptr : &it->second;
}

VectorCoeff ModeTable::mode(const VectorCoeff& u, long n, const VectorCoeff& v) const
{
    VectorCoeff out;
    for (const auto& [iu, cu] : u.entries()) {
        for (const auto& [iv, cv] : v.entries()) {
            if (const Modes* m = find(iu, iv)) {
                if (auto it = m->find(n); it != m->end()) {
                    out.axpy(cu * cv, it->second);
                }
            }
        }
    }
    return out;
}

Poly1 ModeTable::y(const VectorCoeff& u, const VectorCoeff& v) const
{
    Poly1 out;
    for (const auto& [iu, cu] : u.entries()) {
        for (const auto& [iv, cv] : v.entries()) {
            if (const Modes* m = find(iu, iv)) {
                for (const auto& [n, c] : *m) {
                    accumulate(out, -n - 1, Rational(cu * cv), c);
                }
            }
        }
    }
    return out;
}

long ModeTable::max_pole() const
{
    long best = 0;
    for (const auto& [k, modes] : entries_) {
        if (!modes.empty()) {
            best = std::max(best, modes.rbegin()->first + 1);
        }
    }
    return best;
}

long ModeTable::max_degree() const
{
    long best = 0;
    for (const auto& [k, modes] : entries_) {
        if (!modes.empty()) {
            best = std::max(best, -modes.begin()->first - 1);
        }
    }
    return best;
}

// VertexStructure ---------------------------------------------------------------

VertexStructure::VertexStructure(std::vector<std::string> basis, ModeTable table, std::optional<std::string> vacuum)
    : basis_(std::move(basis)), table_(std::move(table))
{
    std::set<std::string> known(basis_.begin(), basis_.end());
    if (known.size() != basis_.size()) {
        throw ConfigError("basis has repeated elements");
    }
    for (const auto& [k, modes] : table_.entries()) {
        if (!known.count(k.first) || !known.count(k.second)) {
            throw ConfigError("mode entry (" + k.first + ", " + k.second + ") names an unknown basis element");
        }
        for (const auto& [n, c] : modes) {
            for (const auto& [id, q] : c.entries()) {
                if (!known.count(id)) {
                    throw ConfigError("coefficient names unknown basis element '" + id + "'");
                }
            }
        }
    }
    if (vacuum) {
        if (!known.count(*vacuum)) {
            throw ConfigError("vacuum '" + *vacuum + "' is not a basis element");
        }
        LinearMap d(basis_);
        for (const auto& v : basis_) {
            d.set_image(v, table_.mode(vec(v), -2, vec(*vacuum)));
        }
        if (d.nilpotency_index() == 0) {
            throw ConfigError("D v = v_{-2}1 is not nilpotent");
        }
        vacuum_ = VacuumData{*vacuum, d};
    }
}

// Borcherds construction ---------------------------------------------------------

VectorCoeff CommutativeAlgebra::multiply(const VectorCoeff& a, const VectorCoeff& b) const
{
    VectorCoeff out;
    for (const auto& [ia, ca] : a.entries()) {
        for (const auto& [ib, cb] : b.entries()) {
            if (auto it = product.find({ia, ib}); it != product.end()) {
                out.axpy(ca * cb, it->second);
            }
        }
    }
    return out;
}

VertexStructure borcherds_construct(const CommutativeAlgebra& a, const LinearMap& d)
{
    if (d.basis() != a.basis) {
        throw ConstructionRefused("derivation and algebra use different bases");
    }
    for (const auto& x : a.basis) {
        for (const auto& y : a.basis) {
            if (a.multiply(vec(x), vec(y)) != a.multiply(vec(y), vec(x))) {
                throw ConstructionRefused("product is not commutative at (" + x + ", " + y + ")");
            }
            VectorCoeff leibniz = a.multiply(d.apply(vec(x)), vec(y)) + a.multiply(vec(x), d.apply(vec(y)));
            if (d.apply(a.multiply(vec(x), vec(y))) != leibniz) {
                throw ConstructionRefused("D is not a derivation at (" + x + ", " + y + ")");
            }
            for (const auto& z : a.basis) {
                if (a.multiply(a.multiply(vec(x), vec(y)), vec(z)) != a.multiply(vec(x), a.multiply(vec(y), vec(z)))) {
                    throw ConstructionRefused("product is not associative at (" + x + ", " + y + ", " + z + ")");
                }
            }
        }
    }
    if (d.nilpotency_index() == 0) {
        throw ConstructionRefused("D is not nilpotent");
    }
    if (a.unit) {
        for (const auto& x : a.basis) {
            if (a.multiply(vec(*a.unit), vec(x)) != vec(x)) {
                throw ConstructionRefused("'" + *a.unit + "' is not a unit at " + x);
            }
        }
    }
    ModeTable t;
    for (const auto& u : a.basis) {
        VectorCoeff cur = vec(u);
        Rational inv_fact = 1;
        for (long j = 0; !cur.is_zero(); ++j) {
            if (j > 0) {
                inv_fact /= j;
            }
            for (const auto& v : a.basis) {
                t.set(u, -j - 1, v, inv_fact * a.multiply(cur, vec(v)));
            }
            cur = d.apply(cur);
        }
    }
    return VertexStructure(a.basis, t, a.unit);
}

std::string power_id(long j)
{
    if (j == 0) {
        return "1";
    }
    if (j == 1) {
        return "t";
    }
    return "t" + std::to_string(j);
}

CommutativeAlgebra truncated_polynomial(long k, bool unital)
{
    if (k < 1 || (!unital && k < 2)) {
        throw DomainError("truncation order too small");
    }
    CommutativeAlgebra a;
    long start = unital ? 0 : 1;
    for (long j = start; j < k; ++j) {
        a.basis.push_back(power_id(j));
    }
    for (long i = start; i < k; ++i) {
        for (long j = start; j < k; ++j) {
            if (i + j < k) {
                a.product[{power_id(i), power_id(j)}] = vec(power_id(i + j));
            }
        }
    }
    if (unital) {
        a.unit = "1";
    }
    return a;
}

LinearMap raising_derivation(const CommutativeAlgebra& a)
{
    long k = 0;
    for (const auto& id : a.basis) {
        k = std::max(k, power_index(id) + 1);
    }
    LinearMap d(a.basis);
    for (const auto& id : a.basis) {
        long j = power_index(id);
        d.set_image(id, j + 1 < k ? VectorCoeff::basis(power_id(j + 1), j) : VectorCoeff{});
    }
    return d;
}

LinearMap plain_derivative(const CommutativeAlgebra& a)
{
    LinearMap d(a.basis);
    for (const auto& id : a.basis) {
        long j = power_index(id);
        VectorCoeff img;
        if (j > 0) {
            if (std::find(a.basis.begin(), a.basis.end(), power_id(j - 1)) == a.basis.end()) {
                throw DomainError("d/dt leaves the algebra");
            }
            img = VectorCoeff::basis(power_id(j - 1), j);
        }
        d.set_image(id, img);
    }
    return d;
}

VertexStructure borcherds_family(long k, bool unital)
{
    auto a = truncated_polynomial(k, unital);
    return borcherds_construct(a, raising_derivation(a));
}

// Series views --------------------------------------------------------------------

WindowedSeries y_series(const VertexStructure& s, const VectorCoeff& u, const VectorCoeff& v, const std::string& x)
{
    return poly1_series(s.table().y(u, v), x);
}

WindowedSeries compose_y(const VertexStructure& s, const VectorCoeff& u, const std::string& x1, const VectorCoeff& v,
                         const std::string& x2, const VectorCoeff& w)
{
    return poly2_series(compose(s.table(), u, v, w), x1, x2);
}

WindowedSeries iterate_y(const VertexStructure& s, const VectorCoeff& u, const std::string& x0, const VectorCoeff& v,
                         const std::string& x2, const VectorCoeff& w)
{
    Poly2 h = iterate(s.table(), s.table(), u, v, w);
    Poly2 swapped;
    for (const auto& [k, c] : h) {
        swapped[{k.second, k.first}] = c;
    }
    return poly2_series(swapped, x0, x2);
}

long minimal_pole_order(const ModeTable& t, const std::string& u, const std::string& v)
{
    const Modes* m = t.find(u, v);
    if (m == nullptr || m->empty()) {
        return 0;
    }
    return std::max(0L, m->rbegin()->first + 1);
}

long minimal_pole_order(const VertexStructure& s, const std::string& u, const std::string& v)
{
    return minimal_pole_order(s.table(), u, v);
}

std::optional<long> minimal_witness(const VertexStructure& s, Axiom axiom, const std::string& u,
                                    const std::string& v, const std::string& w)
{
    Action a{s, s.table(), s.basis()};
    auto sides = weak_sides(a, axiom, u, v, w);
    if (sides.lhs != sides.rhs) {
        return std::nullopt;
    }
    return sides.m;
}

bool witness_valid(const VertexStructure& s, Axiom axiom, const std::string& u, const std::string& v,
                   const std::string& w, long m)
{
    auto kind = axiom == Axiom::weak_comm    ? elemprop::WitnessKind::M1
                : axiom == Axiom::weak_assoc ? elemprop::WitnessKind::M2
                                             : elemprop::WitnessKind::M3;
    if (axiom != Axiom::weak_comm && axiom != Axiom::weak_assoc && axiom != Axiom::weak_skew_assoc) {
        throw DomainError(to_string(axiom) + " is not a weak property");
    }
    auto t = jacobi_triple(s, s.table(), u, v, w);
    return elemprop::pole_clears(t, kind, m, jacobi_window(s.table(), s.table())).holds;
}

// Axioms ---------------------------------------------------------------------------

namespace {

const std::vector<std::pair<Axiom, std::string>>& axiom_names()
{
    static const std::vector<std::pair<Axiom, std::string>> names{
        {Axiom::jacobi, "jacobi"},
        {Axiom::weak_comm, "weak_comm"},
        {Axiom::weak_assoc, "weak_assoc"},
        {Axiom::weak_skew_assoc, "weak_skew_assoc"},
        {Axiom::vf_skew_symmetry, "vf_skew_symmetry"},
        {Axiom::skew_symmetry, "skew_symmetry"},
        {Axiom::d_derivative, "d_derivative"},
        {Axiom::d_bracket, "d_bracket"},
        {Axiom::vacuum_prop, "vacuum_prop"},
        {Axiom::creation_prop, "creation_prop"},
        {Axiom::strong_creation, "strong_creation"},
        {Axiom::injectivity, "injectivity"},
    };
    return names;
}

} // namespace

std::string to_string(Axiom a)
{
    for (const auto& [x, name] : axiom_names()) {
        if (x == a) {
            return name;
        }
    }
    return "?";
}

Axiom parse_axiom(const std::string& s)
{
    for (const auto& [x, name] : axiom_names()) {
        if (name == s) {
            return x;
        }
    }
    throw ConfigError("unknown axiom '" + s + "'");
}

const std::vector<Axiom>& all_axioms()
{
    static const std::vector<Axiom> all = [] {
        std::vector<Axiom> v;
        for (const auto& [x, name] : axiom_names()) {
            v.push_back(x);
        }
        return v;
    }();
    return all;
}

bool needs_vacuum(Axiom a)
{
    switch (a) {
    case Axiom::skew_symmetry:
    case Axiom::d_derivative:
    case Axiom::d_bracket:
    case Axiom::vacuum_prop:
    case Axiom::creation_prop:
    case Axiom::strong_creation:
        return true;
    default:
        return false;
    }
}

std::string anchor(Axiom a)
{
    switch (a) {
    case Axiom::jacobi:
        return "x0^-1 delta((x1-x2)/x0) Y(u,x1)Y(v,x2) - x0^-1 delta((-x2+x1)/x0) Y(v,x2)Y(u,x1) = "
               "x1^-1 delta((x2+x0)/x1) Y(Y(u,x0)v,x2)";
    case Axiom::weak_comm:
        return "(x1-x2)^m (Y(u,x1)Y(v,x2) - Y(v,x2)Y(u,x1)) = 0";
    case Axiom::weak_assoc:
        return "(x0+x2)^m (Y(u,x0+x2)Y(v,x2)w - Y(Y(u,x0)v,x2)w) = 0";
    case Axiom::weak_skew_assoc:
        return "(x1-x0)^m (Y(v,-x0+x1)Y(u,x1)w - Y(Y(u,x0)v,x1-x0)w) = 0";
    case Axiom::vf_skew_symmetry:
        return "Y(Y(u,x0)v,x2) = Y(Y(v,-x0)u,x2+x0)";
    case Axiom::skew_symmetry:
        return "Y(u,x)v = e^{xD} Y(v,-x)u";
    case Axiom::d_derivative:
        return "Y(Du,x) = d/dx Y(u,x)";
    case Axiom::d_bracket:
        return "[D, Y(u,x)] = d/dx Y(u,x)";
    case Axiom::vacuum_prop:
        return "Y(1,x) = 1";
    case Axiom::creation_prop:
        return "Y(u,x)1 in V[[x]], Y(u,0)1 = u";
    case Axiom::strong_creation:
        return "Y(u,x)1 = e^{xD} u";
    case Axiom::injectivity:
        return "v -> Y(v,x) is injective";
    }
    return "";
}

std::string to_string(Status s)
{
    switch (s) {
    case Status::Pass:
        return "PASS";
    case Status::Fail:
        return "FAIL";
    case Status::NotApplicable:
        return "N/A";
    }
    return "?";
}

long jacobi_window(const ModeTable& algebra, const ModeTable& action)
{
    long pole = std::max(algebra.max_pole(), action.max_pole());
    long degree = std::max(algebra.max_degree(), action.max_degree());
    return 2 * pole + 2 + degree;
}

elemprop::TripleInstance jacobi_triple(const VertexStructure& algebra, const ModeTable& action, const std::string& u,
                                       const std::string& v, const std::string& w)
{
    elemprop::TripleInstance t;
    t.f = poly2_series(compose(action, vec(u), vec(v), vec(w)), "y1", "y2");
    t.g = poly2_series(compose(action, vec(v), vec(u), vec(w)), "y1", "y2");
    t.h = poly2_series(iterate(algebra.table(), action, vec(u), vec(v), vec(w)), "y1", "y2");
    return t;
}

PropertyReport check_action(const VertexStructure& algebra, const ModeTable& action,
                            const std::vector<std::string>& space, Axiom axiom, const CheckParams& params)
{
    Action a{algebra, action, space};
    switch (axiom) {
    case Axiom::jacobi:
        return check_jacobi(a, params);
    case Axiom::weak_comm:
    case Axiom::weak_assoc:
    case Axiom::weak_skew_assoc:
        return check_weak(a, axiom, params);
    case Axiom::vf_skew_symmetry:
        return check_vf_skew(a);
    case Axiom::vacuum_prop:
        return check_vacuum_prop(a);
    case Axiom::d_derivative:
        return check_d_derivative(a);
    default:
        throw DomainError(to_string(axiom) + " is not an axiom of an action");
    }
}

PropertyReport check_axiom(const VertexStructure& s, Axiom axiom, const CheckParams& params)
{
    switch (axiom) {
    case Axiom::skew_symmetry:
        return check_skew(s);
    case Axiom::d_bracket:
        return check_d_bracket(s);
    case Axiom::creation_prop:
        return check_creation(s);
    case Axiom::strong_creation:
        return check_strong_creation(s);
    case Axiom::injectivity:
        return check_injectivity(s);
    default:
        return check_action(s, s.table(), s.basis(), axiom, params);
    }
}

std::vector<PropertyReport> check_all(const VertexStructure& s, const CheckParams& params)
{
    std::vector<PropertyReport> out;
    for (Axiom a : all_axioms()) {
        if (needs_vacuum(a) && !s.has_vacuum()) {
            auto r = base_report(a);
            r.status = Status::NotApplicable;
            r.detail = "no vacuum vector";
            out.push_back(r);
            continue;
        }
        out.push_back(check_axiom(s, a, params));
    }
    return out;
}

// Corpus -------------------------------------------------------------------------------

namespace {

CorpusEntry mutant(const std::string& name, long k, std::vector<Axiom> breaks, const std::string& u, long n,
                   const std::string& v, const VectorCoeff& c)
{
    auto base = borcherds_family(k);
    ModeTable t = base.table();
    t.set(u, n, v, c);
    return CorpusEntry{name, VertexStructure(base.basis(), t, std::string("1")), {"mutant"}, std::move(breaks)};
}

} // namespace

std::vector<CorpusEntry> curated_mutants()
{
    using A = Axiom;
    return {
        mutant("jacobi-break-1", 3, {A::jacobi, A::weak_comm}, "t", 0, "t", vec("t2")),
        mutant("jacobi-break-2", 4, {A::jacobi, A::weak_comm}, "t", -1, "t2", VectorCoeff{{"t3", 2}}),
        mutant("jacobi-break-3", 4, {A::jacobi, A::skew_symmetry}, "t", -2, "t", VectorCoeff{}),
        mutant("vacuum-break-1", 3, {A::vacuum_prop}, "1", -2, "t", vec("t2")),
        mutant("creation-break-1", 3, {A::creation_prop}, "t", -1, "1", VectorCoeff{{"t", 2}}),
        mutant("creation-break-2", 4, {A::creation_prop}, "t2", 0, "1", vec("t3")),
        mutant("dder-break-1", 4, {A::d_derivative, A::strong_creation}, "t2", -2, "1", VectorCoeff{}),
        mutant("injectivity-break-1", 4, {A::injectivity}, "t3", -1, "1", VectorCoeff{}),
        mutant("strong-creation-break-1", 4, {A::strong_creation}, "t", -3, "1", VectorCoeff{{"t3", 2}}),
        mutant("dbracket-break-1", 3, {A::d_bracket}, "t", -2, "t", vec("t2")),
    };
}

std::vector<CorpusEntry> builtin_corpus()
{
    std::vector<CorpusEntry> out;
    for (long k = 2; k <= 5; ++k) {
        out.push_back({"borcherds-k" + std::to_string(k), borcherds_family(k, true), {"valid"}, {}});
    }
    for (long k = 2; k <= 5; ++k) {
        out.push_back({"borcherds-ideal-k" + std::to_string(k), borcherds_family(k, false), {"valid", "vacuum-free"}, {}});
    }
    for (auto& m : curated_mutants()) {
        out.push_back(std::move(m));
    }
    return out;
}

const std::vector<ImplicationRow>& implication_rows()
{
    using A = Axiom;
    static const std::vector<A> minor{A::injectivity, A::vacuum_prop, A::creation_prop};
    auto with_minor = [](std::vector<A> extra) {
        std::vector<A> p = minor;
        p.insert(p.end(), extra.begin(), extra.end());
        return p;
    };
    static const std::vector<ImplicationRow> rows{
        {"wc+wa=>jacobi", "weak_comm, weak_assoc => jacobi", {A::weak_comm, A::weak_assoc}, {A::jacobi}},
        {"wc+wsa=>jacobi", "weak_comm, weak_skew_assoc => jacobi", {A::weak_comm, A::weak_skew_assoc}, {A::jacobi}},
        {"wa+wsa=>jacobi", "weak_assoc, weak_skew_assoc => jacobi", {A::weak_assoc, A::weak_skew_assoc}, {A::jacobi}},
        {"jacobi=>weak", "jacobi => weak_comm, weak_assoc, weak_skew_assoc", {A::jacobi},
         {A::weak_comm, A::weak_assoc, A::weak_skew_assoc}},
        {"jacobi=>vfss", "jacobi => Y(Y(u,x0)v,x2) = Y(Y(v,-x0)u,x2+x0)", {A::jacobi}, {A::vf_skew_symmetry}},
        {"wa+vfss=>jacobi", "weak_assoc, vf_skew_symmetry => jacobi", {A::weak_assoc, A::vf_skew_symmetry},
         {A::jacobi}},
        {"wsa+vfss=>jacobi", "weak_skew_assoc, vf_skew_symmetry => jacobi",
         {A::weak_skew_assoc, A::vf_skew_symmetry}, {A::jacobi}},
        {"wc+vfss+inj=>jacobi", "weak_comm, vf_skew_symmetry, injectivity => jacobi",
         {A::weak_comm, A::vf_skew_symmetry, A::injectivity}, {A::jacobi}},
        {"vfss+creation=>vacuum", "vf_skew_symmetry, injectivity, Y(u,x)1 in V[[x]], u_{-1}1 = u => Y(1,x) = 1",
         {A::vf_skew_symmetry, A::injectivity, A::creation_prop}, {A::vacuum_prop}},
        {"vfss+vacuum=>creation", "vf_skew_symmetry, injectivity, Y(1,x) = 1 => Y(u,x)1 in V[[x]], u_{-1}1 = u",
         {A::vf_skew_symmetry, A::injectivity, A::vacuum_prop}, {A::creation_prop}},
        {"vfss+vacuum=>minor-properties", "vf_skew_symmetry, injectivity, vacuum => strong creation, skew, D-derivative, D-bracket",
         {A::vf_skew_symmetry, A::injectivity, A::vacuum_prop},
         {A::strong_creation, A::skew_symmetry, A::d_derivative, A::d_bracket}},
        {"minor+vfss=>skew+dder+dbracket", "minor axioms, vf_skew_symmetry => skew, D-derivative, D-bracket",
         with_minor({A::vf_skew_symmetry}), {A::skew_symmetry, A::d_derivative, A::d_bracket}},
        {"minor+skew+dder=>vfss", "minor axioms, skew, D-derivative => vf_skew_symmetry",
         with_minor({A::skew_symmetry, A::d_derivative}), {A::vf_skew_symmetry}},
        {"minor+skew+dbracket=>vfss", "minor axioms, skew, D-bracket => vf_skew_symmetry",
         with_minor({A::skew_symmetry, A::d_bracket}), {A::vf_skew_symmetry}},
        {"minor+skew=>strong", "minor axioms, Y(u,x)v = e^{xD}Y(v,-x)u => Y(u,x)1 = e^{xD}u",
         with_minor({A::skew_symmetry}), {A::strong_creation}},
        {"minor+dbracket=>strong", "minor axioms, [D,Y(u,x)] = d/dx Y(u,x) => Y(u,x)1 = e^{xD}u",
         with_minor({A::d_bracket}), {A::strong_creation}},
        {"minor+dder=>strong", "minor axioms, Y(Du,x) = d/dx Y(u,x) => Y(u,x)1 = e^{xD}u",
         with_minor({A::d_derivative}), {A::strong_creation}},
        {"minor+wc+dbracket=>skew", "minor axioms, weak_comm, D-bracket => skew",
         with_minor({A::weak_comm, A::d_bracket}), {A::skew_symmetry}},
        {"minor+wc+dbracket=>jacobi", "minor axioms, weak_comm, D-bracket => jacobi",
         with_minor({A::weak_comm, A::d_bracket}), {A::jacobi}},
        {"minor+wa=>dder", "minor axioms, weak_assoc => Y(Du,x) = d/dx Y(u,x)", with_minor({A::weak_assoc}),
         {A::d_derivative}},
        {"minor+wa+strong=>dbracket", "minor axioms, weak_assoc, Y(u,x)1 = e^{xD}u => D-bracket",
         with_minor({A::weak_assoc, A::strong_creation}), {A::d_bracket}},
        {"minor+wa+skew=>jacobi", "minor axioms, weak_assoc, skew => jacobi",
         with_minor({A::weak_assoc, A::skew_symmetry}), {A::jacobi}},
        {"minor+jacobi=>wa+wc+skew+dbracket", "minor axioms, jacobi => weak_assoc, weak_comm, skew, D-bracket",
         with_minor({A::jacobi}), {A::weak_assoc, A::weak_comm, A::skew_symmetry, A::d_bracket}},
        {"minor+wsa=>dder", "minor axioms, weak_skew_assoc => Y(Du,x) = d/dx Y(u,x)",
         with_minor({A::weak_skew_assoc}), {A::d_derivative}},
        {"minor+wsa+skew=>dbracket", "minor axioms, weak_skew_assoc, skew => D-bracket",
         with_minor({A::weak_skew_assoc, A::skew_symmetry}), {A::d_bracket}},
        {"minor+wsa+dbracket=>skew", "minor axioms, weak_skew_assoc, D-bracket => skew",
         with_minor({A::weak_skew_assoc, A::d_bracket}), {A::skew_symmetry}},
        {"minor+wsa+skew=>jacobi", "minor axioms, weak_skew_assoc, skew => jacobi",
         with_minor({A::weak_skew_assoc, A::skew_symmetry}), {A::jacobi}},
        {"minor+wsa+dbracket=>jacobi", "minor axioms, weak_skew_assoc, D-bracket => jacobi",
         with_minor({A::weak_skew_assoc, A::d_bracket}), {A::jacobi}},
        {"minor+jacobi=>wsa", "minor axioms, jacobi => weak_skew_assoc", with_minor({A::jacobi}),
         {A::weak_skew_assoc}},
    };
    return rows;
}

bool MatrixReport::consistent() const
{
    return std::all_of(rows.begin(), rows.end(), [](const RowOutcome& r) { return r.violations.empty(); });
}

MatrixReport implication_matrix(const std::vector<CorpusEntry>& corpus, const CheckParams& params)
{
    MatrixReport out;
    std::vector<std::map<Axiom, Status>> verdicts;
    for (const auto& e : corpus) {
        MemberOutcome m;
        m.name = e.name;
        m.reports = check_all(e.structure, params);
        std::map<Axiom, Status> v;
        for (std::size_t i = 0; i < all_axioms().size(); ++i) {
            v[all_axioms()[i]] = m.reports[i].status;
        }
        if (!e.breaks.empty()) {
            bool confirmed = false;
            for (Axiom b : e.breaks) {
                const auto& r = m.reports[static_cast<std::size_t>(
                    std::find(all_axioms().begin(), all_axioms().end(), b) - all_axioms().begin())];
                confirmed = confirmed || (r.status == Status::Fail && r.counterexample.has_value());
            }
            m.break_confirmed = confirmed;
        }
        verdicts.push_back(std::move(v));
        out.members.push_back(std::move(m));
    }
    for (const auto& row : implication_rows()) {
        RowOutcome ro;
        ro.id = row.id;
        ro.anchor = row.anchor;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& v = verdicts[i];
            auto applicable = [&](Axiom a) { return v.at(a) != Status::NotApplicable; };
            if (!std::all_of(row.premises.begin(), row.premises.end(), applicable) ||
                !std::all_of(row.conclusions.begin(), row.conclusions.end(), applicable)) {
                continue;
            }
            bool premises = std::all_of(row.premises.begin(), row.premises.end(),
                                        [&](Axiom a) { return v.at(a) == Status::Pass; });
            if (!premises) {
                continue;
            }
            ro.tested.push_back(corpus[i].name);
            for (Axiom c : row.conclusions) {
                if (v.at(c) != Status::Pass) {
                    ro.violations.push_back(corpus[i].name + ": " + to_string(c) + " fails");
                }
            }
        }
        ro.verdict = !ro.violations.empty() ? "VIOLATION" : ro.tested.empty() ? "UNTESTED" : "PASS";
        out.rows.push_back(std::move(ro));
    }
    return out;
}

// Serialization ----------------------------------------------------------------------

json to_json(const ModeTable& t, const std::string& right_key)
{
    json modes = json::array();
    for (const auto& [k, m] : t.entries()) {
        for (const auto& [n, c] : m) {
            modes.push_back({{"u", k.first}, {"n", n}, {right_key, k.second}, {"coeff", vector_json(c)}});
        }
    }
    return modes;
}

ModeTable table_from_json(const json& modes, const std::string& right_key)
{
    if (!modes.is_array()) {
        throw ConfigError("modes must be an array");
    }
    ModeTable t;
    for (const auto& m : modes) {
        if (!m.contains("u") || !m.contains("n") || !m.contains(right_key) || !m.contains("coeff")) {
            throw ConfigError("mode record needs u, n, " + right_key + ", coeff");
        }
        if (!m["n"].is_number_integer()) {
            throw ConfigError("mode index n must be an integer");
        }
        t.add(m["u"].get<std::string>(), m["n"].get<long>(), m[right_key].get<std::string>(),
              vector_from_json(m["coeff"]));
    }
    return t;
}

json to_json(const VertexStructure& s)
{
    json j{{"basis", s.basis()}, {"modes", to_json(s.table(), "v")}};
    if (s.vacuum()) {
        j["vacuum"] = s.vacuum()->one;
    }
    return j;
}

VertexStructure structure_from_json(const json& j)
{
    try {
        if (!j.is_object() || !j.contains("basis") || !j.contains("modes")) {
            throw ConfigError("structure config needs basis and modes");
        }
        std::optional<std::string> vacuum;
        if (j.contains("vacuum") && !j["vacuum"].is_null()) {
            vacuum = j["vacuum"].get<std::string>();
        }
        return VertexStructure(j["basis"].get<std::vector<std::string>>(), table_from_json(j["modes"], "v"), vacuum);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed structure config: ") + e.what());
    }
}

json to_json(const CorpusEntry& e)
{
    json j = to_json(e.structure);
    j["name"] = e.name;
    j["tags"] = e.tags;
    json breaks = json::array();
    for (Axiom a : e.breaks) {
        breaks.push_back(to_string(a));
    }
    j["breaks"] = breaks;
    return j;
}

CorpusEntry entry_from_json(const json& j, const std::string& name)
{
    CorpusEntry e;
    e.structure = structure_from_json(j);
    e.name = j.contains("name") ? j["name"].get<std::string>() : name;
    if (j.contains("tags")) {
        e.tags = j["tags"].get<std::vector<std::string>>();
    }
    if (j.contains("breaks")) {
        for (const auto& b : j["breaks"]) {
            e.breaks.push_back(parse_axiom(b.get<std::string>()));
        }
    }
    return e;
}

CorpusEntry load_entry(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return entry_from_json(j, path.stem().string());
}

json to_json(const PropertyReport& r)
{
    json j{{"id", r.axiom}, {"anchor", r.anchor}, {"verdict", to_string(r.status)}, {"window", r.window}};
    json w = nullptr;
    if (r.counterexample) {
        json mono = json::object();
        for (const auto& [v, e] : r.counterexample->monomial) {
            mono[v] = e;
        }
        w = {{"vectors", r.counterexample->vectors},
             {"monomial", mono},
             {"value", vector_json(r.counterexample->value)}};
    } else if (r.witness) {
        w = {{"m", *r.witness}};
    }
    j["witness"] = w;
    j["detail"] = r.detail;
    return j;
}

json to_json(const MatrixReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"id", row.id},
                        {"anchor", row.anchor},
                        {"verdict", row.verdict},
                        {"tested", row.tested},
                        {"violations", row.violations}});
    }
    json members = json::array();
    for (const auto& m : r.members) {
        json reports = json::array();
        for (const auto& p : m.reports) {
            reports.push_back(to_json(p));
        }
        json mj{{"name", m.name}, {"reports", reports}};
        mj["break_confirmed"] = m.break_confirmed ? json(*m.break_confirmed) : json(nullptr);
        members.push_back(mj);
    }
    return {{"rows", rows}, {"members", members}, {"consistent", r.consistent()}};
}

std::string to_string(const Poly1& p, const std::string& x)
{
    if (p.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& [e, c] : p) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "(" + vfva::to_string(c) + ")";
        if (e != 0) {
            out += " " + x + "^" + std::to_string(e);
        }
    }
    return out;
}

} // namespace vfva::valg
