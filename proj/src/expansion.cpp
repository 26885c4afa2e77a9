#include "vfva/expansion.hpp"

#include "vfva/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

namespace vfva::expansion {

namespace {

int parity_sign(long n)
{
    return (n % 2 == 0) ? 1 : -1;
}

// Removes one +v/-v pair at a time until none is left, then sorts.
void cancel_and_sort(std::vector<SignedVar>& sum)
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < sum.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < sum.size(); ++j) {
                if (sum[i].var == sum[j].var && sum[i].sign == -sum[j].sign) {
                    sum.erase(sum.begin() + static_cast<long>(j));
                    sum.erase(sum.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
        }
    }
    std::sort(sum.begin(), sum.end());
}

void strip_zero_exponents(Monomial& m)
{
    std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
}

} // namespace

std::string to_string(const SignedVar& s)
{
    return (s.sign < 0 ? "-" : "+") + s.var;
}

SignedVar parse_signed_var(const std::string& text)
{
    if (text.empty()) {
        throw ConfigError("empty signed variable");
    }
    if (text[0] == '+' || text[0] == '-') {
        if (text.size() == 1) {
            throw ConfigError("signed variable without a name");
        }
        return SignedVar{text.substr(1), text[0] == '-' ? -1 : 1};
    }
    return SignedVar{text, 1};
}

SignedVar operator-(SignedVar s)
{
    s.sign = -s.sign;
    return s;
}

bool ExpansionAtom::inert() const
{
    return std::any_of(tail.begin(), tail.end(), [&](const SignedVar& t) { return t.var == head.var; });
}

ExpansionAtom make_atom(std::vector<SignedVar> sum, long exp)
{
    if (sum.empty()) {
        throw DomainError("atom needs at least one summand");
    }
    ExpansionAtom a;
    a.head = sum.front();
    a.tail.assign(sum.begin() + 1, sum.end());
    a.exp = exp;
    cancel_and_sort(a.tail);
    return a;
}

DeltaAtom make_delta(std::vector<SignedVar> numerator, std::string denominator)
{
    if (numerator.empty()) {
        throw DomainError("delta numerator must be nonempty");
    }
    for (const auto& s : numerator) {
        if (s.var == denominator) {
            throw DomainError("delta denominator " + denominator + " occurs in its numerator");
        }
    }
    std::vector<SignedVar> rest(numerator.begin() + 1, numerator.end());
    cancel_and_sort(rest);
    DeltaAtom d;
    d.numerator.push_back(numerator.front());
    d.numerator.insert(d.numerator.end(), rest.begin(), rest.end());
    d.denominator = std::move(denominator);
    return d;
}

std::strong_ordering compare_key(const DeltaTerm& a, const DeltaTerm& b)
{
    if (auto c = a.monomial <=> b.monomial; c != 0) {
        return c;
    }
    if (auto c = a.delta <=> b.delta; c != 0) {
        return c;
    }
    return a.atoms <=> b.atoms;
}

bool same_key(const DeltaTerm& a, const DeltaTerm& b)
{
    return compare_key(a, b) == 0;
}

const std::vector<std::string>& default_universe()
{
    static const std::vector<std::string> u{"x0", "x1", "x2"};
    return u;
}

// DeltaExpr -------------------------------------------------------------------

DeltaExpr::DeltaExpr(std::vector<std::string> universe, std::vector<DeltaTerm> terms)
    : universe_(std::move(universe))
{
    for (auto& t : terms) {
        push(std::move(t));
    }
}

DeltaExpr DeltaExpr::constant(const Rational& c, std::vector<std::string> universe)
{
    DeltaExpr e(std::move(universe));
    e.push(DeltaTerm{c, {}, std::nullopt, {}});
    return e;
}

DeltaExpr DeltaExpr::monomial(const Monomial& m, const Rational& c, std::vector<std::string> universe)
{
    DeltaExpr e(std::move(universe));
    e.push(DeltaTerm{c, m, std::nullopt, {}});
    return e;
}

DeltaExpr DeltaExpr::atom(const ExpansionAtom& a, const Rational& c, std::vector<std::string> universe)
{
    DeltaExpr e(std::move(universe));
    e.push(DeltaTerm{c, {}, std::nullopt, {a}});
    return e;
}

DeltaExpr DeltaExpr::delta(const DeltaAtom& d, const Rational& c, std::vector<std::string> universe)
{
    DeltaExpr e(std::move(universe));
    e.push(DeltaTerm{c, {}, d, {}});
    return e;
}

void DeltaExpr::check_vars(const DeltaTerm& t) const
{
    auto known = [&](const std::string& v) {
        if (std::find(universe_.begin(), universe_.end(), v) == universe_.end()) {
            throw DomainError("variable '" + v + "' is outside the expression universe");
        }
    };
    for (const auto& [v, e] : t.monomial) {
        known(v);
    }
    if (t.delta) {
        known(t.delta->denominator);
        for (const auto& s : t.delta->numerator) {
            known(s.var);
        }
    }
    for (const auto& a : t.atoms) {
        known(a.head.var);
        for (const auto& s : a.tail) {
            known(s.var);
        }
    }
}

void DeltaExpr::push(DeltaTerm t)
{
    if (t.coeff == 0) {
        return;
    }
    check_vars(t);
    strip_zero_exponents(t.monomial);
    terms_.push_back(std::move(t));
}

DeltaExpr DeltaExpr::with_universe(std::vector<std::string> extra) const
{
    DeltaExpr out = *this;
    for (auto& v : extra) {
        if (std::find(out.universe_.begin(), out.universe_.end(), v) == out.universe_.end()) {
            out.universe_.push_back(std::move(v));
        }
    }
    return out;
}

DeltaExpr& DeltaExpr::operator+=(const DeltaExpr& o)
{
    for (const auto& v : o.universe_) {
        if (std::find(universe_.begin(), universe_.end(), v) == universe_.end()) {
            universe_.push_back(v);
        }
    }
    for (const auto& t : o.terms_) {
        push(t);
    }
    return *this;
}

DeltaExpr& DeltaExpr::operator-=(const DeltaExpr& o)
{
    return *this += Rational(-1) * o;
}

DeltaExpr& DeltaExpr::operator*=(const Rational& c)
{
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) {
        t.coeff *= c;
    }
    return *this;
}

DeltaExpr DeltaExpr::operator*(const DeltaExpr& o) const
{
    DeltaExpr out = DeltaExpr(universe_).with_universe(o.universe_);
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) {
            if (a.delta && b.delta) {
                throw SummabilityUnknown("product of two delta factors is not certified summable");
            }
            DeltaTerm t;
            t.coeff = a.coeff * b.coeff;
            t.monomial = a.monomial;
            for (const auto& [v, e] : b.monomial) {
                t.monomial[v] += e;
            }
            t.delta = a.delta ? a.delta : b.delta;
            t.atoms = a.atoms;
            t.atoms.insert(t.atoms.end(), b.atoms.begin(), b.atoms.end());
            out.push(std::move(t));
        }
    }
    return out;
}

// Rewrites --------------------------------------------------------------------

DeltaExpr delta_to_atoms(const DeltaAtom& d, std::vector<std::string> universe)
{
    std::vector<SignedVar> first = d.numerator;
    first.push_back(SignedVar{d.denominator, -1});
    std::vector<SignedVar> second{SignedVar{d.denominator, 1}};
    for (const auto& s : d.numerator) {
        second.push_back(-s);
    }
    DeltaExpr out(std::move(universe));
    out.push(DeltaTerm{1, {}, std::nullopt, {make_atom(first, -1)}});
    out.push(DeltaTerm{1, {}, std::nullopt, {make_atom(second, -1)}});
    return out;
}

DeltaExpr expand_deltas(const DeltaExpr& e)
{
    DeltaExpr out(e.universe());
    for (const auto& t : e.terms()) {
        if (!t.delta) {
            out.push(t);
            continue;
        }
        DeltaExpr images = delta_to_atoms(*t.delta, e.universe());
        for (const auto& image : images.terms()) {
            DeltaTerm nt = t;
            nt.delta.reset();
            nt.atoms.insert(nt.atoms.begin(), image.atoms.begin(), image.atoms.end());
            out.push(std::move(nt));
        }
    }
    return out;
}

DeltaExpr taylor_shift(const DeltaExpr& e, const std::string& var, const SignedVar& shift)
{
    if (shift.var == var) {
        throw DomainError("taylor_shift: shift variable must differ from the shifted variable");
    }
    const auto& u = e.universe();
    if (std::find(u.begin(), u.end(), shift.var) == u.end()) {
        throw DomainError("taylor_shift: '" + shift.var + "' is outside the universe; extend it first");
    }
    DeltaExpr out(e.universe());
    for (const auto& t : e.terms()) {
        DeltaTerm nt = t;
        if (nt.delta) {
            if (nt.delta->denominator == var) {
                throw UnsupportedRewrite("taylor_shift: cannot shift the delta denominator " + var +
                                         "; shift its atom image instead");
            }
            std::vector<SignedVar> num = nt.delta->numerator;
            for (const auto& s : nt.delta->numerator) {
                if (s.var == var) {
                    num.push_back(SignedVar{shift.var, s.sign * shift.sign});
                }
            }
            nt.delta = make_delta(num, nt.delta->denominator);
        }
        for (auto& a : nt.atoms) {
            std::vector<SignedVar> sum{a.head};
            sum.insert(sum.end(), a.tail.begin(), a.tail.end());
            std::vector<SignedVar> added;
            for (const auto& s : sum) {
                if (s.var == var) {
                    added.push_back(SignedVar{shift.var, s.sign * shift.sign});
                }
            }
            sum.insert(sum.end(), added.begin(), added.end());
            a = make_atom(sum, a.exp);
        }
        if (auto it = nt.monomial.find(var); it != nt.monomial.end()) {
            long n = it->second;
            nt.monomial.erase(it);
            nt.atoms.push_back(make_atom({SignedVar{var, 1}, shift}, n));
        }
        out.push(std::move(nt));
    }
    return normalize(out);
}

DeltaTerm canonicalize_term(const DeltaTerm& t)
{
    DeltaTerm out;
    out.coeff = t.coeff;
    out.monomial = t.monomial;
    if (t.delta) {
        out.delta = make_delta(t.delta->numerator, t.delta->denominator);
    }
    std::vector<ExpansionAtom> atoms;
    for (ExpansionAtom a : t.atoms) {
        if (a.head.sign < 0) {
            // (-h + T)^n = (-1)^n (h - T)^n
            out.coeff *= parity_sign(a.exp);
            a.head.sign = 1;
            for (auto& s : a.tail) {
                s.sign = -s.sign;
            }
        }
        cancel_and_sort(a.tail);
        if (a.exp == 0) {
            continue;
        }
        if (a.tail.empty()) {
            out.monomial[a.head.var] += a.exp;
            continue;
        }
        atoms.push_back(std::move(a));
    }
    std::sort(atoms.begin(), atoms.end());
    // Same-direction expansions of one base multiply by adding exponents.
    for (auto& a : atoms) {
        if (!out.atoms.empty() && !a.inert() && out.atoms.back().head == a.head && out.atoms.back().tail == a.tail) {
            out.atoms.back().exp += a.exp;
            if (out.atoms.back().exp == 0) {
                out.atoms.pop_back();
            }
            continue;
        }
        out.atoms.push_back(std::move(a));
    }
    strip_zero_exponents(out.monomial);
    return out;
}

DeltaExpr normalize(const DeltaExpr& e)
{
    std::vector<DeltaTerm> terms;
    terms.reserve(e.terms().size());
    for (const auto& t : e.terms()) {
        terms.push_back(canonicalize_term(t));
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const DeltaTerm& a, const DeltaTerm& b) { return compare_key(a, b) < 0; });
    DeltaExpr out(e.universe());
    std::vector<DeltaTerm> merged;
    for (auto& t : terms) {
        if (!merged.empty() && same_key(merged.back(), t)) {
            merged.back().coeff += t.coeff;
            continue;
        }
        merged.push_back(std::move(t));
    }
    for (auto& t : merged) {
        out.push(std::move(t));
    }
    return out;
}

DeltaExpr delta_substitute(const DeltaExpr& e, SubstitutionDirection dir)
{
    DeltaExpr out(e.universe());
    for (const auto& raw : e.terms()) {
        DeltaTerm t = canonicalize_term(raw);
        if (!t.delta) {
            out.push(std::move(t));
            continue;
        }
        const DeltaAtom& d = *t.delta;
        ExpansionAtom num_atom = make_atom(d.numerator, 1);
        std::set<std::string> num_vars;
        for (const auto& s : d.numerator) {
            num_vars.insert(s.var);
        }
        DeltaTerm nt = t;
        nt.atoms.clear();
        if (dir == SubstitutionDirection::NumeratorToDenominator) {
            for (const auto& a : t.atoms) {
                // Compare against the numerator in canonical (positive head) form.
                DeltaTerm probe{1, {}, std::nullopt, {num_atom}};
                ExpansionAtom num_canon = num_atom;
                Rational sign = 1;
                if (num_canon.head.sign < 0) {
                    num_canon.head.sign = 1;
                    for (auto& s : num_canon.tail) {
                        s.sign = -s.sign;
                    }
                    std::sort(num_canon.tail.begin(), num_canon.tail.end());
                    sign = -1;
                }
                if (a.head == num_canon.head && a.tail == num_canon.tail) {
                    // a = (sign * s)^n = sign^n s^n -> sign^n x^n
                    if (sign < 0) {
                        nt.coeff *= parity_sign(a.exp);
                    }
                    nt.monomial[d.denominator] += a.exp;
                    continue;
                }
                std::set<std::string> atom_vars{a.head.var};
                for (const auto& s : a.tail) {
                    atom_vars.insert(s.var);
                }
                if (atom_vars == num_vars) {
                    throw SubstitutionRefused("atom " + to_string(a) + " expands " + to_string(d) +
                                              "'s numerator in a different direction");
                }
                nt.atoms.push_back(a);
            }
        } else {
            for (const auto& a : t.atoms) {
                bool mentions = a.head.var == d.denominator ||
                                std::any_of(a.tail.begin(), a.tail.end(),
                                            [&](const SignedVar& s) { return s.var == d.denominator; });
                if (mentions) {
                    throw SubstitutionRefused("atom " + to_string(a) + " involves the delta denominator " +
                                              d.denominator + "; the substitution limit is not certified");
                }
                nt.atoms.push_back(a);
            }
            if (auto it = nt.monomial.find(d.denominator); it != nt.monomial.end()) {
                long n = it->second;
                nt.monomial.erase(it);
                nt.atoms.push_back(make_atom(d.numerator, n));
            }
        }
        out.push(std::move(nt));
    }
    return normalize(out);
}

DeltaExpr residue(const DeltaExpr& e, const std::string& var)
{
    DeltaExpr out(e.universe());
    for (const auto& raw : e.terms()) {
        DeltaTerm t = canonicalize_term(raw);
        long mv = 0;
        if (auto it = t.monomial.find(var); it != t.monomial.end()) {
            mv = it->second;
            t.monomial.erase(it);
        }
        std::vector<std::size_t> involved;
        for (std::size_t i = 0; i < t.atoms.size(); ++i) {
            const auto& a = t.atoms[i];
            bool hit = a.head.var == var ||
                       std::any_of(a.tail.begin(), a.tail.end(), [&](const SignedVar& s) { return s.var == var; });
            if (hit) {
                involved.push_back(i);
            }
        }
        if (t.delta) {
            for (const auto& s : t.delta->numerator) {
                if (s.var == var) {
                    throw ResidueRefused("residue in " + var + ": variable occurs in a delta numerator");
                }
            }
            if (t.delta->denominator == var) {
                if (!involved.empty()) {
                    throw ResidueRefused("residue in " + var + ": variable occurs in a delta and in an atom");
                }
                // x^{mv} x^{-1} delta(s/x) has x^{-1} coefficient s^{mv}.
                ExpansionAtom s = make_atom(t.delta->numerator, mv);
                t.delta.reset();
                t.atoms.push_back(s);
                out.push(std::move(t));
                continue;
            }
        }
        if (involved.empty()) {
            if (mv == -1) {
                out.push(std::move(t));
            }
            continue;
        }
        if (involved.size() > 1) {
            throw ResidueRefused("residue in " + var + ": variable occurs in several atoms of one term");
        }
        ExpansionAtom a = t.atoms[involved.front()];
        t.atoms.erase(t.atoms.begin() + static_cast<long>(involved.front()));
        if (a.inert()) {
            throw ResidueRefused("residue in " + var + ": atom " + to_string(a) + " has no finite coefficients");
        }
        if (a.head.var == var) {
            long k = a.exp + mv + 1;
            if (k < 0) {
                continue;
            }
            t.coeff *= binom(a.exp, k);
            t.coeff *= a.head.sign < 0 ? parity_sign(a.exp - k) : 1;
            if (k > 0) {
                t.atoms.push_back(make_atom(a.tail, k));
            }
        } else {
            long count = std::count_if(a.tail.begin(), a.tail.end(), [&](const SignedVar& s) { return s.var == var; });
            if (count > 1) {
                throw ResidueRefused("residue in " + var + ": variable repeated in an atom tail");
            }
            long k = -1 - mv;
            if (k < 0) {
                continue;
            }
            auto it = std::find_if(a.tail.begin(), a.tail.end(), [&](const SignedVar& s) { return s.var == var; });
            int s = it->sign;
            a.tail.erase(it);
            t.coeff *= binom(a.exp, k);
            t.coeff *= s < 0 ? parity_sign(k) : 1;
            std::vector<SignedVar> sum{a.head};
            sum.insert(sum.end(), a.tail.begin(), a.tail.end());
            t.atoms.push_back(make_atom(sum, a.exp - k));
        }
        out.push(std::move(t));
    }
    return normalize(out);
}

// Window oracle -----------------------------------------------------------------

namespace {

// Enumerates all ways the factors of one term can produce a target monomial.
// Unknowns are the nonnegative tail powers of every atom and the summation
// index of the delta. A variable's exponent equation is solved once every
// atom headed by that variable is fully determined; if no variable can be
// solved the coefficient is not a finite sum.
class TermSolver {
public:
    TermSolver(const DeltaTerm& t, const Monomial& target) : coeff_(t.coeff)
    {
        auto idx = [&](const std::string& v) {
            auto it = std::find(vars_.begin(), vars_.end(), v);
            if (it != vars_.end()) {
                return static_cast<int>(it - vars_.begin());
            }
            vars_.push_back(v);
            return static_cast<int>(vars_.size() - 1);
        };
        for (const auto& [v, e] : t.monomial) {
            idx(v);
        }
        for (const auto& [v, e] : target) {
            idx(v);
        }
        auto add_atom = [&](const SignedVar& head, const std::vector<SignedVar>& tail, long exp, bool free_exp) {
            Atom a;
            a.head = idx(head.var);
            a.hsign = head.sign;
            a.exp = exp;
            a.free_exp = free_exp;
            for (const auto& s : tail) {
                a.kidx.push_back(static_cast<int>(kvar_.size()));
                kvar_.push_back(idx(s.var));
                ksign_.push_back(s.sign);
            }
            atoms_.push_back(std::move(a));
        };
        for (const auto& a : t.atoms) {
            add_atom(a.head, a.tail, a.exp, false);
        }
        if (t.delta) {
            den_ = idx(t.delta->denominator);
            std::vector<SignedVar> rest(t.delta->numerator.begin() + 1, t.delta->numerator.end());
            add_atom(t.delta->numerator.front(), rest, 0, true);
        }
        mono_.assign(vars_.size(), 0);
        target_.assign(vars_.size(), 0);
        for (const auto& [v, e] : t.monomial) {
            mono_[static_cast<std::size_t>(idx(v))] += e;
        }
        for (const auto& [v, e] : target) {
            target_[static_cast<std::size_t>(idx(v))] = e;
        }
        k_.assign(kvar_.size(), 0);
        kset_.assign(kvar_.size(), false);
    }

    Rational solve()
    {
        total_ = 0;
        recurse();
        return total_;
    }

private:
    struct Atom {
        int head = 0;
        int hsign = 1;
        long exp = 0;
        bool free_exp = false;
        std::vector<int> kidx;
    };

    bool atom_ready(const Atom& a) const
    {
        if (a.free_exp && !nset_) {
            return false;
        }
        return std::all_of(a.kidx.begin(), a.kidx.end(), [&](int i) { return kset_[static_cast<std::size_t>(i)]; });
    }

    long atom_exp(const Atom& a) const { return a.free_exp ? n_ : a.exp; }

    long atom_k(const Atom& a) const
    {
        long s = 0;
        for (int i : a.kidx) {
            s += k_[static_cast<std::size_t>(i)];
        }
        return s;
    }

    // Sum of the determined contributions to variable v's exponent.
    long known_part(int v) const
    {
        long s = mono_[static_cast<std::size_t>(v)];
        for (const auto& a : atoms_) {
            if (a.head == v) {
                s += atom_exp(a) - atom_k(a);
            }
        }
        for (std::size_t i = 0; i < kvar_.size(); ++i) {
            if (kvar_[i] == v && kset_[i]) {
                s += k_[i];
            }
        }
        if (den_ == v && nset_) {
            s += -n_ - 1;
        }
        return s;
    }

    void recurse()
    {
        bool pending = false;
        for (int v = 0; v < static_cast<int>(vars_.size()); ++v) {
            bool blocked = false;
            for (const auto& a : atoms_) {
                if (a.head == v && !atom_ready(a)) {
                    blocked = true;
                }
            }
            std::vector<int> open;
            for (std::size_t i = 0; i < kvar_.size(); ++i) {
                if (kvar_[i] == v && !kset_[i]) {
                    open.push_back(static_cast<int>(i));
                }
            }
            bool need_n = den_ == v && !nset_;
            if (open.empty() && !need_n) {
                continue;
            }
            pending = true;
            if (blocked || (need_n && !open.empty())) {
                continue;
            }
            long base = known_part(v);
            long want = target_[static_cast<std::size_t>(v)];
            if (need_n) {
                nset_ = true;
                n_ = base - 1 - want;
                recurse();
                nset_ = false;
                return;
            }
            long rem = want - base;
            if (rem < 0) {
                return;
            }
            distribute(open, 0, rem);
            return;
        }
        if (pending) {
            throw SummabilityUnknown("coefficient is not a certified finite sum (cyclic expansion directions)");
        }
        for (int v = 0; v < static_cast<int>(vars_.size()); ++v) {
            if (known_part(v) != target_[static_cast<std::size_t>(v)]) {
                return;
            }
        }
        Rational c = coeff_;
        for (const auto& a : atoms_) {
            long n = atom_exp(a);
            long kt = atom_k(a);
            Integer denom = 1;
            int sign = a.hsign < 0 ? parity_sign(n - kt) : 1;
            for (int i : a.kidx) {
                long ki = k_[static_cast<std::size_t>(i)];
                denom *= factorial(ki);
                if (ksign_[static_cast<std::size_t>(i)] < 0) {
                    sign *= parity_sign(ki);
                }
            }
            Rational f{falling(n, kt), denom};
            f.canonicalize();
            c *= f;
            if (sign < 0) {
                c = -c;
            }
            if (c == 0) {
                return;
            }
        }
        total_ += c;
    }

    void distribute(const std::vector<int>& open, std::size_t pos, long rem)
    {
        auto slot = static_cast<std::size_t>(open[pos]);
        if (pos + 1 == open.size()) {
            k_[slot] = rem;
            kset_[slot] = true;
            recurse();
            kset_[slot] = false;
            return;
        }
        for (long v = 0; v <= rem; ++v) {
            k_[slot] = v;
            kset_[slot] = true;
            distribute(open, pos + 1, rem - v);
            kset_[slot] = false;
        }
    }

    Rational coeff_;
    std::vector<std::string> vars_;
    std::vector<long> mono_;
    std::vector<long> target_;
    std::vector<Atom> atoms_;
    std::vector<int> kvar_;
    std::vector<int> ksign_;
    std::vector<long> k_;
    std::vector<bool> kset_;
    int den_ = -1;
    long n_ = 0;
    bool nset_ = false;
    Rational total_;
};

} // namespace

Rational coeff_of(const DeltaTerm& t, const Monomial& m)
{
    return TermSolver(t, m).solve();
}

Rational coeff_of(const DeltaExpr& e, const Monomial& m)
{
    Rational total = 0;
    for (const auto& t : e.terms()) {
        total += coeff_of(t, m);
    }
    return total;
}

Rational atom_coefficient(const ExpansionAtom& a, const Monomial& m)
{
    if (a.inert()) {
        throw SummabilityUnknown("atom " + to_string(a) + " has no finite coefficients");
    }
    // Group tail entries by variable; distinct-variable tails are the common case.
    std::map<std::string, std::vector<int>> by_var;
    for (const auto& s : a.tail) {
        by_var[s.var].push_back(s.sign);
    }
    for (const auto& [v, e] : m) {
        if (e != 0 && v != a.head.var && !by_var.contains(v)) {
            return 0;
        }
    }
    auto exp_of = [&](const std::string& v) {
        auto it = m.find(v);
        return it == m.end() ? 0L : it->second;
    };
    long ktotal = 0;
    for (const auto& [v, signs] : by_var) {
        long e = exp_of(v);
        if (e < 0) {
            return 0;
        }
        ktotal += e;
    }
    if (exp_of(a.head.var) != a.exp - ktotal) {
        return 0;
    }
    // Multinomial n!/( (n-K)! prod k_i! ) with signs; a repeated tail variable
    // with signs s_1..s_r contributes (s_1 + ... + s_r)^{e_v} / e_v!.
    Rational c{falling(a.exp, ktotal), 1};
    for (const auto& [v, signs] : by_var) {
        long e = exp_of(v);
        long sum = 0;
        for (int s : signs) {
            sum += s;
        }
        Integer p = 1;
        for (long i = 0; i < e; ++i) {
            p *= sum;
        }
        Rational f{p, factorial(e)};
        f.canonicalize();
        c *= f;
    }
    if (a.head.sign < 0 && parity_sign(a.exp - ktotal) < 0) {
        c = -c;
    }
    return c;
}

// Proofs ------------------------------------------------------------------------

std::string identity_name(DeltaIdentity which)
{
    return which == DeltaIdentity::TwoTerm ? "two-term" : "three-term";
}

DeltaExpr identity_lhs(DeltaIdentity which)
{
    SignedVar x0{"x0", 1}, x1{"x1", 1}, x2{"x2", 1};
    if (which == DeltaIdentity::TwoTerm) {
        return DeltaExpr::delta(make_delta({x2, x0}, "x1")) - DeltaExpr::delta(make_delta({x1, -x0}, "x2"));
    }
    return DeltaExpr::delta(make_delta({x1, -x2}, "x0")) - DeltaExpr::delta(make_delta({-x2, x1}, "x0")) -
           DeltaExpr::delta(make_delta({x2, x0}, "x1"));
}

ProofTrace prove_identity(DeltaIdentity which)
{
    ProofTrace p;
    p.identity = which;
    p.lhs = identity_lhs(which);

    DeltaExpr expanded = expand_deltas(p.lhs);
    p.expanded = expanded.terms();
    p.steps.push_back({"delta_to_atoms", content_hash(p.lhs), content_hash(expanded)});

    DeltaExpr reassociated(expanded.universe());
    std::vector<DeltaTerm> canon;
    for (const auto& t : expanded.terms()) {
        canon.push_back(canonicalize_term(t));
        reassociated.push(canon.back());
    }
    p.steps.push_back({"reassociate_atoms", content_hash(expanded), content_hash(reassociated)});

    p.residual = normalize(reassociated);
    p.steps.push_back({"cancel_like_terms", content_hash(reassociated), content_hash(p.residual)});

    std::vector<bool> used(canon.size(), false);
    for (std::size_t i = 0; i < canon.size(); ++i) {
        if (used[i]) {
            continue;
        }
        std::vector<std::size_t> group{i};
        for (std::size_t j = i + 1; j < canon.size(); ++j) {
            if (!used[j] && same_key(canon[i], canon[j])) {
                group.push_back(j);
            }
        }
        if (group.size() == 2 && canon[group[0]].coeff + canon[group[1]].coeff == 0) {
            used[group[0]] = used[group[1]] = true;
            p.pairs.emplace_back(static_cast<int>(group[0]) + 1, static_cast<int>(group[1]) + 1);
        }
    }
    if (!p.residual.empty()) {
        throw ProverFailure(identity_name(which) + " identity left residual " + to_string(p.residual));
    }
    return p;
}

// Serialization ------------------------------------------------------------------

nlohmann::json to_json(const ExpansionAtom& a)
{
    nlohmann::json tail = nlohmann::json::array();
    for (const auto& s : a.tail) {
        tail.push_back(to_string(s));
    }
    return {{"head", to_string(a.head)}, {"tail", tail}, {"exp", a.exp}};
}

nlohmann::json to_json(const DeltaAtom& d)
{
    nlohmann::json num = nlohmann::json::array();
    for (const auto& s : d.numerator) {
        num.push_back(to_string(s));
    }
    return {{"numerator", num}, {"denominator", d.denominator}};
}

nlohmann::json to_json(const DeltaTerm& t)
{
    nlohmann::json j;
    j["coeff"] = to_string(t.coeff);
    j["monomial"] = nlohmann::json::object();
    for (const auto& [v, e] : t.monomial) {
        j["monomial"][v] = e;
    }
    if (t.delta) {
        j["delta"] = to_json(*t.delta);
    }
    j["atoms"] = nlohmann::json::array();
    for (const auto& a : t.atoms) {
        j["atoms"].push_back(to_json(a));
    }
    return j;
}

nlohmann::json to_json(const DeltaExpr& e)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : e.terms()) {
        terms.push_back(to_json(t));
    }
    return {{"universe", e.universe()}, {"terms", terms}};
}

nlohmann::json to_json(const ProofTrace& p)
{
    nlohmann::json j;
    j["identity"] = identity_name(p.identity);
    j["lhs"] = to_json(p.lhs);
    j["expanded"] = nlohmann::json::array();
    for (const auto& t : p.expanded) {
        j["expanded"].push_back(to_json(t));
    }
    j["steps"] = nlohmann::json::array();
    for (const auto& s : p.steps) {
        j["steps"].push_back({{"rule", s.rule}, {"before", s.before_hash}, {"after", s.after_hash}});
    }
    j["pairs"] = p.pairs;
    j["residual"] = to_json(p.residual);
    return j;
}

ExpansionAtom atom_from_json(const nlohmann::json& j)
{
    std::vector<SignedVar> sum{parse_signed_var(j.at("head").get<std::string>())};
    for (const auto& s : j.at("tail")) {
        sum.push_back(parse_signed_var(s.get<std::string>()));
    }
    return make_atom(sum, j.at("exp").get<long>());
}

DeltaAtom delta_from_json(const nlohmann::json& j)
{
    std::vector<SignedVar> num;
    for (const auto& s : j.at("numerator")) {
        num.push_back(parse_signed_var(s.get<std::string>()));
    }
    return make_delta(num, j.at("denominator").get<std::string>());
}

namespace {

DeltaExpr expr_from_json_unchecked(const nlohmann::json& j)
{
    std::vector<std::string> universe = j.contains("universe") ? j.at("universe").get<std::vector<std::string>>()
                                                               : default_universe();
    DeltaExpr e(universe);
    for (const auto& tj : j.at("terms")) {
        DeltaTerm t;
        t.coeff = parse_rational(tj.at("coeff").get<std::string>());
        if (tj.contains("monomial")) {
            for (const auto& [v, ex] : tj.at("monomial").items()) {
                t.monomial[v] = ex.get<long>();
            }
        }
        if (tj.contains("delta")) {
            t.delta = delta_from_json(tj.at("delta"));
        }
        if (tj.contains("atoms")) {
            for (const auto& aj : tj.at("atoms")) {
                t.atoms.push_back(atom_from_json(aj));
            }
        }
        e.push(std::move(t));
    }
    return e;
}

} // namespace

DeltaExpr expr_from_json(const nlohmann::json& j)
{
    try {
        return expr_from_json_unchecked(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed expression: ") + e.what());
    }
}

std::string content_hash(const DeltaExpr& e)
{
    std::string text = to_json(e).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string render_sum(const std::vector<SignedVar>& sum)
{
    std::string out;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        const auto& s = sum[i];
        if (i == 0) {
            out += (s.sign < 0 ? "-" : "") + s.var;
        } else {
            out += (s.sign < 0 ? " - " : " + ") + s.var;
        }
    }
    return out;
}

} // namespace

std::string to_string(const ExpansionAtom& a)
{
    std::vector<SignedVar> sum{a.head};
    sum.insert(sum.end(), a.tail.begin(), a.tail.end());
    return "(" + render_sum(sum) + ")^" + std::to_string(a.exp);
}

std::string to_string(const DeltaAtom& d)
{
    return d.denominator + "^-1 delta((" + render_sum(d.numerator) + ")/" + d.denominator + ")";
}

std::string to_string(const DeltaTerm& t)
{
    std::string out = to_string(t.coeff);
    for (const auto& [v, e] : t.monomial) {
        out += " " + v + "^" + std::to_string(e);
    }
    if (t.delta) {
        out += " " + to_string(*t.delta);
    }
    for (const auto& a : t.atoms) {
        out += " " + to_string(a);
    }
    return out;
}

std::string to_string(const DeltaExpr& e)
{
    if (e.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& t : e.terms()) {
        if (!out.empty()) {
            out += "  +  ";
        }
        out += "[" + to_string(t) + "]";
    }
    return out;
}

} // namespace vfva::expansion
