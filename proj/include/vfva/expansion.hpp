#pragma once

// Symbolic formal calculus over a fixed set of commuting formal variables.
//
// A binomial power (h + t_1 + ... + t_r)^n is always expanded in nonnegative
// powers of the tail variables t_i; the head h carries the (possibly
// negative) remaining power. Because iterated expansions reassociate, an
// atom is determined by its head, the multiset of its tail, and its
// exponent. Opposite tail entries cancel; a tail entry never cancels
// against the head.

#include "vfva/scalars.hpp"

#include "json.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vfva::expansion {

using vfva::to_string;

using Monomial = std::map<std::string, long>;

struct SignedVar {
    std::string var;
    int sign = 1;

    auto operator<=>(const SignedVar&) const = default;
};

// "+x1" / "-x2"
std::string to_string(const SignedVar& s);
SignedVar parse_signed_var(const std::string& text);
SignedVar operator-(SignedVar s);

struct ExpansionAtom {
    SignedVar head;
    std::vector<SignedVar> tail; // multiset, kept sorted
    long exp = 0;

    auto operator<=>(const ExpansionAtom&) const = default;

    // Tail mentions the head variable; no finite coefficient exists.
    bool inert() const;
};

// Builds an atom (sum)^exp whose first-listed summand is the head.
ExpansionAtom make_atom(std::vector<SignedVar> sum, long exp);

// denominator^{-1} delta(numerator / denominator). The numerator's first entry
// plays the role of the head when delta is expanded as a sum of powers.
struct DeltaAtom {
    std::vector<SignedVar> numerator;
    std::string denominator;

    auto operator<=>(const DeltaAtom&) const = default;
};

DeltaAtom make_delta(std::vector<SignedVar> numerator, std::string denominator);

struct DeltaTerm {
    Rational coeff;
    Monomial monomial;
    std::optional<DeltaAtom> delta;
    std::vector<ExpansionAtom> atoms;
};

// Ordering/equality of the non-coefficient part of a term.
std::strong_ordering compare_key(const DeltaTerm& a, const DeltaTerm& b);
bool same_key(const DeltaTerm& a, const DeltaTerm& b);

const std::vector<std::string>& default_universe();

class DeltaExpr {
public:
    DeltaExpr() : universe_(default_universe()) {}
    explicit DeltaExpr(std::vector<std::string> universe) : universe_(std::move(universe)) {}
    DeltaExpr(std::vector<std::string> universe, std::vector<DeltaTerm> terms);

    static DeltaExpr constant(const Rational& c, std::vector<std::string> universe = default_universe());
    static DeltaExpr monomial(const Monomial& m, const Rational& c = 1,
                              std::vector<std::string> universe = default_universe());
    static DeltaExpr atom(const ExpansionAtom& a, const Rational& c = 1,
                          std::vector<std::string> universe = default_universe());
    static DeltaExpr delta(const DeltaAtom& d, const Rational& c = 1,
                           std::vector<std::string> universe = default_universe());

    const std::vector<std::string>& universe() const { return universe_; }
    const std::vector<DeltaTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    DeltaExpr with_universe(std::vector<std::string> extra) const;
    void push(DeltaTerm t);

    DeltaExpr& operator+=(const DeltaExpr& o);
    DeltaExpr& operator-=(const DeltaExpr& o);
    DeltaExpr& operator*=(const Rational& c);
    friend DeltaExpr operator+(DeltaExpr a, const DeltaExpr& b) { return a += b; }
    friend DeltaExpr operator-(DeltaExpr a, const DeltaExpr& b) { return a -= b; }
    friend DeltaExpr operator*(const Rational& c, DeltaExpr a) { return a *= c; }

    // Term-by-term product. Refused (SummabilityUnknown) when two deltas would
    // meet in one term; finiteness of the remaining coefficients is checked
    // lazily by coeff_of.
    DeltaExpr operator*(const DeltaExpr& o) const;

private:
    void check_vars(const DeltaTerm& t) const;

    std::vector<std::string> universe_;
    std::vector<DeltaTerm> terms_;
};

// Rewrites ---------------------------------------------------------------

// y^{-1} delta(s/y) = (s - y)^{-1} + (y - s)^{-1}.
DeltaExpr delta_to_atoms(const DeltaAtom& d, std::vector<std::string> universe = default_universe());

// Replaces every delta factor of every term by its atom image.
DeltaExpr expand_deltas(const DeltaExpr& e);

// Rewrites `var` as `var + shift` everywhere (formal Taylor theorem).
DeltaExpr taylor_shift(const DeltaExpr& e, const std::string& var, const SignedVar& shift);

// Sign-normalized heads, cancelled tail pairs, empty-tail atoms folded into
// the monomial, powers of equal bases merged; no like or zero terms.
// Idempotent.
DeltaExpr normalize(const DeltaExpr& e);

// Canonical form of a single term; may fold the term to a different key.
DeltaTerm canonicalize_term(const DeltaTerm& t);

enum class SubstitutionDirection {
    // delta(s/x) f(s, ...) -> delta(s/x) f(x, ...)
    NumeratorToDenominator,
    // delta(s/x) x^n -> delta(s/x) s^n
    DenominatorToNumerator,
};

DeltaExpr delta_substitute(const DeltaExpr& e,
                           SubstitutionDirection dir = SubstitutionDirection::NumeratorToDenominator);

// Coefficient of var^{-1}, as an expression free of var.
DeltaExpr residue(const DeltaExpr& e, const std::string& var);

// Independent window oracle: exact coefficient of a monomial, computed by
// expanding every atom and delta with the binomial convention.
Rational coeff_of(const DeltaExpr& e, const Monomial& m);
Rational coeff_of(const DeltaTerm& t, const Monomial& m);

// Coefficient of a monomial in a single atom (closed form).
Rational atom_coefficient(const ExpansionAtom& a, const Monomial& m);

// Proofs -------------------------------------------------------------------

enum class DeltaIdentity { TwoTerm, ThreeTerm };

struct RewriteStep {
    std::string rule;
    std::string before_hash;
    std::string after_hash;
};

struct ProofTrace {
    DeltaIdentity identity;
    DeltaExpr lhs;
    // Terms after delta_to_atoms, in the order they were produced.
    std::vector<DeltaTerm> expanded;
    std::vector<RewriteStep> steps;
    // 1-based indices into `expanded` of terms that cancel each other.
    std::vector<std::pair<int, int>> pairs;
    DeltaExpr residual;
};

DeltaExpr identity_lhs(DeltaIdentity which);
ProofTrace prove_identity(DeltaIdentity which);
std::string identity_name(DeltaIdentity which);

// Serialization --------------------------------------------------------------

nlohmann::json to_json(const ExpansionAtom& a);
nlohmann::json to_json(const DeltaAtom& d);
nlohmann::json to_json(const DeltaTerm& t);
nlohmann::json to_json(const DeltaExpr& e);
nlohmann::json to_json(const ProofTrace& p);
ExpansionAtom atom_from_json(const nlohmann::json& j);
DeltaAtom delta_from_json(const nlohmann::json& j);
DeltaExpr expr_from_json(const nlohmann::json& j);

// FNV-1a over the canonical serialized form, as 16 hex digits.
std::string content_hash(const DeltaExpr& e);

std::string to_string(const ExpansionAtom& a);
std::string to_string(const DeltaAtom& d);
std::string to_string(const DeltaTerm& t);
std::string to_string(const DeltaExpr& e);

} // namespace vfva::expansion
