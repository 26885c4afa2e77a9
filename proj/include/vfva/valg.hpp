#pragma once

// Finite vertex structures with polynomial mode tables, the commutative
// (Borcherds) construction, axiom checkers and the implication matrix.
//
// Y(u,x)v = sum_n u_n v x^{-n-1}; every table entry has finitely many modes,
// so every product of vertex operators below is a Laurent polynomial and
// the checks are exact.

#include "vfva/elemprop.hpp"
#include "vfva/scalars.hpp"
#include "vfva/series.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vfva::valg {

using expansion::Monomial;
using series::WindowedSeries;

// n -> u_n v
using Modes = std::map<long, VectorCoeff>;
// exponent of x -> coefficient
using Poly1 = std::map<long, VectorCoeff>;
// (first, second) exponents -> coefficient
using Poly2 = std::map<std::pair<long, long>, VectorCoeff>;

// Modes of a left space acting on a right space, indexed by basis ids.
class ModeTable {
public:
    void set(const std::string& u, long n, const std::string& v, const VectorCoeff& c);
    void add(const std::string& u, long n, const std::string& v, const VectorCoeff& c);
    const Modes* find(const std::string& u, const std::string& v) const;
    const std::map<std::pair<std::string, std::string>, Modes>& entries() const { return entries_; }

    // Bilinear extensions.
    VectorCoeff mode(const VectorCoeff& u, long n, const VectorCoeff& v) const;
    Poly1 y(const VectorCoeff& u, const VectorCoeff& v) const;

    // Largest n + 1 over nonzero modes (0 when none is >= 0).
    long max_pole() const;
    // Largest -n - 1 over nonzero modes (0 when none is <= -1).
    long max_degree() const;

    friend bool operator==(const ModeTable&, const ModeTable&) = default;

private:
    std::map<std::pair<std::string, std::string>, Modes> entries_;
};

struct VacuumData {
    std::string one;
    // D v = v_{-2} 1
    LinearMap dop;

    friend bool operator==(const VacuumData&, const VacuumData&) = default;
};

class VertexStructure {
public:
    VertexStructure() = default;
    // Throws ConfigError for unknown basis ids or a non-nilpotent D.
    VertexStructure(std::vector<std::string> basis, ModeTable table, std::optional<std::string> vacuum = {});

    const std::vector<std::string>& basis() const { return basis_; }
    const ModeTable& table() const { return table_; }
    const std::optional<VacuumData>& vacuum() const { return vacuum_; }
    bool has_vacuum() const { return vacuum_.has_value(); }

    friend bool operator==(const VertexStructure&, const VertexStructure&) = default;

private:
    std::vector<std::string> basis_;
    ModeTable table_;
    std::optional<VacuumData> vacuum_;
};

// Commutative associative algebra on a named basis.
struct CommutativeAlgebra {
    std::vector<std::string> basis;
    std::map<std::pair<std::string, std::string>, VectorCoeff> product;
    std::optional<std::string> unit;

    VectorCoeff multiply(const VectorCoeff& a, const VectorCoeff& b) const;
};

// Y(u,x)v = (e^{xD}u) v. Refused (with the failing basis elements) unless the
// product is commutative and associative, D is a nilpotent derivation and
// the unit, when given, is a unit.
VertexStructure borcherds_construct(const CommutativeAlgebra& a, const LinearMap& d);

// Q[t]/(t^k) on "1", "t", "t2", ...; with unital false, the ideal tQ[t]/(t^k).
CommutativeAlgebra truncated_polynomial(long k, bool unital = true);
// D t^j = j t^{j+1}, a nilpotent derivation of both algebras above.
LinearMap raising_derivation(const CommutativeAlgebra& a);
// D t^j = j t^{j-1}; not a derivation of the truncation.
LinearMap plain_derivative(const CommutativeAlgebra& a);
std::string power_id(long j);

VertexStructure borcherds_family(long k, bool unital = true);

// Series views ---------------------------------------------------------------

WindowedSeries y_series(const VertexStructure& s, const VectorCoeff& u, const VectorCoeff& v,
                        const std::string& x = "x");
// Y(u,x1)Y(v,x2)w
WindowedSeries compose_y(const VertexStructure& s, const VectorCoeff& u, const std::string& x1, const VectorCoeff& v,
                         const std::string& x2, const VectorCoeff& w);
// Y(Y(u,x0)v,x2)w
WindowedSeries iterate_y(const VertexStructure& s, const VectorCoeff& u, const std::string& x0, const VectorCoeff& v,
                         const std::string& x2, const VectorCoeff& w);

// Negative of the least power of x in Y(u,x)v when negative, else 0.
long minimal_pole_order(const VertexStructure& s, const std::string& u, const std::string& v);
long minimal_pole_order(const ModeTable& t, const std::string& u, const std::string& v);


// Axioms -----------------------------------------------------------------------

enum class Axiom {
    jacobi,
    weak_comm,
    weak_assoc,
    weak_skew_assoc,
    vf_skew_symmetry,
    skew_symmetry,
    d_derivative,
    d_bracket,
    vacuum_prop,
    creation_prop,
    strong_creation,
    injectivity,
};

std::string to_string(Axiom a);
Axiom parse_axiom(const std::string& s);
const std::vector<Axiom>& all_axioms();
bool needs_vacuum(Axiom a);
// Formula the checker verifies.
std::string anchor(Axiom a);

enum class Status { Pass, Fail, NotApplicable };

std::string to_string(Status s);

// Least m making the weak property (weak_comm, weak_assoc or
// weak_skew_assoc) hold on the triple, or nullopt when none does.
std::optional<long> minimal_witness(const VertexStructure& s, Axiom axiom, const std::string& u,
                                    const std::string& v, const std::string& w);
// Whether the given m clears the poles of the weak property on the triple.
bool witness_valid(const VertexStructure& s, Axiom axiom, const std::string& u, const std::string& v,
                   const std::string& w, long m);

struct Counterexample {
    std::vector<std::string> vectors;
    Monomial monomial;
    VectorCoeff value;
};

struct PropertyReport {
    std::string axiom;
    std::string anchor;
    Status status = Status::Pass;
    std::optional<Counterexample> counterexample;
    // Weak properties: largest per-triple minimal m.
    std::optional<long> witness;
    long window = 0;
    std::string detail;

    bool passed() const { return status == Status::Pass; }
};

struct CheckParams {
    // Jacobi window; default jacobi_window().
    std::optional<long> window;
    // Weak-property search bound; default max pole + 2.
    std::optional<long> m_max;
};

// 2 * (max pole) + 2 + (max degree) over both tables.
long jacobi_window(const ModeTable& algebra, const ModeTable& action);

// Jacobi triple (f, g, h) in the convention of elemprop for basis u, v, w:
// f = Y(u,y1)Y(v,y2)w, g = Y(v,y1)Y(u,y2)w, h = Y(Y(u,y2)v,y1)w.
elemprop::TripleInstance jacobi_triple(const VertexStructure& algebra, const ModeTable& action,
                                       const std::string& u, const std::string& v, const std::string& w);

// Checks one axiom for the action of `algebra` through `action` on the space
// with basis `space`. Supports jacobi, the weak properties,
// vf_skew_symmetry, vacuum_prop and d_derivative.
PropertyReport check_action(const VertexStructure& algebra, const ModeTable& action,
                            const std::vector<std::string>& space, Axiom axiom, const CheckParams& params = {});

// Throws MissingVacuum for vacuum axioms on a vacuum-free structure.
PropertyReport check_axiom(const VertexStructure& s, Axiom axiom, const CheckParams& params = {});
// Every axiom; vacuum axioms are NotApplicable without vacuum.
std::vector<PropertyReport> check_all(const VertexStructure& s, const CheckParams& params = {});

// Corpus and implication matrix ------------------------------------------------

struct CorpusEntry {
    std::string name;
    VertexStructure structure;
    std::vector<std::string> tags;
    // Axioms a curated mutant is designed to break.
    std::vector<Axiom> breaks;
};

// Borcherds k = 2..5, their ideal variants and the curated mutants.
std::vector<CorpusEntry> builtin_corpus();
std::vector<CorpusEntry> curated_mutants();

struct ImplicationRow {
    std::string id;
    std::string anchor;
    std::vector<Axiom> premises;
    std::vector<Axiom> conclusions;
};

const std::vector<ImplicationRow>& implication_rows();

struct RowOutcome {
    std::string id;
    std::string anchor;
    // Members whose premises all passed.
    std::vector<std::string> tested;
    std::vector<std::string> violations;
    // "PASS", "UNTESTED" or "VIOLATION"
    std::string verdict;
};

struct MemberOutcome {
    std::string name;
    std::vector<PropertyReport> reports;
    // Mutants only: a designed break was observed with a counterexample.
    std::optional<bool> break_confirmed;
};

struct MatrixReport {
    std::vector<RowOutcome> rows;
    std::vector<MemberOutcome> members;
    bool consistent() const;
};

MatrixReport implication_matrix(const std::vector<CorpusEntry>& corpus, const CheckParams& params = {});

// Serialization --------------------------------------------------------------

nlohmann::json to_json(const ModeTable& t, const std::string& right_key);
ModeTable table_from_json(const nlohmann::json& modes, const std::string& right_key);
nlohmann::json to_json(const VertexStructure& s);
VertexStructure structure_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CorpusEntry& e);
CorpusEntry entry_from_json(const nlohmann::json& j, const std::string& name);
CorpusEntry load_entry(const std::filesystem::path& path);
nlohmann::json to_json(const PropertyReport& r);
nlohmann::json to_json(const MatrixReport& r);

std::string to_string(const Poly1& p, const std::string& x);

} // namespace vfva::valg
