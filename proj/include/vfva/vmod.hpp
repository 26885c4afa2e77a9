#pragma once

// Modules for finite vertex structures, their axiom checkers and the
// corpus harness comparing the single weak properties with the module
// Jacobi identity.

#include "vfva/valg.hpp"

#include <filesystem>
#include <memory>

namespace vfva::vmod {

using valg::CheckParams;
using valg::ModeTable;
using valg::PropertyReport;
using valg::Status;
using valg::VertexStructure;

class ModuleStructure {
public:
    ModuleStructure() = default;
    // Throws ConfigError for ids outside the bases.
    ModuleStructure(std::shared_ptr<const VertexStructure> over, std::vector<std::string> wbasis, ModeTable ywtable);

    const VertexStructure& over() const { return *over_; }
    std::shared_ptr<const VertexStructure> over_ptr() const { return over_; }
    const std::vector<std::string>& wbasis() const { return wbasis_; }
    const ModeTable& table() const { return table_; }

private:
    std::shared_ptr<const VertexStructure> over_;
    std::vector<std::string> wbasis_;
    ModeTable table_;
};

// A module M for a commutative algebra: a . m on basis elements.
struct AlgebraModule {
    std::vector<std::string> wbasis;
    std::map<std::pair<std::string, std::string>, VectorCoeff> action;

    VectorCoeff act(const VectorCoeff& a, const VectorCoeff& m) const;
};

// Y_W(u,x)m = (e^{xD}u) . m over borcherds_construct(a, d). Refused with the
// failing triple unless (ab)m = a(bm), and 1.m = m when a has a unit.
ModuleStructure module_construct(const valg::CommutativeAlgebra& a, const LinearMap& d, const AlgebraModule& m);

// A over A, tA over A and A/t^{k-1}A over A for A = Q[t]/(t^k).
ModuleStructure regular_module(long k, bool unital = true);
ModuleStructure ideal_module(long k);
ModuleStructure quotient_module(long k);

enum class MAxiom {
    m_jacobi,
    m_weak_comm,
    m_weak_assoc,
    m_weak_skew_assoc,
    m_vf_skew_symmetry,
    m_vacuum_prop,
    m_d_derivative,
};

std::string to_string(MAxiom a);
MAxiom parse_maxiom(const std::string& s);
const std::vector<MAxiom>& all_maxioms();
bool needs_vacuum(MAxiom a);
valg::Axiom algebra_axiom(MAxiom a);
std::string anchor(MAxiom a);

// Throws MissingVacuum for vacuum axioms over a vacuum-free structure.
PropertyReport check_module_axiom(const ModuleStructure& m, MAxiom axiom, const CheckParams& params = {});
std::vector<PropertyReport> check_all(const ModuleStructure& m, const CheckParams& params = {});

struct ModuleEntry {
    std::string name;
    ModuleStructure module;
    std::vector<std::string> tags;
    std::vector<MAxiom> breaks;
};

// Regular, ideal and quotient modules over Borcherds k = 2..5 followed by
// the curated mutants.
std::vector<ModuleEntry> module_corpus();
std::vector<ModuleEntry> module_mutants();
// Regular modules over the vacuum-free ideal structures.
std::vector<ModuleEntry> vacuum_free_module_corpus();

struct Comparison {
    std::string id;
    std::string anchor;
    // Premise side (minor axioms + the weak property) and m_jacobi.
    std::optional<bool> premises;
    std::optional<bool> jacobi;
    // "AGREE", "SKIPPED" (hypotheses not met) or "ASYMMETRY"
    std::string verdict;
};

struct ModuleOutcome {
    std::string name;
    std::vector<PropertyReport> reports;
    std::vector<Comparison> comparisons;
    std::optional<bool> break_confirmed;
};

struct ModuleRow {
    std::string id;
    std::string anchor;
    std::vector<MAxiom> premises;
    std::vector<MAxiom> conclusions;
    // Rows that are not theorems are listed but never evaluated.
    bool evaluated = true;
};

const std::vector<ModuleRow>& module_rows();

struct MainTheoremReport {
    std::vector<ModuleOutcome> members;
    std::vector<valg::RowOutcome> rows;
    bool consistent() const;
};

MainTheoremReport main_theorem_harness(const std::vector<ModuleEntry>& corpus, const CheckParams& params = {});

// Config: {wbasis, wmodes:[{u, n, w, coeff}], over: path or inline structure}.
// Relative `over` paths resolve against `base`.
nlohmann::json to_json(const ModuleEntry& e, const nlohmann::json& over);
ModuleEntry module_from_json(const nlohmann::json& j, const std::string& name,
                             const std::filesystem::path& base = {});
ModuleEntry load_module(const std::filesystem::path& path);
nlohmann::json to_json(const MainTheoremReport& r);

} // namespace vfva::vmod
