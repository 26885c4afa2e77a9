#include "vfva/vmod.hpp"

#include "vfva/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace vfva::vmod {

namespace {

using nlohmann::json;
using valg::Axiom;

VectorCoeff vec(const std::string& id)
{
    return VectorCoeff::basis(id);
}

AlgebraModule truncated_module(long k, long lo, long hi)
{
    // span{t^lo, ..., t^{hi-1}} with t^i . t^j = t^{i+j} when i + j < hi
    AlgebraModule m;
    for (long j = lo; j < hi; ++j) {
        m.wbasis.push_back(valg::power_id(j));
    }
    for (long i = 0; i < k; ++i) {
        for (long j = lo; j < hi; ++j) {
            if (i + j < hi) {
                m.action[{valg::power_id(i), valg::power_id(j)}] = vec(valg::power_id(i + j));
            }
        }
    }
    return m;
}

AlgebraModule restrict_action(AlgebraModule m, const std::vector<std::string>& algebra_basis)
{
    std::set<std::string> keep(algebra_basis.begin(), algebra_basis.end());
    std::erase_if(m.action, [&](const auto& kv) { return !keep.count(kv.first.first); });
    return m;
}

} // namespace

ModuleStructure::ModuleStructure(std::shared_ptr<const VertexStructure> over, std::vector<std::string> wbasis,
                                 ModeTable ywtable)
    : over_(std::move(over)), wbasis_(std::move(wbasis)), table_(std::move(ywtable))
{
    if (!over_) {
        throw ConfigError("module has no underlying structure");
    }
    std::set<std::string> v(over_->basis().begin(), over_->basis().end());
    std::set<std::string> w(wbasis_.begin(), wbasis_.end());
    if (w.size() != wbasis_.size()) {
        throw ConfigError("module basis has repeated elements");
    }
    for (const auto& [k, modes] : table_.entries()) {
        if (!v.count(k.first)) {
            throw ConfigError("module mode names unknown algebra element '" + k.first + "'");
        }
        if (!w.count(k.second)) {
            throw ConfigError("module mode names unknown module element '" + k.second + "'");
        }
        for (const auto& [n, c] : modes) {
            for (const auto& [id, q] : c.entries()) {
                if (!w.count(id)) {
                    throw ConfigError("module coefficient names unknown element '" + id + "'");
                }
            }
        }
    }
}

VectorCoeff AlgebraModule::act(const VectorCoeff& a, const VectorCoeff& m) const
{
    VectorCoeff out;
    for (const auto& [ia, ca] : a.entries()) {
        for (const auto& [im, cm] : m.entries()) {
            if (auto it = action.find({ia, im}); it != action.end()) {
                out.axpy(ca * cm, it->second);
            }
        }
    }
    return out;
}

ModuleStructure module_construct(const valg::CommutativeAlgebra& a, const LinearMap& d, const AlgebraModule& m)
{
    auto over = std::make_shared<const VertexStructure>(valg::borcherds_construct(a, d));
    for (const auto& x : a.basis) {
        for (const auto& y : a.basis) {
            for (const auto& w : m.wbasis) {
                if (m.act(a.multiply(vec(x), vec(y)), vec(w)) != m.act(vec(x), m.act(vec(y), vec(w)))) {
                    throw ConstructionRefused("action is not associative at (" + x + ", " + y + ", " + w + ")");
                }
            }
        }
    }
    if (a.unit) {
        for (const auto& w : m.wbasis) {
            if (m.act(vec(*a.unit), vec(w)) != vec(w)) {
                throw ConstructionRefused("unit does not act as the identity on " + w);
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
            for (const auto& w : m.wbasis) {
                t.set(u, -j - 1, w, inv_fact * m.act(cur, vec(w)));
            }
            cur = d.apply(cur);
        }
    }
    return ModuleStructure(over, m.wbasis, t);
}

ModuleStructure regular_module(long k, bool unital)
{
    auto a = valg::truncated_polynomial(k, unital);
    auto m = restrict_action(truncated_module(k, unital ? 0 : 1, k), a.basis);
    return module_construct(a, valg::raising_derivation(a), m);
}

ModuleStructure ideal_module(long k)
{
    auto a = valg::truncated_polynomial(k);
    return module_construct(a, valg::raising_derivation(a), truncated_module(k, 1, k));
}

ModuleStructure quotient_module(long k)
{
    auto a = valg::truncated_polynomial(k);
    return module_construct(a, valg::raising_derivation(a), truncated_module(k, 0, k - 1));
}

// Axioms -----------------------------------------------------------------------

namespace {

const std::vector<std::pair<MAxiom, std::string>>& maxiom_names()
{
    static const std::vector<std::pair<MAxiom, std::string>> names{
        {MAxiom::m_jacobi, "m_jacobi"},
        {MAxiom::m_weak_comm, "m_weak_comm"},
        {MAxiom::m_weak_assoc, "m_weak_assoc"},
        {MAxiom::m_weak_skew_assoc, "m_weak_skew_assoc"},
        {MAxiom::m_vf_skew_symmetry, "m_vf_skew_symmetry"},
        {MAxiom::m_vacuum_prop, "m_vacuum_prop"},
        {MAxiom::m_d_derivative, "m_d_derivative"},
    };
    return names;
}

} // namespace

std::string to_string(MAxiom a)
{
    for (const auto& [x, name] : maxiom_names()) {
        if (x == a) {
            return name;
        }
    }
    return "?";
}

MAxiom parse_maxiom(const std::string& s)
{
    for (const auto& [x, name] : maxiom_names()) {
        if (name == s) {
            return x;
        }
    }
    throw ConfigError("unknown module axiom '" + s + "'");
}

const std::vector<MAxiom>& all_maxioms()
{
    static const std::vector<MAxiom> all = [] {
        std::vector<MAxiom> v;
        for (const auto& [x, name] : maxiom_names()) {
            v.push_back(x);
        }
        return v;
    }();
    return all;
}

bool needs_vacuum(MAxiom a)
{
    return a == MAxiom::m_vacuum_prop || a == MAxiom::m_d_derivative;
}

Axiom algebra_axiom(MAxiom a)
{
    switch (a) {
    case MAxiom::m_jacobi:
        return Axiom::jacobi;
    case MAxiom::m_weak_comm:
        return Axiom::weak_comm;
    case MAxiom::m_weak_assoc:
        return Axiom::weak_assoc;
    case MAxiom::m_weak_skew_assoc:
        return Axiom::weak_skew_assoc;
    case MAxiom::m_vf_skew_symmetry:
        return Axiom::vf_skew_symmetry;
    case MAxiom::m_vacuum_prop:
        return Axiom::vacuum_prop;
    case MAxiom::m_d_derivative:
        return Axiom::d_derivative;
    }
    throw DomainError("unknown module axiom");
}

std::string anchor(MAxiom a)
{
    switch (a) {
    case MAxiom::m_jacobi:
        return "x0^-1 delta((x1-x2)/x0) Y_W(u,x1)Y_W(v,x2) - x0^-1 delta((-x2+x1)/x0) Y_W(v,x2)Y_W(u,x1) = "
               "x1^-1 delta((x2+x0)/x1) Y_W(Y(u,x0)v,x2)";
    case MAxiom::m_weak_comm:
        return "(x1-x2)^m (Y_W(u,x1)Y_W(v,x2) - Y_W(v,x2)Y_W(u,x1)) = 0";
    case MAxiom::m_weak_assoc:
        return "(x0+x2)^m (Y_W(u,x0+x2)Y_W(v,x2)w - Y_W(Y(u,x0)v,x2)w) = 0";
    case MAxiom::m_weak_skew_assoc:
        return "(x1-x0)^m (Y_W(v,-x0+x1)Y_W(u,x1)w - Y_W(Y(u,x0)v,x1-x0)w) = 0";
    case MAxiom::m_vf_skew_symmetry:
        return "Y_W(Y(u,x0)v,x2) = Y_W(Y(v,-x0)u,x2+x0)";
    case MAxiom::m_vacuum_prop:
        return "Y_W(1,x) = 1";
    case MAxiom::m_d_derivative:
        return "Y_W(Dv,x) = d/dx Y_W(v,x)";
    }
    return "";
}

PropertyReport check_module_axiom(const ModuleStructure& m, MAxiom axiom, const CheckParams& params)
{
    if (needs_vacuum(axiom) && !m.over().has_vacuum()) {
        throw MissingVacuum(to_string(axiom) + " needs a vacuum vector");
    }
    auto r = valg::check_action(m.over(), m.table(), m.wbasis(), algebra_axiom(axiom), params);
    r.axiom = to_string(axiom);
    r.anchor = anchor(axiom);
    return r;
}

std::vector<PropertyReport> check_all(const ModuleStructure& m, const CheckParams& params)
{
    std::vector<PropertyReport> out;
    for (MAxiom a : all_maxioms()) {
        if (needs_vacuum(a) && !m.over().has_vacuum()) {
            PropertyReport r;
            r.axiom = to_string(a);
            r.anchor = anchor(a);
            r.status = Status::NotApplicable;
            r.detail = "no vacuum vector";
            out.push_back(r);
            continue;
        }
        out.push_back(check_module_axiom(m, a, params));
    }
    return out;
}

// Corpus -------------------------------------------------------------------------------

namespace {

ModuleEntry module_mutant(const std::string& name, ModuleStructure base, std::vector<MAxiom> breaks,
                          const std::string& u, long n, const std::string& w, const VectorCoeff& c)
{
    ModeTable t = base.table();
    t.set(u, n, w, c);
    return ModuleEntry{name, ModuleStructure(base.over_ptr(), base.wbasis(), t), {"mutant"}, std::move(breaks)};
}

} // namespace

std::vector<ModuleEntry> module_mutants()
{
    using A = MAxiom;
    return {
        module_mutant("module-jacobi-break-1", regular_module(3), {A::m_jacobi}, "t", 0, "t", vec("t2")),
        module_mutant("module-jacobi-break-2", regular_module(4), {A::m_jacobi}, "t", -1, "t2",
                      VectorCoeff{{"t3", 2}}),
        module_mutant("module-jacobi-break-3", regular_module(4), {A::m_jacobi}, "t", -2, "t", VectorCoeff{}),
        module_mutant("module-jacobi-break-4", regular_module(3), {A::m_jacobi}, "t2", -1, "1", VectorCoeff{}),
        module_mutant("module-jacobi-break-5", quotient_module(4), {A::m_jacobi}, "t", -1, "t", VectorCoeff{}),
    };
}

std::vector<ModuleEntry> module_corpus()
{
    std::vector<ModuleEntry> out;
    for (long k = 2; k <= 5; ++k) {
        auto ks = std::to_string(k);
        out.push_back({"regular-k" + ks, regular_module(k), {"valid"}, {}});
        out.push_back({"ideal-k" + ks, ideal_module(k), {"valid"}, {}});
        out.push_back({"quotient-k" + ks, quotient_module(k), {"valid"}, {}});
    }
    for (auto& m : module_mutants()) {
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<ModuleEntry> vacuum_free_module_corpus()
{
    std::vector<ModuleEntry> out;
    for (long k = 2; k <= 5; ++k) {
        out.push_back({"regular-ideal-k" + std::to_string(k), regular_module(k, false), {"valid", "vacuum-free"}, {}});
    }
    return out;
}

const std::vector<ModuleRow>& module_rows()
{
    using A = MAxiom;
    static const std::vector<ModuleRow> rows{
        {"m_wc+m_wa=>m_jacobi", "module weak_comm, weak_assoc => module jacobi", {A::m_weak_comm, A::m_weak_assoc},
         {A::m_jacobi}},
        {"m_wc+m_wsa=>m_jacobi", "module weak_comm, weak_skew_assoc => module jacobi",
         {A::m_weak_comm, A::m_weak_skew_assoc}, {A::m_jacobi}},
        {"m_wa+m_wsa=>m_jacobi", "module weak_assoc, weak_skew_assoc => module jacobi",
         {A::m_weak_assoc, A::m_weak_skew_assoc}, {A::m_jacobi}},
        {"m_jacobi=>m_weak", "module jacobi => module weak_comm, weak_assoc, weak_skew_assoc", {A::m_jacobi},
         {A::m_weak_comm, A::m_weak_assoc, A::m_weak_skew_assoc}},
        {"m_jacobi=>m_vfss", "module jacobi => Y_W(Y(u,x0)v,x2) = Y_W(Y(v,-x0)u,x2+x0)", {A::m_jacobi},
         {A::m_vf_skew_symmetry}},
        {"m_wa+m_vfss=>m_jacobi", "module weak_assoc, vf_skew_symmetry => module jacobi",
         {A::m_weak_assoc, A::m_vf_skew_symmetry}, {A::m_jacobi}},
        {"m_wsa+m_vfss=>m_jacobi", "module weak_skew_assoc, vf_skew_symmetry => module jacobi",
         {A::m_weak_skew_assoc, A::m_vf_skew_symmetry}, {A::m_jacobi}},
        {"m_vacuum+m_jacobi=>m_dder", "Y_W(1,x) = 1, module jacobi => Y_W(Dv,x) = d/dx Y_W(v,x)",
         {A::m_vacuum_prop, A::m_jacobi}, {A::m_d_derivative}},
        {"m_vacuum+m_wa=>m_dder", "Y_W(1,x) = 1, module weak_assoc => Y_W(Dv,x) = d/dx Y_W(v,x)",
         {A::m_vacuum_prop, A::m_weak_assoc}, {A::m_d_derivative}},
        {"m_vacuum+m_wsa=>m_dder", "Y_W(1,x) = 1, module weak_skew_assoc => Y_W(Dv,x) = d/dx Y_W(v,x)",
         {A::m_vacuum_prop, A::m_weak_skew_assoc}, {A::m_d_derivative}},
        {"m_vacuum+m_wa=>m_jacobi", "Y_W(1,x) = 1, module weak_assoc => module jacobi",
         {A::m_vacuum_prop, A::m_weak_assoc}, {A::m_jacobi}},
        {"m_vacuum+m_wsa=>m_jacobi", "Y_W(1,x) = 1, module weak_skew_assoc => module jacobi",
         {A::m_vacuum_prop, A::m_weak_skew_assoc}, {A::m_jacobi}},
        {"m_wc=>m_jacobi", "module weak_comm alone => module jacobi (not a theorem)", {A::m_weak_comm},
         {A::m_jacobi}, false},
    };
    return rows;
}

bool MainTheoremReport::consistent() const
{
    for (const auto& m : members) {
        for (const auto& c : m.comparisons) {
            if (c.verdict == "ASYMMETRY") {
                return false;
            }
        }
    }
    return std::all_of(rows.begin(), rows.end(), [](const valg::RowOutcome& r) { return r.violations.empty(); });
}

MainTheoremReport main_theorem_harness(const std::vector<ModuleEntry>& corpus, const CheckParams& params)
{
    MainTheoremReport out;
    std::vector<std::map<MAxiom, Status>> verdicts;
    for (const auto& e : corpus) {
        ModuleOutcome mo;
        mo.name = e.name;
        mo.reports = check_all(e.module, params);
        std::map<MAxiom, Status> v;
        for (std::size_t i = 0; i < all_maxioms().size(); ++i) {
            v[all_maxioms()[i]] = mo.reports[i].status;
        }
        auto pass = [&](MAxiom a) { return v.at(a) == Status::Pass; };
        auto compare = [&](std::string id, std::string anchor, std::optional<bool> premises) {
            Comparison c{std::move(id), std::move(anchor), premises, pass(MAxiom::m_jacobi), ""};
            c.verdict = !premises ? "SKIPPED" : *premises == *c.jacobi ? "AGREE" : "ASYMMETRY";
            mo.comparisons.push_back(std::move(c));
        };
        if (e.module.over().has_vacuum()) {
            bool minor = pass(MAxiom::m_vacuum_prop);
            compare("minor+m_wa<=>m_jacobi", "Y_W(1,x) = 1: module weak_assoc <=> module jacobi",
                    minor ? std::optional<bool>(pass(MAxiom::m_weak_assoc)) : std::nullopt);
            compare("minor+m_wsa<=>m_jacobi", "Y_W(1,x) = 1: module weak_skew_assoc <=> module jacobi",
                    minor ? std::optional<bool>(pass(MAxiom::m_weak_skew_assoc)) : std::nullopt);
        }
        int weak = pass(MAxiom::m_weak_comm) + pass(MAxiom::m_weak_assoc) + pass(MAxiom::m_weak_skew_assoc);
        compare("two-of-three<=>m_jacobi", "any two of module weak_comm, weak_assoc, weak_skew_assoc <=> module jacobi",
                weak >= 2);
        if (!e.breaks.empty()) {
            bool confirmed = false;
            for (MAxiom b : e.breaks) {
                auto i = static_cast<std::size_t>(std::find(all_maxioms().begin(), all_maxioms().end(), b) -
                                                  all_maxioms().begin());
                confirmed = confirmed || (mo.reports[i].status == Status::Fail && mo.reports[i].counterexample);
            }
            mo.break_confirmed = confirmed;
        }
        verdicts.push_back(std::move(v));
        out.members.push_back(std::move(mo));
    }
    for (const auto& row : module_rows()) {
        valg::RowOutcome ro;
        ro.id = row.id;
        ro.anchor = row.anchor;
        if (!row.evaluated) {
            ro.verdict = "UNTESTED";
            out.rows.push_back(std::move(ro));
            continue;
        }
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& v = verdicts[i];
            auto applicable = [&](MAxiom a) { return v.at(a) != Status::NotApplicable; };
            if (!std::all_of(row.premises.begin(), row.premises.end(), applicable) ||
                !std::all_of(row.conclusions.begin(), row.conclusions.end(), applicable)) {
                continue;
            }
            if (!std::all_of(row.premises.begin(), row.premises.end(),
                             [&](MAxiom a) { return v.at(a) == Status::Pass; })) {
                continue;
            }
            ro.tested.push_back(corpus[i].name);
            for (MAxiom c : row.conclusions) {
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

// Serialization ------------------------------------------------------------------------

json to_json(const ModuleEntry& e, const json& over)
{
    json breaks = json::array();
    for (MAxiom a : e.breaks) {
        breaks.push_back(to_string(a));
    }
    return {{"name", e.name},
            {"over", over},
            {"wbasis", e.module.wbasis()},
            {"wmodes", valg::to_json(e.module.table(), "w")},
            {"tags", e.tags},
            {"breaks", breaks}};
}

ModuleEntry module_from_json(const json& j, const std::string& name, const std::filesystem::path& base)
{
    try {
        if (!j.is_object() || !j.contains("over") || !j.contains("wbasis") || !j.contains("wmodes")) {
            throw ConfigError("module config needs over, wbasis and wmodes");
        }
        std::shared_ptr<const VertexStructure> over;
        if (j["over"].is_string()) {
            std::filesystem::path p = j["over"].get<std::string>();
            over = std::make_shared<const VertexStructure>(valg::load_entry(p.is_absolute() ? p : base / p).structure);
        } else {
            over = std::make_shared<const VertexStructure>(valg::structure_from_json(j["over"]));
        }
        ModuleEntry e;
        e.name = j.contains("name") ? j["name"].get<std::string>() : name;
        e.module = ModuleStructure(over, j["wbasis"].get<std::vector<std::string>>(),
                                   valg::table_from_json(j["wmodes"], "w"));
        if (j.contains("tags")) {
            e.tags = j["tags"].get<std::vector<std::string>>();
        }
        if (j.contains("breaks")) {
            for (const auto& b : j["breaks"]) {
                e.breaks.push_back(parse_maxiom(b.get<std::string>()));
            }
        }
        return e;
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("malformed module config: ") + ex.what());
    }
}

ModuleEntry load_module(const std::filesystem::path& path)
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
    return module_from_json(j, path.stem().string(), path.parent_path());
}

json to_json(const MainTheoremReport& r)
{
    json members = json::array();
    for (const auto& m : r.members) {
        json reports = json::array();
        for (const auto& p : m.reports) {
            reports.push_back(valg::to_json(p));
        }
        json comparisons = json::array();
        for (const auto& c : m.comparisons) {
            comparisons.push_back({{"id", c.id},
                                   {"anchor", c.anchor},
                                   {"premises", c.premises ? json(*c.premises) : json(nullptr)},
                                   {"jacobi", c.jacobi ? json(*c.jacobi) : json(nullptr)},
                                   {"verdict", c.verdict}});
        }
        members.push_back({{"name", m.name},
                           {"reports", reports},
                           {"comparisons", comparisons},
                           {"break_confirmed", m.break_confirmed ? json(*m.break_confirmed) : json(nullptr)}});
    }
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"id", row.id},
                        {"anchor", row.anchor},
                        {"verdict", row.verdict},
                        {"tested", row.tested},
                        {"violations", row.violations}});
    }
    return {{"members", members}, {"rows", rows}, {"consistent", r.consistent()}};
}

} // namespace vfva::vmod
