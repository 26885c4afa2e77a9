#pragma once

// Statements (A)-(G) about a triple f, g, h of two-variable series and the
// implications between them, checked coefficient-wise on finite windows.
//
// Series of the triple are stored in variables y1, y2; f(y1, y2), g(y1, y2)
// and h(y1, y2) are each expected in V((y1))((y2)): lower truncated in y2,
// and for the generated instances upper truncated in y1.

#include "vfva/scalars.hpp"
#include "vfva/series.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vfva::elemprop {

using series::WindowedSeries;

// E: p(x1,x2) / ((x1-x2)^a x1^b x2^c)
// F: p(x0,x2) / (x0^a (x0+x2)^b x2^c)
// G: p(x0,x1) / (x0^a x1^b (-x0+x1)^c)
enum class FormKind { E, F, G };

// First: the binomial is expanded as listed above; Second: the paired form
// (-x2+x1), (x2+x0), (x1-x0) respectively.
enum class ExpansionMode { First, Second };

std::pair<std::string, std::string> form_vars(FormKind kind);
std::string to_string(FormKind kind);

struct RationalForm {
    FormKind kind = FormKind::E;
    // exponent pair in form_vars(kind) order -> coefficient
    std::map<std::pair<long, long>, VectorCoeff> numerator;
    long a = 0;
    long b = 0;
    long c = 0;

    friend bool operator==(const RationalForm&, const RationalForm&) = default;
};

struct Range {
    long lo = 0;
    long hi = 0;
};

// Exact expansion on the box u_range x v_range (form_vars order). Flags are
// set on the sides where the box contains the true support bound.
WindowedSeries expand_rational_form(const RationalForm& r, ExpansionMode mode, Range u_range, Range v_range);

struct TripleInstance {
    WindowedSeries f;
    WindowedSeries g;
    WindowedSeries h;
    // Present when the instance was built from rational forms.
    std::optional<RationalForm> e_form;
    std::optional<RationalForm> f_form;
    std::optional<RationalForm> g_form;
    std::uint64_t seed = 0;
};

struct Verdict {
    bool holds = true;
    // First failing coefficient, when !holds.
    expansion::Monomial monomial;
    VectorCoeff value;
    std::string detail;
};

Verdict check_A(const TripleInstance& t, long n);

enum class WitnessKind { M1, M2, M3 };

std::string to_string(WitnessKind k);

struct PoleWitness {
    long m = 0;
    WitnessKind kind = WitnessKind::M1;
};

// Whether the (B), (C) or (D) display vanishes for this m on [-n, n]^2.
Verdict pole_clears(const TripleInstance& t, WitnessKind kind, long m, long n);
std::optional<PoleWitness> find_pole_witness(const TripleInstance& t, WitnessKind kind, long m_max, long n);

// (E), (F), (G) against a given form on [-n, n]^2.
Verdict check_form(const TripleInstance& t, const RationalForm& r, long n);

// (iia)-(iic): the form built from a witness. The exponents are the least
// ones making the numerator a polynomial.
RationalForm reconstruct_form(const TripleInstance& t, const PoleWitness& w, long n);

// Clears the difference in exponents so that r is written over the
// denominators of target; nullopt when target's exponents are smaller.
std::optional<RationalForm> rewrite_over(const RationalForm& r, long a, long b, long c);

enum class Implication { ia, ib, ic, iia, iib, iic, iiia, iiib, iiic };

std::string to_string(Implication i);
Implication parse_implication(const std::string& s);
const std::vector<Implication>& all_implications();

struct ReplayResult {
    Implication which = Implication::ia;
    std::optional<PoleWitness> witness;
    std::optional<RationalForm> constructed;
    std::string detail;
};

// Checks the hypothesis first (HypothesisNotMet when it fails), then the
// conclusion (ConsistencyViolation when it fails).
ReplayResult replay_implication(Implication which, const TripleInstance& t, long n, long m_max);

struct GeneratorConfig {
    long max_degree = 4;
    long max_pole = 3;
    long max_terms = 6;
    long coeff_bound = 3;
    long window = 8;
    long m_max = 5;
    std::vector<std::string> basis{"e1", "e2"};
};

// Instance satisfying (E), (F) and (G) by construction.
TripleInstance generate_instance(std::uint64_t seed, const GeneratorConfig& cfg);

// Builds f, g, h from an E-form with windows sized for check_A and the
// witness searches at (n, m_max).
TripleInstance instance_from_form(const RationalForm& e_form, long n, long m_max);

// The F- and G-forms induced by an E-form.
RationalForm induced_f_form(const RationalForm& e_form);
RationalForm induced_g_form(const RationalForm& e_form);

nlohmann::json to_json(const RationalForm& r);
nlohmann::json to_json(const Verdict& v);

} // namespace vfva::elemprop
