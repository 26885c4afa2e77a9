#pragma once

// Windowed multivariate Laurent series with vector coefficients.
//
// Coefficients are stored exactly on a box of exponents (the window). Outside
// the box a coefficient is known to be zero only on a side whose flag is set:
// lower_exact for variable v means every nonzero coefficient has v-exponent
// >= lo, upper_exact means <= hi. Everything else is unknown, and any request
// for an unknown coefficient raises WindowUnderflow.

#include "vfva/expansion.hpp"
#include "vfva/scalars.hpp"

#include "json.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vfva::series {

using expansion::Monomial;
using expansion::SignedVar;

// Basis id of scalar-valued series. A product needs one scalar factor.
inline const std::string kScalarId = "";

inline VectorCoeff scalar(const Rational& c)
{
    return VectorCoeff::basis(kScalarId, c);
}

struct Axis {
    std::string var;
    long lo = 0;
    long hi = 0;
    bool lower_exact = false;
    bool upper_exact = false;

    friend bool operator==(const Axis&, const Axis&) = default;
};

enum class Shape { Finite, LowerTruncated, UpperTruncated, Unknown };

std::string to_string(Shape s);

class WindowedSeries {
public:
    using Key = std::vector<long>;

    WindowedSeries() = default;
    explicit WindowedSeries(std::vector<Axis> axes);

    // Laurent polynomial: exact in every variable, window = support hull
    // (or {0} for the zero series).
    static WindowedSeries polynomial(std::vector<std::string> vars, const std::map<Monomial, VectorCoeff>& terms);

    const std::vector<Axis>& axes() const { return axes_; }
    std::vector<std::string> vars() const;
    const Axis& axis(const std::string& var) const;
    bool has_var(const std::string& var) const;
    std::size_t arity() const { return axes_.size(); }
    Shape shape(const std::string& var) const;

    // Writes a coefficient; the key must lie inside the window.
    void set(const Key& key, const VectorCoeff& c);
    void add(const Key& key, const VectorCoeff& c);
    const std::map<Key, VectorCoeff>& data() const { return coeffs_; }

    bool in_window(const Key& key) const;
    // Coefficient if determined by the stored data and flags.
    std::optional<VectorCoeff> known(const Key& key) const;
    // Throws WindowUnderflow when not determined.
    VectorCoeff at(const Key& key) const;

    Key key_of(const Monomial& m) const;
    Monomial monomial_of(const Key& key) const;

    // Same data with a smaller window; flags survive only when the bound
    // they certify is still inside the window.
    WindowedSeries restrict(const std::vector<Axis>& window) const;

    friend bool operator==(const WindowedSeries&, const WindowedSeries&) = default;

private:
    std::size_t index_of(const std::string& var) const;

    std::vector<Axis> axes_;
    std::map<Key, VectorCoeff> coeffs_;
};

// Requested output window: per-variable [lo, hi]; unspecified variables use
// the natural window derived from the operands.
using WindowRequest = std::map<std::string, std::pair<long, long>>;

// Exact product. A variable missing from one operand is treated as exponent 0.
// Throws SummabilityUnknown when some coefficient would be an infinite sum and
// WindowUnderflow when a requested coefficient depends on unknown data.
WindowedSeries multiply(const WindowedSeries& a, const WindowedSeries& b, const WindowRequest& request = {});

// Sums use the largest window on which both operands are determined.
WindowedSeries scale(const WindowedSeries& s, const Rational& c);
WindowedSeries add(const WindowedSeries& a, const WindowedSeries& b);
WindowedSeries subtract(const WindowedSeries& a, const WindowedSeries& b);

// Replaces var by (head + tail), expanded in nonnegative powers of tail.
// head.var is var itself or a variable absent from s; tail.var is absent from
// s or lower-truncated in s. The result is computed on `out`, which must be
// determined by the stored window (else WindowUnderflow naming the monomial).
WindowedSeries taylor_substitute(const WindowedSeries& s, const std::string& var, const SignedVar& head,
                                 const SignedVar& tail, const std::vector<Axis>& out);

WindowedSeries derivative(const WindowedSeries& s, const std::string& var);
WindowedSeries residue(const WindowedSeries& s, const std::string& var);
VectorCoeff coeff(const WindowedSeries& s, const Monomial& m);

// sum_k x^k D^k v / k!; refused for non-nilpotent D.
WindowedSeries exp_endo(const LinearMap& d, const std::string& x, const VectorCoeff& v);

nlohmann::json to_json(const WindowedSeries& s);
WindowedSeries series_from_json(const nlohmann::json& j);

std::string to_string(const WindowedSeries& s);

} // namespace vfva::series
