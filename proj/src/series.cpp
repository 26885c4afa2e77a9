#include "vfva/series.hpp"

#include "vfva/errors.hpp"

#include <algorithm>
#include <climits>

namespace vfva::series {

namespace {

constexpr long kNegInf = LONG_MIN / 4;
constexpr long kPosInf = LONG_MAX / 4;

int parity_sign(long n)
{
    return (n % 2 == 0) ? 1 : -1;
}

std::string render_key(const std::vector<std::string>& vars, const WindowedSeries::Key& key)
{
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (!out.empty()) {
            out += " ";
        }
        out += vars[i] + "^" + std::to_string(key[i]);
    }
    return out.empty() ? "1" : out;
}

// Visits every key of a box.
template <typename F>
void for_each_key(const std::vector<Axis>& axes, F&& fn)
{
    for (const auto& a : axes) {
        if (a.lo > a.hi) {
            return;
        }
    }
    WindowedSeries::Key key(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
        key[i] = axes[i].lo;
    }
    while (true) {
        fn(key);
        std::size_t i = 0;
        for (; i < axes.size(); ++i) {
            if (++key[i] <= axes[i].hi) {
                break;
            }
            key[i] = axes[i].lo;
        }
        if (i == axes.size()) {
            return;
        }
    }
}

bool is_scalar(const VectorCoeff& c)
{
    return c.size() == 1 && c.entries().begin()->first == kScalarId;
}

Axis point_axis(const std::string& var)
{
    return Axis{var, 0, 0, true, true};
}

} // namespace

std::string to_string(Shape s)
{
    switch (s) {
    case Shape::Finite:
        return "finite";
    case Shape::LowerTruncated:
        return "lower-truncated";
    case Shape::UpperTruncated:
        return "upper-truncated";
    case Shape::Unknown:
        return "unknown";
    }
    return "unknown";
}

// WindowedSeries ----------------------------------------------------------------

WindowedSeries::WindowedSeries(std::vector<Axis> axes) : axes_(std::move(axes))
{
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        for (std::size_t j = i + 1; j < axes_.size(); ++j) {
            if (axes_[i].var == axes_[j].var) {
                throw DomainError("duplicate series variable '" + axes_[i].var + "'");
            }
        }
    }
}

WindowedSeries WindowedSeries::polynomial(std::vector<std::string> vars, const std::map<Monomial, VectorCoeff>& terms)
{
    std::vector<Axis> axes;
    for (const auto& v : vars) {
        Axis a{v, kPosInf, kNegInf, true, true};
        for (const auto& [m, c] : terms) {
            if (c.is_zero()) {
                continue;
            }
            auto it = m.find(v);
            long e = it == m.end() ? 0 : it->second;
            a.lo = std::min(a.lo, e);
            a.hi = std::max(a.hi, e);
        }
        if (a.lo > a.hi) {
            a.lo = a.hi = 0;
        }
        axes.push_back(a);
    }
    WindowedSeries s(std::move(axes));
    for (const auto& [m, c] : terms) {
        for (const auto& [v, e] : m) {
            if (e != 0 && !s.has_var(v)) {
                throw DomainError("monomial uses undeclared variable '" + v + "'");
            }
        }
        s.add(s.key_of(m), c);
    }
    return s;
}

std::vector<std::string> WindowedSeries::vars() const
{
    std::vector<std::string> out;
    for (const auto& a : axes_) {
        out.push_back(a.var);
    }
    return out;
}

std::size_t WindowedSeries::index_of(const std::string& var) const
{
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i].var == var) {
            return i;
        }
    }
    throw DomainError("series has no variable '" + var + "'");
}

const Axis& WindowedSeries::axis(const std::string& var) const
{
    return axes_[index_of(var)];
}

bool WindowedSeries::has_var(const std::string& var) const
{
    return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.var == var; });
}

Shape WindowedSeries::shape(const std::string& var) const
{
    const Axis& a = axis(var);
    if (a.lower_exact && a.upper_exact) {
        return Shape::Finite;
    }
    if (a.lower_exact) {
        return Shape::LowerTruncated;
    }
    if (a.upper_exact) {
        return Shape::UpperTruncated;
    }
    return Shape::Unknown;
}

bool WindowedSeries::in_window(const Key& key) const
{
    if (key.size() != axes_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (key[i] < axes_[i].lo || key[i] > axes_[i].hi) {
            return false;
        }
    }
    return true;
}

void WindowedSeries::set(const Key& key, const VectorCoeff& c)
{
    if (!in_window(key)) {
        throw DomainError("coefficient key outside the series window");
    }
    if (c.is_zero()) {
        coeffs_.erase(key);
    } else {
        coeffs_[key] = c;
    }
}

void WindowedSeries::add(const Key& key, const VectorCoeff& c)
{
    if (c.is_zero()) {
        return;
    }
    if (!in_window(key)) {
        throw DomainError("coefficient key outside the series window");
    }
    auto [it, inserted] = coeffs_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            coeffs_.erase(it);
        }
    }
}

std::optional<VectorCoeff> WindowedSeries::known(const Key& key) const
{
    bool inside = true;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const Axis& a = axes_[i];
        if (key[i] < a.lo) {
            if (a.lower_exact) {
                return VectorCoeff{};
            }
            inside = false;
        } else if (key[i] > a.hi) {
            if (a.upper_exact) {
                return VectorCoeff{};
            }
            inside = false;
        }
    }
    if (!inside) {
        return std::nullopt;
    }
    auto it = coeffs_.find(key);
    return it == coeffs_.end() ? VectorCoeff{} : it->second;
}

VectorCoeff WindowedSeries::at(const Key& key) const
{
    auto c = known(key);
    if (!c) {
        throw WindowUnderflow("coefficient of " + render_key(vars(), key) + " lies outside the known window");
    }
    return *c;
}

WindowedSeries::Key WindowedSeries::key_of(const Monomial& m) const
{
    Key key(axes_.size(), 0);
    for (const auto& [v, e] : m) {
        if (has_var(v)) {
            key[index_of(v)] = e;
        } else if (e != 0) {
            throw DomainError("series has no variable '" + v + "'");
        }
    }
    return key;
}

Monomial WindowedSeries::monomial_of(const Key& key) const
{
    Monomial m;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (key[i] != 0) {
            m[axes_[i].var] = key[i];
        }
    }
    return m;
}

WindowedSeries WindowedSeries::restrict(const std::vector<Axis>& window) const
{
    if (window.size() != axes_.size()) {
        throw DomainError("restrict: window arity mismatch");
    }
    std::vector<Axis> axes;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const Axis& old = axes_[i];
        const Axis& want = window[i];
        if (want.var != old.var) {
            throw DomainError("restrict: variable order mismatch");
        }
        if ((want.lo < old.lo && !old.lower_exact) || (want.hi > old.hi && !old.upper_exact)) {
            throw WindowUnderflow("restrict: window for " + old.var + " exceeds the known range [" +
                                  std::to_string(old.lo) + ", " + std::to_string(old.hi) + "]");
        }
        axes.push_back(Axis{old.var, want.lo, want.hi, old.lower_exact && want.lo <= old.lo,
                            old.upper_exact && want.hi >= old.hi});
    }
    WindowedSeries out(std::move(axes));
    for (const auto& [k, c] : coeffs_) {
        if (out.in_window(k)) {
            out.coeffs_.emplace(k, c);
        }
    }
    return out;
}

// Arithmetic ---------------------------------------------------------------------

WindowedSeries multiply(const WindowedSeries& a, const WindowedSeries& b, const WindowRequest& request)
{
    std::vector<std::string> vars = a.vars();
    for (const auto& v : b.vars()) {
        if (!a.has_var(v)) {
            vars.push_back(v);
        }
    }
    std::vector<Axis> axes;
    for (const auto& v : vars) {
        Axis x = a.has_var(v) ? a.axis(v) : point_axis(v);
        Axis y = b.has_var(v) ? b.axis(v) : point_axis(v);
        if (!((x.lower_exact || y.upper_exact) && (x.upper_exact || y.lower_exact))) {
            throw SummabilityUnknown("product in " + v + " is not certified finite: shapes " +
                                     (x.lower_exact ? "L" : "-") + (x.upper_exact ? "U" : "-") + " and " +
                                     (y.lower_exact ? "L" : "-") + (y.upper_exact ? "U" : "-"));
        }
        // Range of exponents m for which every contributing pair is determined.
        long ok_lo = kNegInf;
        long ok_hi = kPosInf;
        if (!x.lower_exact) {
            ok_lo = std::max(ok_lo, x.lo + y.hi);
        }
        if (!y.lower_exact) {
            ok_lo = std::max(ok_lo, y.lo + x.hi);
        }
        if (!x.upper_exact) {
            ok_hi = std::min(ok_hi, x.hi + y.lo);
        }
        if (!y.upper_exact) {
            ok_hi = std::min(ok_hi, y.hi + x.lo);
        }
        bool lower = x.lower_exact && y.lower_exact;
        bool upper = x.upper_exact && y.upper_exact;
        long support_lo = lower ? x.lo + y.lo : kNegInf;
        long support_hi = upper ? x.hi + y.hi : kPosInf;
        Axis out{v, 0, 0, false, false};
        if (auto it = request.find(v); it != request.end()) {
            out.lo = it->second.first;
            out.hi = it->second.second;
            if (out.lo < ok_lo || out.hi > ok_hi) {
                throw WindowUnderflow("product in " + v + " is determined only on [" + std::to_string(ok_lo) + ", " +
                                      std::to_string(ok_hi) + "]");
            }
            out.lower_exact = lower && out.lo <= support_lo;
            out.upper_exact = upper && out.hi >= support_hi;
        } else {
            out.lo = lower ? support_lo : ok_lo;
            out.hi = upper ? support_hi : ok_hi;
            if (out.lo == kNegInf || out.hi == kPosInf) {
                throw WindowUnderflow("product in " + v + " has unbounded determined range; request a window");
            }
            out.lower_exact = lower;
            out.upper_exact = upper;
        }
        if (out.lo > out.hi) {
            throw WindowUnderflow("product in " + v + " has an empty determined window");
        }
        axes.push_back(out);
    }
    WindowedSeries result(axes);
    auto embed = [&](const WindowedSeries& s) {
        std::vector<int> slot;
        for (const auto& v : vars) {
            int idx = -1;
            const auto& sv = s.axes();
            for (std::size_t i = 0; i < sv.size(); ++i) {
                if (sv[i].var == v) {
                    idx = static_cast<int>(i);
                }
            }
            slot.push_back(idx);
        }
        return slot;
    };
    auto sa = embed(a);
    auto sb = embed(b);
    WindowedSeries::Key key(vars.size());
    for (const auto& [ka, ca] : a.data()) {
        for (const auto& [kb, cb] : b.data()) {
            for (std::size_t i = 0; i < vars.size(); ++i) {
                key[i] = (sa[i] >= 0 ? ka[static_cast<std::size_t>(sa[i])] : 0) +
                         (sb[i] >= 0 ? kb[static_cast<std::size_t>(sb[i])] : 0);
            }
            if (!result.in_window(key)) {
                continue;
            }
            VectorCoeff prod;
            if (is_scalar(ca)) {
                prod = ca[kScalarId] * cb;
            } else if (is_scalar(cb)) {
                prod = cb[kScalarId] * ca;
            } else {
                throw DomainError("multiply: at least one factor must be scalar-valued");
            }
            result.add(key, prod);
        }
    }
    return result;
}

WindowedSeries scale(const WindowedSeries& s, const Rational& c)
{
    WindowedSeries out(s.axes());
    for (const auto& [k, v] : s.data()) {
        out.add(k, c * v);
    }
    return out;
}

WindowedSeries add(const WindowedSeries& a, const WindowedSeries& b)
{
    if (a.vars() != b.vars()) {
        throw DomainError("add: operands must have the same variables in the same order");
    }
    std::vector<Axis> axes;
    for (std::size_t i = 0; i < a.arity(); ++i) {
        const Axis& x = a.axes()[i];
        const Axis& y = b.axes()[i];
        Axis out{x.var, 0, 0, x.lower_exact && y.lower_exact, x.upper_exact && y.upper_exact};
        if (x.lower_exact && y.lower_exact) {
            out.lo = std::min(x.lo, y.lo);
        } else if (x.lower_exact) {
            out.lo = y.lo;
        } else if (y.lower_exact) {
            out.lo = x.lo;
        } else {
            out.lo = std::max(x.lo, y.lo);
        }
        if (x.upper_exact && y.upper_exact) {
            out.hi = std::max(x.hi, y.hi);
        } else if (x.upper_exact) {
            out.hi = y.hi;
        } else if (y.upper_exact) {
            out.hi = x.hi;
        } else {
            out.hi = std::min(x.hi, y.hi);
        }
        if (out.lo > out.hi) {
            throw WindowUnderflow("add: operand windows in " + x.var + " do not overlap");
        }
        axes.push_back(out);
    }
    WindowedSeries out(axes);
    for (const auto* s : {&a, &b}) {
        for (const auto& [k, c] : s->data()) {
            if (out.in_window(k)) {
                out.add(k, c);
            }
        }
    }
    return out;
}

WindowedSeries subtract(const WindowedSeries& a, const WindowedSeries& b)
{
    return add(a, scale(b, -1));
}

WindowedSeries taylor_substitute(const WindowedSeries& s, const std::string& var, const SignedVar& head,
                                 const SignedVar& tail, const std::vector<Axis>& out)
{
    if (!s.has_var(var)) {
        throw DomainError("taylor_substitute: series has no variable '" + var + "'");
    }
    if (tail.var == head.var || tail.var == var) {
        throw DomainError("taylor_substitute: tail variable must differ from the substituted variable and the head");
    }
    if (head.var != var && s.has_var(head.var)) {
        throw DomainError("taylor_substitute: head variable '" + head.var + "' already occurs in the series");
    }
    bool tail_fresh = !s.has_var(tail.var);
    if (!tail_fresh && !s.axis(tail.var).lower_exact) {
        throw SummabilityUnknown("taylor_substitute: " + tail.var + " is not lower truncated");
    }

    std::vector<std::string> vars = s.vars();
    std::size_t var_pos = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i] == var) {
            var_pos = i;
            vars[i] = head.var;
        }
    }
    if (tail_fresh) {
        vars.push_back(tail.var);
    }
    std::vector<Axis> axes;
    for (const auto& v : vars) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Axis& a) { return a.var == v; });
        if (it == out.end()) {
            throw DomainError("taylor_substitute: output window lacks variable '" + v + "'");
        }
        Axis a{v, it->lo, it->hi, false, false};
        if (v == head.var) {
            const Axis& src = s.axis(var);
            a.upper_exact = src.upper_exact && a.hi >= src.hi;
        } else if (v == tail.var) {
            long bound = tail_fresh ? 0 : s.axis(v).lo;
            a.lower_exact = a.lo <= bound;
        } else {
            const Axis& src = s.axis(v);
            a.lower_exact = src.lower_exact && a.lo <= src.lo;
            a.upper_exact = src.upper_exact && a.hi >= src.hi;
        }
        axes.push_back(a);
    }
    WindowedSeries result(axes);
    std::size_t head_pos = var_pos;
    std::size_t tail_out = static_cast<std::size_t>(
        std::find(vars.begin(), vars.end(), tail.var) - vars.begin());
    long tail_floor = tail_fresh ? 0 : s.axis(tail.var).lo;

    for_each_key(axes, [&](const WindowedSeries::Key& m) {
        long k_max = m[tail_out] - tail_floor;
        long k_min = tail_fresh ? m[tail_out] : 0;
        if (k_max < 0) {
            return;
        }
        VectorCoeff total;
        WindowedSeries::Key src(s.arity());
        for (long k = k_min; k <= k_max; ++k) {
            for (std::size_t i = 0; i < s.arity(); ++i) {
                src[i] = m[i];
            }
            long n = m[head_pos] + k;
            src[var_pos] = n;
            if (!tail_fresh) {
                src[tail_out] = m[tail_out] - k;
            }
            auto c = s.known(src);
            if (!c) {
                throw WindowUnderflow("taylor_substitute: needs the coefficient of " + render_key(s.vars(), src) +
                                      " outside the known window");
            }
            if (c->is_zero()) {
                continue;
            }
            Rational f = binom(n, k);
            if (head.sign < 0) {
                f *= parity_sign(n - k);
            }
            if (tail.sign < 0) {
                f *= parity_sign(k);
            }
            total.axpy(f, *c);
        }
        result.add(m, total);
    });
    return result;
}

WindowedSeries derivative(const WindowedSeries& s, const std::string& var)
{
    std::vector<Axis> axes = s.axes();
    std::size_t i = 0;
    for (; i < axes.size() && axes[i].var != var; ++i) {
    }
    if (i == axes.size()) {
        throw DomainError("derivative: series has no variable '" + var + "'");
    }
    axes[i].lo -= 1;
    axes[i].hi -= 1;
    WindowedSeries out(axes);
    for (const auto& [k, c] : s.data()) {
        auto nk = k;
        nk[i] -= 1;
        out.add(nk, Rational(k[i]) * c);
    }
    return out;
}

WindowedSeries residue(const WindowedSeries& s, const std::string& var)
{
    std::vector<Axis> axes;
    std::size_t i = 0;
    for (std::size_t j = 0; j < s.arity(); ++j) {
        if (s.axes()[j].var == var) {
            i = j;
        } else {
            axes.push_back(s.axes()[j]);
        }
    }
    const Axis& a = s.axis(var);
    WindowedSeries out(axes);
    if (-1 < a.lo || -1 > a.hi) {
        bool zero = (-1 < a.lo && a.lower_exact) || (-1 > a.hi && a.upper_exact);
        if (!zero) {
            throw WindowUnderflow("residue: the " + var + "^-1 coefficients lie outside the known window");
        }
        return out;
    }
    for (const auto& [k, c] : s.data()) {
        if (k[i] != -1) {
            continue;
        }
        auto nk = k;
        nk.erase(nk.begin() + static_cast<long>(i));
        out.add(nk, c);
    }
    return out;
}

VectorCoeff coeff(const WindowedSeries& s, const Monomial& m)
{
    return s.at(s.key_of(m));
}

WindowedSeries exp_endo(const LinearMap& d, const std::string& x, const VectorCoeff& v)
{
    if (d.dim() > 0 && d.nilpotency_index() == 0) {
        throw SummabilityUnknown("exp_endo: operator is not nilpotent, the exponential series is infinite");
    }
    std::vector<std::pair<long, VectorCoeff>> terms;
    VectorCoeff power = v;
    for (long k = 0; !power.is_zero(); ++k) {
        Rational inv{1, factorial(k)};
        inv.canonicalize();
        terms.emplace_back(k, inv * power);
        power = d.apply(power);
    }
    long deg = terms.empty() ? 0 : terms.back().first;
    WindowedSeries out({Axis{x, 0, deg, true, true}});
    for (const auto& [k, c] : terms) {
        out.add({k}, c);
    }
    return out;
}

// Serialization ----------------------------------------------------------------------

nlohmann::json to_json(const WindowedSeries& s)
{
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : s.axes()) {
        axes.push_back({{"var", a.var},
                        {"lo", a.lo},
                        {"hi", a.hi},
                        {"lower_exact", a.lower_exact},
                        {"upper_exact", a.upper_exact},
                        {"shape", to_string(s.shape(a.var))}});
    }
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, c] : s.data()) {
        nlohmann::json mono = nlohmann::json::object();
        for (std::size_t i = 0; i < k.size(); ++i) {
            mono[s.axes()[i].var] = k[i];
        }
        nlohmann::json coeff = nlohmann::json::object();
        for (const auto& [id, r] : c.entries()) {
            coeff[id] = vfva::to_string(r);
        }
        terms.push_back({{"monomial", mono}, {"coeff", coeff}});
    }
    return {{"axes", axes}, {"terms", terms}};
}

WindowedSeries series_from_json(const nlohmann::json& j)
{
    std::vector<Axis> axes;
    for (const auto& aj : j.at("axes")) {
        axes.push_back(Axis{aj.at("var").get<std::string>(), aj.at("lo").get<long>(), aj.at("hi").get<long>(),
                            aj.value("lower_exact", false), aj.value("upper_exact", false)});
    }
    WindowedSeries s(axes);
    for (const auto& tj : j.at("terms")) {
        Monomial m;
        for (const auto& [v, e] : tj.at("monomial").items()) {
            m[v] = e.get<long>();
        }
        VectorCoeff c;
        for (const auto& [id, r] : tj.at("coeff").items()) {
            c.add(id, parse_rational(r.get<std::string>()));
        }
        auto key = s.key_of(m);
        if (!s.in_window(key)) {
            throw ConfigError("series term outside its declared window");
        }
        s.add(key, c);
    }
    return s;
}

std::string to_string(const WindowedSeries& s)
{
    std::string out;
    for (const auto& [k, c] : s.data()) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "[" + vfva::to_string(c) + "] " + render_key(s.vars(), k);
    }
    return out.empty() ? "0" : out;
}

} // namespace vfva::series
