#include "vfva/scalars.hpp"

#include "vfva/errors.hpp"

#include <algorithm>
#include <cctype>

namespace vfva {

std::string to_string(const Rational& r)
{
    if (r.get_den() == 1) {
        return r.get_num().get_str();
    }
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational parse_rational(std::string_view text)
{
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) {
        throw ConfigError("empty rational literal");
    }
    auto valid_int = [](std::string_view p) {
        std::size_t i = (!p.empty() && (p[0] == '-' || p[0] == '+')) ? 1 : 0;
        if (i >= p.size()) {
            return false;
        }
        return std::all_of(p.begin() + static_cast<long>(i), p.end(),
                           [](unsigned char c) { return std::isdigit(c); });
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!num.empty() && num[0] == '+') {
        num.erase(0, 1);
    }
    if (!valid_int(num) || !valid_int(den)) {
        throw ConfigError("malformed rational literal '" + std::string(text) + "'");
    }
    Rational r{Integer(num), Integer(den)};
    if (r.get_den() == 0) {
        throw ConfigError("zero denominator in '" + std::string(text) + "'");
    }
    r.canonicalize();
    return r;
}

Integer falling(long n, long k)
{
    Integer out = 1;
    for (long i = 0; i < k; ++i) {
        out *= n - i;
    }
    return out;
}

Integer factorial(long k)
{
    Integer out = 1;
    for (long i = 2; i <= k; ++i) {
        out *= i;
    }
    return out;
}

Rational binom(long n, long k)
{
    if (k < 0) {
        throw DomainError("binom: k must be nonnegative, got " + std::to_string(k));
    }
    Rational r{falling(n, k), factorial(k)};
    r.canonicalize();
    return r;
}

// VectorCoeff ---------------------------------------------------------------

VectorCoeff::VectorCoeff(std::initializer_list<std::pair<const std::string, Rational>> init)
{
    for (const auto& [id, c] : init) {
        add(id, c);
    }
}

VectorCoeff::VectorCoeff(Map entries)
{
    for (auto& [id, c] : entries) {
        add(id, c);
    }
}

VectorCoeff VectorCoeff::basis(const std::string& id, const Rational& c)
{
    VectorCoeff v;
    v.add(id, c);
    return v;
}

Rational VectorCoeff::operator[](const std::string& id) const
{
    auto it = entries_.find(id);
    return it == entries_.end() ? Rational(0) : it->second;
}

void VectorCoeff::add(const std::string& id, const Rational& c)
{
    if (c == 0) {
        return;
    }
    auto [it, inserted] = entries_.try_emplace(id, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            entries_.erase(it);
        }
    }
}

void VectorCoeff::axpy(const Rational& c, const VectorCoeff& other)
{
    if (c == 0) {
        return;
    }
    for (const auto& [id, x] : other.entries_) {
        add(id, c * x);
    }
}

VectorCoeff& VectorCoeff::operator+=(const VectorCoeff& o)
{
    for (const auto& [id, x] : o.entries_) {
        add(id, x);
    }
    return *this;
}

VectorCoeff& VectorCoeff::operator-=(const VectorCoeff& o)
{
    for (const auto& [id, x] : o.entries_) {
        add(id, -x);
    }
    return *this;
}

VectorCoeff& VectorCoeff::operator*=(const Rational& c)
{
    if (c == 0) {
        entries_.clear();
        return *this;
    }
    for (auto& [id, x] : entries_) {
        x *= c;
    }
    return *this;
}

VectorCoeff linear_combine(std::span<const std::pair<Rational, VectorCoeff>> terms)
{
    VectorCoeff out;
    for (const auto& [c, v] : terms) {
        out.axpy(c, v);
    }
    return out;
}

std::string to_string(const VectorCoeff& v)
{
    if (v.is_zero()) {
        return "0";
    }
    std::string out;
    for (const auto& [id, c] : v.entries()) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "(" + to_string(c) + ")" + id;
    }
    return out;
}

// LinearMap -----------------------------------------------------------------

LinearMap::LinearMap(std::vector<std::string> basis)
    : basis_(std::move(basis)), images_(basis_.size())
{
}

std::size_t LinearMap::index_of(const std::string& id) const
{
    auto it = std::find(basis_.begin(), basis_.end(), id);
    if (it == basis_.end()) {
        throw DomainError("basis element '" + id + "' not in map basis");
    }
    return static_cast<std::size_t>(it - basis_.begin());
}

void LinearMap::set_image(const std::string& id, const VectorCoeff& image)
{
    images_[index_of(id)] = image;
}

const VectorCoeff& LinearMap::image(const std::string& id) const
{
    return images_[index_of(id)];
}

VectorCoeff LinearMap::apply(const VectorCoeff& v) const
{
    VectorCoeff out;
    for (const auto& [id, c] : v.entries()) {
        out.axpy(c, image(id));
    }
    return out;
}

bool LinearMap::is_zero() const
{
    return std::all_of(images_.begin(), images_.end(), [](const VectorCoeff& v) { return v.is_zero(); });
}

LinearMap LinearMap::compose(const LinearMap& inner) const
{
    LinearMap out(inner.basis_);
    for (std::size_t i = 0; i < inner.basis_.size(); ++i) {
        out.images_[i] = apply(inner.images_[i]);
    }
    return out;
}

std::size_t LinearMap::nilpotency_index() const
{
    LinearMap power = *this;
    for (std::size_t k = 1; k <= dim() + 1; ++k) {
        if (power.is_zero()) {
            return k;
        }
        power = compose(power);
    }
    return 0;
}

std::size_t rank(const std::vector<VectorCoeff>& rows)
{
    // Row-reduce keyed by pivot basis id.
    std::vector<std::pair<std::string, VectorCoeff>> pivots;
    std::size_t r = 0;
    for (VectorCoeff v : rows) {
        for (const auto& [pid, p] : pivots) {
            Rational c = v[pid];
            if (c != 0) {
                v.axpy(-c, p);
            }
        }
        if (v.is_zero()) {
            continue;
        }
        auto [id, lead] = *v.entries().begin();
        v *= Rational(1) / lead;
        for (auto& [pid, p] : pivots) {
            Rational c = p[id];
            if (c != 0) {
                p.axpy(-c, v);
            }
        }
        pivots.emplace_back(id, std::move(v));
        ++r;
    }
    return r;
}

} // namespace vfva
