#pragma once

#include <gmpxx.h>

#include <compare>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vfva {

// GMP keeps mpq_class canonical (lowest terms, positive denominator, 0/1)
// after every arithmetic operation; parse_rational canonicalizes input.
using Integer = mpz_class;
using Rational = mpq_class;

// "p/q", or "p" when q == 1.
std::string to_string(const Rational& r);
Rational parse_rational(std::string_view text);

// Generalized binomial coefficient n(n-1)...(n-k+1)/k! for any integer n.
Rational binom(long n, long k);

// Falling factorial n(n-1)...(n-k+1), k >= 0.
Integer falling(long n, long k);

Integer factorial(long k);

// A vector in a finite-dimensional space with named basis elements.
// Zero entries are never stored.
class VectorCoeff {
public:
    using Map = std::map<std::string, Rational>;

    VectorCoeff() = default;
    VectorCoeff(std::initializer_list<std::pair<const std::string, Rational>> init);
    explicit VectorCoeff(Map entries);

    static VectorCoeff basis(const std::string& id, const Rational& c = 1);

    bool is_zero() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const Map& entries() const { return entries_; }
    Rational operator[](const std::string& id) const;

    // this += c * other
    void axpy(const Rational& c, const VectorCoeff& other);
    void add(const std::string& id, const Rational& c);

    VectorCoeff& operator+=(const VectorCoeff& o);
    VectorCoeff& operator-=(const VectorCoeff& o);
    VectorCoeff& operator*=(const Rational& c);

    friend VectorCoeff operator+(VectorCoeff a, const VectorCoeff& b) { return a += b; }
    friend VectorCoeff operator-(VectorCoeff a, const VectorCoeff& b) { return a -= b; }
    friend VectorCoeff operator*(const Rational& c, VectorCoeff v) { return v *= c; }
    friend VectorCoeff operator-(VectorCoeff v) { return v *= Rational(-1); }

    friend bool operator==(const VectorCoeff&, const VectorCoeff&) = default;

private:
    Map entries_;
};

VectorCoeff linear_combine(std::span<const std::pair<Rational, VectorCoeff>> terms);

std::string to_string(const VectorCoeff& v);

// Square matrix over Q acting on an ordered basis; column j is the image of
// basis element j.
class LinearMap {
public:
    LinearMap() = default;
    explicit LinearMap(std::vector<std::string> basis);

    const std::vector<std::string>& basis() const { return basis_; }
    std::size_t dim() const { return basis_.size(); }

    void set_image(const std::string& id, const VectorCoeff& image);
    const VectorCoeff& image(const std::string& id) const;
    VectorCoeff apply(const VectorCoeff& v) const;

    bool is_zero() const;
    LinearMap compose(const LinearMap& inner) const;
    // Smallest k with this^k == 0, or 0 if the map is not nilpotent.
    std::size_t nilpotency_index() const;

    friend bool operator==(const LinearMap&, const LinearMap&) = default;

private:
    std::size_t index_of(const std::string& id) const;

    std::vector<std::string> basis_;
    std::vector<VectorCoeff> images_;
};

// Rank of a list of vectors (exact Gaussian elimination).
std::size_t rank(const std::vector<VectorCoeff>& rows);

} // namespace vfva
