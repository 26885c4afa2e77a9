#pragma once

#include <stdexcept>
#include <string>

namespace vfva {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// A coefficient was requested outside the region where a series is known.
class WindowUnderflow : public Error {
public:
    using Error::Error;
};

// A product (or substitution) whose coefficients cannot be certified finite.
class SummabilityUnknown : public Error {
public:
    using Error::Error;
};

class UnsupportedRewrite : public Error {
public:
    using Error::Error;
};

class SubstitutionRefused : public Error {
public:
    using Error::Error;
};

class ResidueRefused : public Error {
public:
    using Error::Error;
};

class ProverFailure : public Error {
public:
    using Error::Error;
};

class ConstructionRefused : public Error {
public:
    using Error::Error;
};

class MissingVacuum : public Error {
public:
    using Error::Error;
};

class HypothesisNotMet : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Premises verified but conclusion failed: either a theorem or the checker
// is wrong. Always fatal.
class ConsistencyViolation : public Error {
public:
    using Error::Error;
};

} // namespace vfva
