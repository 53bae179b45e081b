#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfd {

// Base of every library error. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad extents, unparsable spec strings, unknown config keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Non-finite input data.
class DataError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, double fraction)
        : Error(what), fraction_(fraction) {}
    double fraction() const noexcept { return fraction_; }

private:
    double fraction_;
};

// A value or point outside the admissible range. `bound` carries the
// violated limit when there is one (for example M for the inverse of F).
class RangeError : public Error {
public:
    explicit RangeError(const std::string& what, double bound = 0.0,
                        std::vector<std::size_t> offenders = {})
        : Error(what), bound_(bound), offenders_(std::move(offenders)) {}
    double bound() const noexcept { return bound_; }
    const std::vector<std::size_t>& offenders() const noexcept { return offenders_; }

private:
    double bound_;
    std::vector<std::size_t> offenders_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

class CoverageError : public Error {
public:
    using Error::Error;
};

class PairingError : public Error {
public:
    using Error::Error;
};

class InvertibilityError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double masked_fraction)
        : Error(what), masked_fraction_(masked_fraction) {}
    double masked_fraction() const noexcept { return masked_fraction_; }

private:
    double masked_fraction_;
};

class StallError : public Error {
public:
    using Error::Error;
};

}  // namespace mfd
