#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tilq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

// Solver cannot handle the coefficient structure (e.g. open loop with t-dependent dynamics).
class UnsupportedStructure : public Error {
public:
    using Error::Error;
};

class FeasibilityError : public Error {
public:
    using Error::Error;
};

class UnsupportedNoise : public Error {
public:
    using Error::Error;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> violations)
        : Error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

}  // namespace tilq
