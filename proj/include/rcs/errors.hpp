#pragma once

#include <stdexcept>
#include <string>

namespace rcs {

// File/document parsing problems. CLI exit code 3.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Semantic violations (disconnected subsets, bad rates, mismatched inputs). CLI exit code 3.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Resource limits (qubit ceiling, infeasible memory constraint). CLI exit code 4.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rcs
