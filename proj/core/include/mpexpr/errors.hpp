#pragma once

#include <stdexcept>
#include <string>

namespace mpexpr {

/// Malformed user input: files, expressions, flags, out-of-range dimensions.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// An internal invariant failed (certificate self-check, tableau corruption).
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace mpexpr
