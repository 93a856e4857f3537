#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Bad ids, empty subsets, mismatched inputs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter combinations that break the cube-construction constraints.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input documents. `where` names the offending field.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(where) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// A query asked for a level deeper than the hierarchy provides.
class ScaleExhausted : public std::runtime_error {
public:
    ScaleExhausted(const std::string& what, int deepest_available)
        : std::runtime_error(what), deepest_(deepest_available) {}
    int deepest_available() const noexcept { return deepest_; }

private:
    int deepest_;
};

/// Ball with fewer than two points; covering conditions are vacuous there.
class DegenerateBall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough resolvable scales for a regression.
class InsufficientScales : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Generator would exceed the point cap.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cube file stamped with a different point set.
class StaleCubes : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A loaded structure breaks a property it must satisfy.
class InvariantFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dyadic
