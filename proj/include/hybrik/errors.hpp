#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hybrik {

// Base of all library errors. `tag()` is a stable machine-readable class name
// used by the CLI for error reporting and exit-code mapping.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& what)
        : std::runtime_error(what), tag_(std::move(tag)) {}

    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

// Structural problems with inputs: malformed files, bad dimensions, invalid
// configuration. CLI exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
    explicit ValidationError(const std::string& what) : Error("ValidationError", what) {}
};

// Numerically degenerate inputs: zero-length bones, collinear point sets and
// the like. CLI exit code 3.
class DegeneracyError : public Error {
public:
    using Error::Error;
    explicit DegeneracyError(const std::string& what) : Error("DegeneracyError", what) {}
};

struct ParseError : ValidationError {
    explicit ParseError(const std::string& what) : ValidationError("ParseError", what) {}
};

struct DimensionMismatch : ValidationError {
    explicit DimensionMismatch(const std::string& what) : ValidationError("DimensionMismatch", what) {}
};

struct LengthMismatch : ValidationError {
    explicit LengthMismatch(const std::string& what) : ValidationError("LengthMismatch", what) {}
};

struct NonUnitAxis : ValidationError {
    explicit NonUnitAxis(const std::string& what) : ValidationError("NonUnitAxis", what) {}
};

struct InvalidRotation : ValidationError {
    explicit InvalidRotation(const std::string& what) : ValidationError("InvalidRotation", what) {}
};

struct ZeroLengthVector : DegeneracyError {
    explicit ZeroLengthVector(const std::string& what) : DegeneracyError("ZeroLengthVector", what) {}
};

struct DegeneratePair : DegeneracyError {
    explicit DegeneratePair(const std::string& what) : DegeneracyError("DegeneratePair", what) {}
};

struct DegenerateTriple : DegeneracyError {
    explicit DegenerateTriple(const std::string& what) : DegeneracyError("DegenerateTriple", what) {}
};

struct DegenerateTarget : DegeneracyError {
    explicit DegenerateTarget(const std::string& what) : DegeneracyError("DegenerateTarget", what) {}
};

struct DegenerateConfiguration : DegeneracyError {
    explicit DegenerateConfiguration(const std::string& what)
        : DegeneracyError("DegenerateConfiguration", what) {}
};

}  // namespace hybrik
