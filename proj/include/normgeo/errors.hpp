#pragma once

#include <stdexcept>
#include <string>

namespace normgeo {

/// Base class for every error the library raises. `tag()` is the stable,
/// machine-parsable identifier the CLI prints on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& what)
        : std::runtime_error(what), tag_(std::move(tag)) {}
    const std::string& tag() const noexcept { return tag_; }
    /// True for errors caused by bad caller input (exit code 1), false for
    /// failures of a sampler or solver on valid input (exit code 2).
    virtual bool is_input_error() const noexcept { return true; }

private:
    std::string tag_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error("E_INPUT", what) {}
};

class DimensionTooLargeError : public Error {
public:
    explicit DimensionTooLargeError(const std::string& what) : Error("E_DIM_TOO_LARGE", what) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& what) : Error("E_UNSUPPORTED", what) {}
};

class NearSingularError : public Error {
public:
    explicit NearSingularError(const std::string& what) : Error("E_NEAR_SINGULAR", what) {}
};

class DegenerateSetError : public Error {
public:
    explicit DegenerateSetError(const std::string& what) : Error("E_DEGENERATE_SET", what) {}
    bool is_input_error() const noexcept override { return false; }
};

class BracketError : public Error {
public:
    explicit BracketError(const std::string& what) : Error("E_BRACKET", what) {}
    bool is_input_error() const noexcept override { return false; }
};

}  // namespace normgeo
