#pragma once

#include <stdexcept>
#include <string>

namespace alpharen {

/// Structural problems with a graph or diagram (bad ids, dangling references,
/// a precondition on topology that does not hold).
class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed polynomial expressions and diagram files.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A numerical procedure failed to reach its accuracy target or hit a
/// singular configuration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that is well formed but outside what this version evaluates.
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace alpharen
