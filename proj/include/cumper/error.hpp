#pragma once

#include <stdexcept>
#include <string>

namespace cumper {

/// Raised when an input violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by expand_bifiltration when a compact stack is not monotone.
class NonMonotoneFiltration : public InvalidInput {
public:
    NonMonotoneFiltration(const std::string& what, long long violations)
        : InvalidInput(what), violations_(violations) {}

    long long violations() const noexcept { return violations_; }

private:
    long long violations_;
};

/// Raised by file readers and document parsers.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cumper
