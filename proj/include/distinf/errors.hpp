#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace distinf {

// Violated precondition or misuse of a stateful object (e.g. adding a seed twice).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Input value outside the domain an operation accepts.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed text input; carries the 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Binary file with a bad header or truncated payload.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace distinf
