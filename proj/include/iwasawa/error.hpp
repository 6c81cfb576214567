#pragma once

#include <stdexcept>
#include <string>

namespace iwasawa {

// Base for every failure the library signals. The CLI maps the subclasses
// onto exit codes (validation 1, budget/precision 2, invariant 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed presentation, non-prime p, out-of-range argument.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A result would need more digits than the working precision provides.
class PrecisionError : public Error {
public:
    using Error::Error;
};

// A configured size or degree budget would be exceeded.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Two independent routes to the same quantity disagreed.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace iwasawa
