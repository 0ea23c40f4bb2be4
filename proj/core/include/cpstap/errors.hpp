#pragma once

#include <stdexcept>
#include <string>

namespace cpstap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user-facing configuration: coprime pair, odd/even bin counts, presets.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

// Rank-deficient maps and similar failures inside the linear algebra.
class NumericalError : public Error {
public:
    using Error::Error;
};

class InvalidPriorError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

}  // namespace cpstap
