#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlimit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input: malformed text, wrong dimensions, violated
/// preconditions. The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not deliver a trustworthy answer.
/// The CLI maps these to exit code 1.
class NumericError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class PreconditionViolation : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found);

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class NotNilpotent : public NumericError {
public:
    using NumericError::NumericError;
};

class Singular : public NumericError {
public:
    using NumericError::NumericError;
};

class Overflow : public NumericError {
public:
    using NumericError::NumericError;
};

class QuadratureFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class NotRegular : public NumericError {
public:
    using NumericError::NumericError;
};

class IllConditioned : public NumericError {
public:
    using NumericError::NumericError;
};

/// A perturbation family produced a matrix that cannot be inverted.
class SingularMember : public NumericError {
public:
    using NumericError::NumericError;
};

/// A custom perturbation family has no member for the requested index.
class MissingIndex : public InputError {
public:
    using InputError::InputError;
};

}  // namespace dlimit
