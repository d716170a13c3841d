#pragma once

#include <stdexcept>
#include <string>

namespace salbench {

// Base class for every error raised by the library. Callers that only care
// about "something in salbench failed" can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (pixel value
// outside [0,1], zero target size, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Image of the wrong kind (channel count or encoding) for an operation.
class ImageTypeError : public Error {
public:
    using Error::Error;
};

// Inputs that are well-formed individually but inconsistent together
// (dimension mismatch, mixed stimuli, out-of-bounds fixation, bad config).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed text input. line() is 1-based; 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Operation needs at least one fixation / nonzero mass and got none.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// Constant saliency map where a metric needs spread (NSS, CC).
class DegenerateMapError : public Error {
public:
    using Error::Error;
};

// File system / codec failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace salbench
