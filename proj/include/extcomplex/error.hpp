#pragma once

#include <stdexcept>
#include <string>

namespace extcomplex {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class ParseError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class UnboundedError : public Error {
public:
    using Error::Error;
};

class EmptySetError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A numeric certificate (kernel residual, inclusion slack) exceeded its tolerance.
class CertificateError : public Error {
public:
    using Error::Error;
};

}  // namespace extcomplex
