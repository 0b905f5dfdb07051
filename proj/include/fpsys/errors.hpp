#pragma once

#include <stdexcept>
#include <string>

namespace fpsys {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The coefficient matrix has rank below the number of equations.
class DegenerateSystem : public Error {
public:
    using Error::Error;
};

/// A desk-scale guard (enumeration size, search size, tensor size) was hit.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class InvalidTuple : public Error {
public:
    using Error::Error;
};

class DegenerateLine : public Error {
public:
    using Error::Error;
};

class NotAntichain : public Error {
public:
    using Error::Error;
};

/// A hypothesis of the theorem being exercised does not hold for the input.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace fpsys
