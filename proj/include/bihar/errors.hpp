#pragma once

#include <stdexcept>
#include <string>

namespace bihar {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the domain of the requested computation (n too small,
/// p at or below the Sobolev exponent, non-positive alpha, ...).
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// p lies strictly between the Sobolev exponent and p_c: the linearized
/// operator has a complex pair and the real spectrum does not exist.
class SubcriticalInput : public Error {
public:
    using Error::Error;
};

/// n <= 12: the defining inequality for p_c never reverses.
class NoPcValue : public Error {
public:
    using Error::Error;
};

/// The computed ladder disagrees with the closed-form length, or a rung
/// polynomial has more than one root above p_c. Always an internal bug.
class LadderMismatch : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class StepFailure : public Error {
public:
    using Error::Error;
};

class BracketNotFound : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class IllConditioned : public Error {
public:
    using Error::Error;
};

class WindowTooShort : public Error {
public:
    using Error::Error;
};

}  // namespace bihar
