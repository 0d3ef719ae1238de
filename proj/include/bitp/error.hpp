#pragma once

#include <stdexcept>
#include <string>

namespace bitp {

// Base for every error raised by the library. The CLI maps all of these to
// exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed metadata, data width mismatch, value outside its declared range.
class LoadError : public Error {
public:
    using Error::Error;
};

// A frequency or fractile was requested over a zero-measure set.
class UndefinedMeasure : public Error {
public:
    using Error::Error;
};

// A formula mentions an observable the table does not have, or uses a
// relation the observable's range kind forbids.
class EvaluationError : public Error {
public:
    using Error::Error;
};

// Caller violated a documented precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

// Atomic search found no candidate with nonzero support.
class NoCandidate : public Error {
public:
    using Error::Error;
};

class RenderError : public Error {
public:
    using Error::Error;
};

}  // namespace bitp
