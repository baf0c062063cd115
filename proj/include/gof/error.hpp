#pragma once

#include <stdexcept>
#include <string>

namespace gof {

// Every failure raised by the library derives from Error so callers can
// catch one type; the subclasses name the violated contract.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Observation outside the hypothesis support.
class DomainError : public Error {
public:
    using Error::Error;
};

// A hypothesis whose cdf leaves [0, 1].
class HypothesisError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Histogram bin with non-positive expectation.
class InvalidBinError : public Error {
public:
    using Error::Error;
};

// Binning policy that cannot be realized (equal width on unbounded support).
class PolicyError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// Resolution guard of the Monte Carlo engine (too few replicas for alpha).
class ResolutionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace gof
