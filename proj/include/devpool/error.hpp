#pragma once

#include <stdexcept>
#include <string>

namespace devpool {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: bad dimensions, out-of-range parameters, non-finite data.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A reduction was asked to pool zero elements.
class EmptyInput : public Error {
public:
    using Error::Error;
};

/// Weighted pooling with weights summing to zero.
class DegenerateWeights : public Error {
public:
    using Error::Error;
};

/// Correlation of a constant series.
class UndefinedCorrelation : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

/// A dataset could not be evaluated at all (e.g. every entry failed).
class DatasetError : public Error {
public:
    using Error::Error;
};

} // namespace devpool
