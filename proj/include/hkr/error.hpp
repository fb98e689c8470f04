#pragma once

#include <stdexcept>
#include <string>

namespace hkr {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (x < 0, n < 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A construction or integration needed more ranks than depth_cap allows.
class DepthError : public Error {
public:
    using Error::Error;
};

// Malformed or inadmissible user input (bad JSON, overlapping collection, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A certified comparison stayed Overlapping up to the precision cap.
class UndecidableError : public Error {
public:
    using Error::Error;
};

// A series was asked to sum with ratio >= 1.
class DivergentSeriesError : public Error {
public:
    using Error::Error;
};

} // namespace hkr
