#pragma once

#include <stdexcept>
#include <string>

namespace sqmz {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A basis size that cannot hold any state (dim == 0).
class InvalidDimension : public Error {
public:
    using Error::Error;
};

// A truncated basis too small for the requested state or operator: the norm
// deficit exceeds the leakage tolerance, or an operator word would walk past
// the padding budget.
class TruncationOverflow : public Error {
public:
    using Error::Error;
};

// A 2x2 matrix passed where a unitary mode map is required.
class InvalidNetwork : public Error {
public:
    using Error::Error;
};

// Detector efficiency outside (0, 1].
class InvalidEfficiency : public Error {
public:
    using Error::Error;
};

// A scalar parameter outside its supported range (e.g. |r| > 10, negative dB).
class ParameterRange : public Error {
public:
    using Error::Error;
};

// A total-energy request below the minimum the family can realize.
class InfeasibleEnergy : public Error {
public:
    using Error::Error;
};

// A moment lookup beyond the table's maximum total order.
class TableOrder : public Error {
public:
    using Error::Error;
};

// Sensitivity requested where the signal slope vanishes (|dO/dphi| < 1e-12).
class DegenerateWorkingPoint : public Error {
public:
    using Error::Error;
};

// A finite-difference derivative that failed its step-halving agreement check.
class UnstableDerivative : public Error {
public:
    using Error::Error;
};

// A root-finder bracket that contains no certifiable sign change.
class BracketFailure : public Error {
public:
    using Error::Error;
};

// A sweep specification violating its invariants (empty grids, bad steps, ...).
class SpecValidation : public Error {
public:
    using Error::Error;
};

} // namespace sqmz
