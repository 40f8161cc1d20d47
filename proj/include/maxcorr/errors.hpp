#pragma once

#include <stdexcept>
#include <string>

namespace maxcorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside an operation's domain (lag out of range, b_n >= n, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// gamma(0) == 0: the series (or the filtered residuals) carries no variation.
class DegenerateSeries : public Error {
public:
    using Error::Error;
};

/// Least-squares Gram matrix is numerically singular.
class RankDeficient : public Error {
public:
    using Error::Error;
};

/// An iterative estimator hit its iteration cap.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Malformed user input: unreadable files, bad config keys, non-numeric rows.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace maxcorr
