#pragma once

#include <stdexcept>
#include <string>

namespace kvariates {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (dimension mismatch, k > m, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// An exact enumeration was requested on an instance larger than its guard.
class GuardExceeded : public Error {
public:
    using Error::Error;
};

// The quantity is undefined or infinite for this input (all points identical, ...).
class Degenerate : public Error {
public:
    using Error::Error;
};

// A data point was routed to the special node of a peer network.
class LedgerViolation : public Error {
public:
    using Error::Error;
};

}  // namespace kvariates
