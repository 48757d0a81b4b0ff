#pragma once

#include <stdexcept>
#include <string>

namespace displace {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data; the message carries the source location (file:line).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Snapshot magic/version mismatch.
class SnapshotFormatError : public Error {
public:
    using Error::Error;
};

/// Snapshot checksum failure or truncation.
class SnapshotIntegrityError : public Error {
public:
    using Error::Error;
};

/// Focal paper does not meet the reference/citation eligibility floor.
class IneligibleFocalError : public Error {
public:
    using Error::Error;
};

/// A metric denominator is zero; never silently reported as 0.
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

/// Parameter estimation cannot proceed (too few points, degenerate data,
/// divergent model).
class FitError : public Error {
public:
    using Error::Error;
};

/// Endpoint unreachable after exhausting the retry policy.
class TransportError : public Error {
public:
    using Error::Error;
};

/// The completion response carries no usable token logprobs.
class LogprobsUnavailableError : public Error {
public:
    using Error::Error;
};

/// Progress journal is unreadable or inconsistent with the request batch.
class JournalError : public Error {
public:
    using Error::Error;
};

} // namespace displace
