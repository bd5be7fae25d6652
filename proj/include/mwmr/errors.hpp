#pragma once

#include <stdexcept>
#include <string>

namespace mwmr {

/// Matrix or vector shapes disagree with the node count.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed inputs: empty traffic, bad config values, unknown names.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its domain (e.g. utility at x <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// lambda_k + lambda_0 vanished for a receiver that still has senders.
class DegenerateDual : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A diagonal scaling term vanished for a receiver with senders.
class DegenerateScaling : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The slot cannot fit request + result transfer plus controller overhead.
class TimingInfeasible : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// More channels requested than the crossbar provides.
class CapacityExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Brute-force oracle asked to search too many variables.
class InstanceTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Not enough delivered traffic to compute a fairness statistic.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text input could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace mwmr
