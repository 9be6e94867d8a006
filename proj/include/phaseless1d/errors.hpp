#pragma once

#include <stdexcept>
#include <string>

namespace ph1d {

// Process exit codes, also used to classify library errors.
enum class ExitCode : int {
    ok = 0,
    config = 2,       // bad arguments, bad config file, invalid potential spec
    degenerate = 3,   // measurement geometry makes the recovery system singular
    nonphysical = 4,  // data inconsistent with |s21| < 1 (possible under noise)
    numerical = 5,    // integrator/quadrature/linear-solve failure
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

// Carries the vanishing determinant (or sin factor) that triggered the rejection.
struct DegenerateConfiguration : Error {
    DegenerateConfiguration(const std::string& what, double offending_value)
        : Error(ExitCode::degenerate, what), offending(offending_value) {}
    double offending;
};

// Radicand of the square root in the S3 formula went negative.
struct NonPhysicalIntensity : Error {
    NonPhysicalIntensity(const std::string& what, double radicand_value)
        : Error(ExitCode::nonphysical, what), radicand(radicand_value) {}
    double radicand;
};

struct TruncationError : Error {
    explicit TruncationError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

struct IllConditioned : Error {
    explicit IllConditioned(const std::string& what) : Error(ExitCode::numerical, what) {}
};

struct IntegratorError : Error {
    explicit IntegratorError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

}  // namespace ph1d
