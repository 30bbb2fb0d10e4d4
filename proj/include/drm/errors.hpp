#pragma once

#include <stdexcept>
#include <string>

namespace drm {

/// A configuration value violates a model invariant. `field` names the
/// offending entry using the config file's dotted path.
class InvalidConfig : public std::invalid_argument {
public:
    InvalidConfig(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The price history has no spread, so the two-parameter least-squares
/// baseline fit is underdetermined. This is what a zero price perturbation
/// produces.
class SingularDesign : public std::runtime_error {
public:
    explicit SingularDesign(const std::string& what, int day = 0)
        : std::runtime_error(what), day_(day) {}

    /// Day index at which the failure surfaced, 0 if not tied to a day.
    int day() const noexcept { return day_; }

private:
    int day_;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The brute-force best-response search failed to converge. Signals a bug in
/// test infrastructure rather than a property of the model.
class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace drm
