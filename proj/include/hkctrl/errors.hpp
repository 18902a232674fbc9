#pragma once

#include <stdexcept>
#include <string>

namespace hkctrl {

// Thrown when a scenario/config value fails validation.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when the kernel mass over the active delay window is not positive.
struct KernelViolation : std::runtime_error {
    explicit KernelViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a delayed lookup falls outside the stored history range.
struct HistoryUnderflow : std::out_of_range {
    explicit HistoryUnderflow(const std::string& msg) : std::out_of_range(msg) {}
};

// Thrown when a step size is incompatible with the model being integrated.
struct StepSizeError : std::runtime_error {
    explicit StepSizeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a required analytic certificate does not hold.
struct CertificateViolation : std::runtime_error {
    explicit CertificateViolation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hkctrl
