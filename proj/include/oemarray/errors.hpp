#pragma once

#include <stdexcept>
#include <string>

namespace oem {

// Invalid or inconsistent input parameters (bad config, out-of-range values).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation hit a singular or ill-conditioned point, or a spectrum
// could not be analysed (no crossing, undefined phase, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace oem
