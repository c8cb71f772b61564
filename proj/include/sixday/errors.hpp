#pragma once

#include <stdexcept>
#include <string>

namespace sixday {

// Base class for all data and convergence errors raised by the library.
// The CLI maps these to exit code 2; anything else is a usage bug.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sixday
