#pragma once

#include <stdexcept>
#include <string>

namespace qlm {

// Exit-code mapping used by the CLI: validation 2, guard trip 3, solver 4.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The run left the validity region of the approximation (e.g. zeros guard,
// grid resolution, momentum aliasing).
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qlm
