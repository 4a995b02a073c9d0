#pragma once

#include <stdexcept>
#include <string>

namespace polydina {

// Error categories. Values are stable: the C API exposes them verbatim as
// status codes (see polydina_c.h), so reorder nothing here.
enum class Errc : int {
    ok = 0,
    invalid_argument = 1,  // malformed values, dimension mismatches
    parse = 2,             // unreadable CSV / JSON input
    size_cap = 3,          // dense matrix would exceed the configured entry cap
    precondition = 4,      // structural precondition of an operation not met
    numeric = 5,           // numerical failure (zero denominator, invalid result)
    not_converged = 6,     // iterative solver exhausted its budget
    io = 7,                // filesystem failure
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace polydina
