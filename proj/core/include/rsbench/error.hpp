#pragma once

#include <stdexcept>
#include <string>

namespace rsbench {

enum class ErrorKind {
    invalid_argument, // bad call-site arguments (dimension mismatch, k too large, ...)
    config,           // malformed or incomplete user configuration
    data,             // malformed input files or inconsistent on-disk data
    io,               // filesystem failures
    invariant,        // internal consistency check failed
};

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string& msg)
            : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

/// Process exit code for an error kind: 2 configuration, 3 data, 4 internal.
int exit_code_for(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

[[noreturn]] void throw_error(ErrorKind kind, const std::string& msg);

} // namespace rsbench

#define RSBENCH_CHECK(cond, kind, msg)                    \
    do {                                                  \
        if (!(cond)) {                                    \
            ::rsbench::throw_error(::rsbench::ErrorKind::kind, (msg)); \
        }                                                 \
    } while (false)
