#include <rsbench/error.hpp>

namespace rsbench {

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument:
        case ErrorKind::config:
            return 2;
        case ErrorKind::data:
        case ErrorKind::io:
            return 3;
        case ErrorKind::invariant:
            return 4;
    }
    return 4;
}

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument:
            return "invalid argument";
        case ErrorKind::config:
            return "configuration error";
        case ErrorKind::data:
            return "data error";
        case ErrorKind::io:
            return "I/O error";
        case ErrorKind::invariant:
            return "internal invariant violation";
    }
    return "error";
}

void throw_error(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace rsbench
