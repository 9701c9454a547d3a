#pragma once

#include <stdexcept>
#include <string>

namespace aecurv {

enum class ErrorKind {
    config,      // bad flags, unknown metric, unresolved parameter
    parse,       // DSL / JSON syntax errors
    domain,      // point outside chart, sqrt/log/pow domain violation
    order,       // insufficient or excessive jet order, dim mismatch
    validation,  // metric fails positive-definiteness / symmetry checks
    numeric      // non-finite intermediate, solver failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace aecurv
