#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfl {

enum class ErrorKind {
    invalid_input,
    invalid_argument,
    numerical_failure,
    disconnected_graph,
    empty_dataset,
    spec_validation,
    divergence,
    config,
    io,
};

inline std::string_view kind_name(ErrorKind k) noexcept {
    switch (k) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::disconnected_graph: return "disconnected-graph";
    case ErrorKind::empty_dataset: return "empty-dataset";
    case ErrorKind::spec_validation: return "spec-validation";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can print a machine-parsable line.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace sfl
