#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

enum class ErrorKind {
    dimension,
    parameter,
    invalid_measure,
    degenerate_market,
    wrong_variant,
    contraction_failure,
    assumption_violation,
    config,
    internal,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers branch on
/// the failure class without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace mfg
