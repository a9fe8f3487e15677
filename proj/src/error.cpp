#include "mfg/error.hpp"

namespace mfg {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::invalid_measure: return "invalid-measure";
        case ErrorKind::degenerate_market: return "degenerate-market";
        case ErrorKind::wrong_variant: return "wrong-variant";
        case ErrorKind::contraction_failure: return "contraction-failure";
        case ErrorKind::assumption_violation: return "model-assumption-violation";
        case ErrorKind::config: return "config";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

} // namespace mfg
