#include "tate/errors.hpp"

namespace tate {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidModulus: return "InvalidModulus";
        case ErrorKind::UnsupportedPrime: return "UnsupportedPrime";
        case ErrorKind::NonUnit: return "NonUnit";
        case ErrorKind::RingMismatch: return "RingMismatch";
        case ErrorKind::RamifiedRing: return "RamifiedRing";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::NotTorsion: return "NotTorsion";
        case ErrorKind::RetriesExhausted: return "RetriesExhausted";
        case ErrorKind::HenselFailure: return "HenselFailure";
        case ErrorKind::SupersingularReduction: return "SupersingularReduction";
        case ErrorKind::IterationCapExceeded: return "IterationCapExceeded";
        case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorKind::InsufficientDepth: return "InsufficientDepth";
        case ErrorKind::OrderMismatch: return "OrderMismatch";
        case ErrorKind::RamifiedAutomorphism: return "RamifiedAutomorphism";
        case ErrorKind::NoMatch: return "NoMatch";
        case ErrorKind::NormalizationUnresolved: return "NormalizationUnresolved";
        case ErrorKind::SingularCurve: return "SingularCurve";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InternalInconsistency: return "InternalInconsistency";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& msg)
    : std::runtime_error(std::string(to_string(kind)) + ": " + msg),
      kind_(kind),
      module_(std::move(module)),
      detail_(msg) {}

void fail(ErrorKind kind, const char* module, const std::string& msg) {
    throw Error(kind, module, msg);
}

}  // namespace tate
