#pragma once

#include <stdexcept>
#include <string>

namespace tate {

enum class ErrorKind {
    InvalidModulus,
    UnsupportedPrime,
    NonUnit,
    RingMismatch,
    RamifiedRing,
    OutOfDomain,
    PrecisionExhausted,
    CapExceeded,
    NotTorsion,
    RetriesExhausted,
    HenselFailure,
    SupersingularReduction,
    IterationCapExceeded,
    DegenerateConfiguration,
    InsufficientDepth,
    OrderMismatch,
    RamifiedAutomorphism,
    NoMatch,
    NormalizationUnresolved,
    SingularCurve,
    InvalidArgument,
    InternalInconsistency,
    ConfigError,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& msg);
    ErrorKind kind() const { return kind_; }
    const std::string& module() const { return module_; }
    const std::string& detail() const { return detail_; }

private:
    ErrorKind kind_;
    std::string module_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const char* module, const std::string& msg);

}  // namespace tate
