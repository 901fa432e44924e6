#include "mvpress/error.hpp"

namespace mvpress {

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Format: return "format error";
    case ErrorKind::Corruption: return "corruption error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::Contract: return "contract error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Evaluation: return "evaluation error";
    case ErrorKind::Query: return "query error";
    case ErrorKind::Build: return "build error";
    case ErrorKind::Computation: return "computation error";
    }
    return "error";
}

} // namespace mvpress
