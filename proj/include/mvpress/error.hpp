#pragma once

#include <stdexcept>
#include <string>

namespace mvpress {

enum class ErrorKind {
    Format,       // wrong magic / version / unknown layout
    Corruption,   // truncated or trailing bytes
    Validation,   // value-level invariant violated (NaN, negative weight, duplicate id)
    Consistency,  // two inputs disagree with each other
    Contract,     // caller violated an operation precondition
    Io,
    Parse,        // text formats (TREC, JSONL, JSON)
    Evaluation,
    Query,
    Build,
    Computation,  // statistic undefined for the given samples
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) {
        throw Error(ErrorKind::Contract, what);
    }
}

} // namespace mvpress
