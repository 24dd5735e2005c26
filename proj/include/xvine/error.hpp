#pragma once

#include <stdexcept>
#include <string>

namespace xvine {

enum class ErrorKind {
    DomainError,
    NotATree,
    ProximityViolation,
    WrongCardinality,
    UnknownEdge,
    MissingSubset,
    NonpositiveValue,
    InfeasibleDiagonal,
    MalformedMatrix,
    TruncatedVine,
    NoConvergence,
    BracketFailure,
    NoClosedForm,
    InvalidIndex,
    DimensionTooLarge,
    InsufficientData,
    EmptyConditioningSet,
    DegenerateColumn,
    InfeasibleLevel,
    InvalidSpec,
    Io,
    Parse,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace xvine
