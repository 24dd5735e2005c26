#include "xvine/error.hpp"

namespace xvine {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::NotATree: return "NotATree";
        case ErrorKind::ProximityViolation: return "ProximityViolation";
        case ErrorKind::WrongCardinality: return "WrongCardinality";
        case ErrorKind::UnknownEdge: return "UnknownEdge";
        case ErrorKind::MissingSubset: return "MissingSubset";
        case ErrorKind::NonpositiveValue: return "NonpositiveValue";
        case ErrorKind::InfeasibleDiagonal: return "InfeasibleDiagonal";
        case ErrorKind::MalformedMatrix: return "MalformedMatrix";
        case ErrorKind::TruncatedVine: return "TruncatedVine";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::NoClosedForm: return "NoClosedForm";
        case ErrorKind::InvalidIndex: return "InvalidIndex";
        case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::EmptyConditioningSet: return "EmptyConditioningSet";
        case ErrorKind::DegenerateColumn: return "DegenerateColumn";
        case ErrorKind::InfeasibleLevel: return "InfeasibleLevel";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::Io: return "Io";
        case ErrorKind::Parse: return "Parse";
    }
    return "Error";
}

}  // namespace xvine
