#include "ndb/errors.hpp"

namespace ndb {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::UnknownFactId: return "UnknownFactId";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::InsufficientEntities: return "InsufficientEntities";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoJoinPath: return "NoJoinPath";
    case ErrorCode::UnknownPlace: return "UnknownPlace";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::OperatorUnavailable: return "OperatorUnavailable";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::UnparsedQuery: return "UnparsedQuery";
    case ErrorCode::MissingProvenance: return "MissingProvenance";
    case ErrorCode::InconsistentCase: return "InconsistentCase";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace ndb
