#include "aqtc/error.hpp"

namespace aqtc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedScript: return "MalformedScript";
    case ErrorCode::EmptyScript: return "EmptyScript";
    case ErrorCode::EmptySublist: return "EmptySublist";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyFunctionSet: return "EmptyFunctionSet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingId: return "MissingId";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyRecords: return "EmptyRecords";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace aqtc
