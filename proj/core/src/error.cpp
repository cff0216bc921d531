#include "modkit/error.hpp"

namespace modkit {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::UnknownFactor: return "UnknownFactor";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::EmptyStratum: return "EmptyStratum";
    case ErrorCode::ZeroRowSum: return "ZeroRowSum";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::UnknownAxis: return "UnknownAxis";
    case ErrorCode::OverlappingAxes: return "OverlappingAxes";
    case ErrorCode::EmptyAxisSet: return "EmptyAxisSet";
    case ErrorCode::SubsetSearchTooLarge: return "SubsetSearchTooLarge";
    case ErrorCode::CellCapExceeded: return "CellCapExceeded";
    case ErrorCode::InvalidPmf: return "InvalidPmf";
    case ErrorCode::EmptyNode: return "EmptyNode";
    case ErrorCode::SingleSample: return "SingleSample";
    case ErrorCode::NoFeatures: return "NoFeatures";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyLabels: return "EmptyLabels";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::SingleClassStratum: return "SingleClassStratum";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::BadSubsetSize: return "BadSubsetSize";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Io: return "Io";
    case ErrorCode::HeaderMissing: return "HeaderMissing";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeFeature: return "NegativeFeature";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::SerializationError: return "SerializationError";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace modkit
