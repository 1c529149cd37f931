#include "defrauder/error.hpp"

namespace defrauder {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::RatingOutOfScale: return "RatingOutOfScale";
    case Errc::Io: return "Io";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::ConflictingLabel: return "ConflictingLabel";
    case Errc::GroupTooSmall: return "GroupTooSmall";
    case Errc::NoEdges: return "NoEdges";
    case Errc::UnknownProduct: return "UnknownProduct";
    case Errc::UnknownReviewer: return "UnknownReviewer";
    case Errc::NotCoReviewers: return "NotCoReviewers";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::MissingEmbedding: return "MissingEmbedding";
    case Errc::NoLabels: return "NoLabels";
    case Errc::InsufficientPairs: return "InsufficientPairs";
    case Errc::SpecInvalid: return "SpecInvalid";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace defrauder
