#pragma once

#include <stdexcept>
#include <string>

namespace defrauder {

enum class Errc {
  EmptyInput,
  RatingOutOfScale,
  Io,
  MalformedRow,
  ConflictingLabel,
  GroupTooSmall,
  NoEdges,
  UnknownProduct,
  UnknownReviewer,
  NotCoReviewers,
  EmptyGraph,
  MissingEmbedding,
  NoLabels,
  InsufficientPairs,
  SpecInvalid,
  InvalidArgument,
};

const char* errc_name(Errc code) noexcept;

// Every module reports failures through this one exception type; callers
// branch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(what) {}

  Errc code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace defrauder
