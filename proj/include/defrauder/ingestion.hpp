#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "defrauder/model.hpp"

namespace defrauder {

enum class ReviewFormat { Csv, JsonLines };

struct ReviewFileSchema {
  ReviewFormat format = ReviewFormat::Csv;
  std::string reviewer_column = "reviewer_id";
  std::string product_column = "product_id";
  std::string rating_column = "rating";
  std::string date_column = "date";
  std::string text_column = "text";  // optional in the file
};

// .jsonl / .json / .ndjson select JSON lines; anything else is CSV.
ReviewFormat format_from_path(const std::filesystem::path& path);

struct Rejection {
  std::size_t line = 0;
  std::string reason;
};

struct ParseReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::size_t rows_rejected = 0;
  std::size_t duplicates_dropped = 0;
  std::vector<Rejection> rejections;
};

struct LoadedDataset {
  Dataset dataset;
  ParseReport report;
};

// Fraction of rejected rows above which a load is aborted. A single
// rejected row never aborts, so tiny files tolerate one bad line.
inline constexpr double kMaxRejectFraction = 0.10;

// Parses a review file. Malformed rows are collected in the report; the load
// throws Error(MalformedRow) when more than one row and more than 10% of rows
// are rejected, and Error(Io) / Error(EmptyInput) for unreadable or empty input.
LoadedDataset load_reviews(const std::filesystem::path& path, const ReviewFileSchema& schema,
                           RatingScale scale = {}, const std::optional<LabelMap>& labels = std::nullopt);
LoadedDataset load_reviews(std::istream& in, const ReviewFileSchema& schema, RatingScale scale = {},
                           const std::optional<LabelMap>& labels = std::nullopt);

// Two-column CSV `reviewer_id,label` with label in {0,1}.
LabelMap load_labels(const std::filesystem::path& path);
LabelMap load_labels(std::istream& in);

// ISO-8601 date (time-of-day suffix ignored) or integer epoch days.
std::optional<Days> parse_day(std::string_view s);
std::string format_day(Days day);

// Minimal RFC-4180 reader: quoted fields, doubled quotes, embedded newlines,
// CRLF or LF record ends, leading UTF-8 BOM skipped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next non-blank record. Returns false at end of input.
  // Throws Error(MalformedRow) on an unterminated quote.
  bool next(std::vector<std::string>& fields);
  // Physical line on which the last returned record started (1-based).
  std::size_t record_line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool at_start_ = true;
};

std::string csv_field(std::string_view s);

// Identifiers may not contain field or record separators used by the
// tool's output formats.
bool valid_identifier(std::string_view id) noexcept;

void write_reviews_csv(std::ostream& out, const std::vector<Review>& reviews);
void write_reviews_jsonl(std::ostream& out, const std::vector<Review>& reviews);
void write_labels_csv(std::ostream& out, const LabelMap& labels);

}  // namespace defrauder
