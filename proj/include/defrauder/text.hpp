#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "defrauder/model.hpp"

namespace defrauder {

// A review text in vector form. Sparse vectors keep sorted bucket indices;
// dense vectors leave `index` empty. A text with no usable tokens is the
// zero vector, whose cosine with anything is 0.
struct TextVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
  double squared_norm = 0.0;
  bool dense = false;

  bool is_zero() const noexcept { return squared_norm == 0.0; }
  friend bool operator==(const TextVector&, const TextVector&) = default;
};

double cosine(const TextVector& a, const TextVector& b);

// Lowercased tokens split on ASCII punctuation and whitespace. Non-ASCII
// bytes are kept inside tokens.
std::vector<std::string> tokenize(std::string_view text);

class TextVectorizer {
 public:
  enum class Mode { HashedTermFrequency, PretrainedWordVectors };

  static constexpr std::size_t kDefaultBuckets = std::size_t{1} << 15;

  // Term-frequency bag over FNV-1a hashed buckets.
  static TextVectorizer hashed(std::size_t buckets = kDefaultBuckets);
  // Word vectors in text form: `token v1 .. vd` per line, with an optional
  // `count dim` first line. A review maps to the mean of its known tokens.
  static TextVectorizer pretrained(const std::filesystem::path& path);
  static TextVectorizer pretrained(std::unordered_map<std::string, std::vector<double>> table);

  Mode mode() const noexcept { return mode_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::string describe() const;

  TextVector vectorize(std::string_view text) const;

 private:
  Mode mode_ = Mode::HashedTermFrequency;
  std::size_t dim_ = kDefaultBuckets;
  std::string source_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

// One vector per stored review, indexed like Dataset::review(k).
std::vector<TextVector> vectorize_reviews(const Dataset& data, const TextVectorizer& vectorizer,
                                          unsigned threads = 1);

}  // namespace defrauder
