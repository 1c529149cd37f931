#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "defrauder/collusion.hpp"

namespace defrauder {

// Biased second-order random walks (return bias p, in-out bias q) with
// weight-proportional transitions, followed by skip-gram training with
// negative sampling over the walk corpus.
struct EmbeddingParams {
  std::size_t dimension = 64;
  std::size_t walk_length = 80;
  std::size_t walks_per_node = 10;
  std::size_t window = 10;
  double return_bias = 1.0;  // p
  double inout_bias = 1.0;   // q
  std::size_t negative = 5;
  std::size_t epochs = 1;
  double learning_rate = 0.025;
  // Scale every row to unit length after training. Raw skip-gram norms track
  // how often a node was trained, so nodes without edges sit near the origin
  // and look spuriously tight.
  bool normalize = true;
  // 1 is deterministic for a fixed seed; more threads train lock-free and
  // are not reproducible.
  unsigned threads = 1;
};

void validate(const EmbeddingParams& params);

// Row-major node vectors, one row per collusion-graph node (reviewer index).
class ReviewerEmbedding {
 public:
  ReviewerEmbedding() = default;
  ReviewerEmbedding(std::size_t nodes, std::size_t dimension)
      : dimension_(dimension), values_(nodes * dimension, 0.0) {}

  std::size_t size() const noexcept { return dimension_ == 0 ? 0 : values_.size() / dimension_; }
  std::size_t dimension() const noexcept { return dimension_; }
  bool contains(ReviewerIndex i) const noexcept { return i < size(); }

  std::span<const double> vector(ReviewerIndex i) const {
    return {values_.data() + std::size_t{i} * dimension_, dimension_};
  }
  std::span<double> vector(ReviewerIndex i) { return {values_.data() + std::size_t{i} * dimension_, dimension_}; }

  friend bool operator==(const ReviewerEmbedding&, const ReviewerEmbedding&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<double> values_;
};

// Generates the walk corpus. Nodes without edges produce single-node walks.
std::vector<std::vector<std::uint32_t>> generate_walks(const CollusionGraph& g, const EmbeddingParams& params,
                                                       std::uint64_t seed);

// Throws Error(EmptyGraph) when the graph has no nodes.
ReviewerEmbedding embed_reviewers(const CollusionGraph& g, const EmbeddingParams& params, std::uint64_t seed);

// First line `n d`, then `reviewer_id v1 ... vd`.
void write_embedding(std::ostream& out, const ReviewerEmbedding& emb, const Dataset& data);

}  // namespace defrauder
