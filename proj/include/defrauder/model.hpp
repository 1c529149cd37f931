#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace defrauder {

// Dense indices into a Dataset's reviewer and product tables. Indices follow
// the lexicographic order of the external ids, so they are canonical for a
// given set of ids regardless of input row order.
using ReviewerIndex = std::uint32_t;
using ProductIndex = std::uint32_t;
using Days = std::int64_t;

struct RatingScale {
  int min_rating = 1;
  int max_rating = 5;

  bool contains(int r) const noexcept { return r >= min_rating && r <= max_rating; }
  int span() const noexcept { return max_rating - min_rating; }

  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

// One review as it arrives from a file or generator.
struct Review {
  std::string reviewer_id;
  std::string product_id;
  int rating = 0;
  Days day = 0;  // days since 1970-01-01
  std::string text;

  friend bool operator==(const Review&, const Review&) = default;
};

// A stored review, referring to the dataset's index tables.
struct ReviewRecord {
  ReviewerIndex reviewer;
  ProductIndex product;
  int rating;
  Days day;

  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

using LabelMap = std::map<std::string, bool>;

// Immutable review store with reviewer->products and product->reviewers
// indices in CSR form. Safe for concurrent reads.
class Dataset {
 public:
  std::size_t num_reviews() const noexcept { return records_.size(); }
  std::size_t num_reviewers() const noexcept { return reviewer_names_.size(); }
  std::size_t num_products() const noexcept { return product_names_.size(); }
  const RatingScale& rating_scale() const noexcept { return scale_; }

  const std::string& reviewer_name(ReviewerIndex i) const { return reviewer_names_[i]; }
  const std::string& product_name(ProductIndex p) const { return product_names_[p]; }
  std::optional<ReviewerIndex> find_reviewer(std::string_view id) const;
  std::optional<ProductIndex> find_product(std::string_view id) const;

  // All reviews, ordered by (reviewer, product).
  std::span<const ReviewRecord> reviews() const noexcept { return records_; }
  const ReviewRecord& review(std::size_t k) const { return records_[k]; }
  const std::string& text(std::size_t k) const { return texts_[k]; }

  // P_i: sorted product indices reviewed by reviewer i.
  std::span<const ProductIndex> products_of(ReviewerIndex i) const;
  // Review indices of reviewer i, aligned with products_of(i).
  std::size_t first_review_of(ReviewerIndex i) const { return reviewer_offsets_[i]; }
  // Rev(p): sorted reviewer indices who reviewed product p.
  std::span<const ReviewerIndex> reviewers_of(ProductIndex p) const;
  // Review indices for product p, aligned with reviewers_of(p).
  std::span<const std::uint32_t> reviews_of(ProductIndex p) const;

  // Index of the review by i on p, if any.
  std::optional<std::size_t> find_review(ReviewerIndex i, ProductIndex p) const;

  std::size_t max_product_degree() const noexcept { return max_product_degree_; }

  bool has_labels() const noexcept { return has_labels_; }
  // nullopt when the reviewer is unlabeled.
  std::optional<bool> label(ReviewerIndex i) const;

  // Number of duplicate (reviewer, product) reviews dropped at build time.
  std::size_t duplicates_dropped() const noexcept { return duplicates_dropped_; }

  // Reconstructs the external review list in storage order.
  std::vector<Review> to_reviews() const;
  LabelMap labels_map() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  friend Dataset build_dataset(std::vector<Review>, RatingScale, const std::optional<LabelMap>&);

  RatingScale scale_;
  std::vector<std::string> reviewer_names_;
  std::vector<std::string> product_names_;
  std::vector<ReviewRecord> records_;
  std::vector<std::string> texts_;
  std::vector<std::uint32_t> reviewer_offsets_;  // size R+1
  std::vector<ProductIndex> review_product_;     // product of records_[k]
  std::vector<std::uint32_t> product_offsets_;   // size P+1
  std::vector<ReviewerIndex> product_reviewers_;
  std::vector<std::uint32_t> product_review_ids_;
  std::vector<std::int8_t> labels_;  // -1 unknown, 0 genuine, 1 fraud
  bool has_labels_ = false;
  std::size_t max_product_degree_ = 0;
  std::size_t duplicates_dropped_ = 0;
};

// Builds a Dataset. Duplicate (reviewer, product) pairs keep the earliest
// review (ties: the one appearing first in `reviews`). Labels for reviewers
// absent from the reviews are ignored.
// Throws Error(EmptyInput) or Error(RatingOutOfScale).
Dataset build_dataset(std::vector<Review> reviews, RatingScale scale = {},
                      const std::optional<LabelMap>& labels = std::nullopt);

enum class Provenance { IsolatedNode, MergedEdgeSet, EdgeDifference, ConnectedComponent, External };

const char* provenance_name(Provenance p) noexcept;

// A candidate fraud group: R(g) and P(g) as sorted index vectors.
struct CandidateGroup {
  std::vector<ReviewerIndex> members;
  std::vector<ProductIndex> targets;
  Provenance provenance = Provenance::External;
  int iteration = 0;
};

// Target products of a member set: the products reviewed by at least two
// members. When no product is shared, falls back to the union of the
// members' products so that every group has at least one target.
std::vector<ProductIndex> co_reviewed_targets(const Dataset& data,
                                              std::span<const ReviewerIndex> members);

CandidateGroup make_group(const Dataset& data, std::vector<ReviewerIndex> members,
                          Provenance provenance = Provenance::External, int iteration = 0);

}  // namespace defrauder
