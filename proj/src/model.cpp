#include "defrauder/model.hpp"

#include <algorithm>
#include <numeric>

#include "defrauder/error.hpp"

namespace defrauder {
namespace {

template <typename Names>
std::optional<std::uint32_t> lookup(const Names& names, std::string_view id) {
  auto it = std::lower_bound(names.begin(), names.end(), id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == names.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - names.begin());
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::optional<ReviewerIndex> Dataset::find_reviewer(std::string_view id) const {
  return lookup(reviewer_names_, id);
}

std::optional<ProductIndex> Dataset::find_product(std::string_view id) const {
  return lookup(product_names_, id);
}

std::span<const ProductIndex> Dataset::products_of(ReviewerIndex i) const {
  const auto b = reviewer_offsets_[i];
  return {review_product_.data() + b, reviewer_offsets_[i + 1] - b};
}

std::span<const ReviewerIndex> Dataset::reviewers_of(ProductIndex p) const {
  const auto b = product_offsets_[p];
  return {product_reviewers_.data() + b, product_offsets_[p + 1] - b};
}

std::span<const std::uint32_t> Dataset::reviews_of(ProductIndex p) const {
  const auto b = product_offsets_[p];
  return {product_review_ids_.data() + b, product_offsets_[p + 1] - b};
}

std::optional<std::size_t> Dataset::find_review(ReviewerIndex i, ProductIndex p) const {
  const auto products = products_of(i);
  auto it = std::lower_bound(products.begin(), products.end(), p);
  if (it == products.end() || *it != p) return std::nullopt;
  return reviewer_offsets_[i] + static_cast<std::size_t>(it - products.begin());
}

std::optional<bool> Dataset::label(ReviewerIndex i) const {
  if (!has_labels_ || labels_[i] < 0) return std::nullopt;
  return labels_[i] == 1;
}

std::vector<Review> Dataset::to_reviews() const {
  std::vector<Review> out;
  out.reserve(records_.size());
  for (std::size_t k = 0; k < records_.size(); ++k) {
    const auto& r = records_[k];
    out.push_back({reviewer_names_[r.reviewer], product_names_[r.product], r.rating, r.day, texts_[k]});
  }
  return out;
}

LabelMap Dataset::labels_map() const {
  LabelMap out;
  if (!has_labels_) return out;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] >= 0) out.emplace(reviewer_names_[i], labels_[i] == 1);
  return out;
}

Dataset build_dataset(std::vector<Review> reviews, RatingScale scale,
                      const std::optional<LabelMap>& labels) {
  if (reviews.empty()) throw Error(Errc::EmptyInput, "no reviews");
  if (scale.min_rating >= scale.max_rating)
    throw Error(Errc::InvalidArgument, "rating scale must satisfy min < max");
  for (const auto& r : reviews) {
    if (!scale.contains(r.rating))
      throw Error(Errc::RatingOutOfScale, "review by '" + r.reviewer_id + "' on '" + r.product_id +
                                              "' has rating " + std::to_string(r.rating));
  }

  Dataset d;
  d.scale_ = scale;
  {
    std::vector<std::string> rn, pn;
    rn.reserve(reviews.size());
    pn.reserve(reviews.size());
    for (const auto& r : reviews) {
      rn.push_back(r.reviewer_id);
      pn.push_back(r.product_id);
    }
    d.reviewer_names_ = sorted_unique(std::move(rn));
    d.product_names_ = sorted_unique(std::move(pn));
  }

  struct Keyed {
    ReviewerIndex reviewer;
    ProductIndex product;
    Days day;
    std::size_t pos;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(reviews.size());
  for (std::size_t k = 0; k < reviews.size(); ++k) {
    keyed.push_back({*lookup(d.reviewer_names_, reviews[k].reviewer_id),
                     *lookup(d.product_names_, reviews[k].product_id), reviews[k].day, k});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.reviewer != b.reviewer) return a.reviewer < b.reviewer;
    if (a.product != b.product) return a.product < b.product;
    if (a.day != b.day) return a.day < b.day;
    return a.pos < b.pos;
  });

  const std::size_t R = d.reviewer_names_.size();
  const std::size_t P = d.product_names_.size();
  d.reviewer_offsets_.assign(R + 1, 0);
  std::vector<std::uint32_t> product_count(P, 0);
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    const auto& e = keyed[k];
    if (k > 0 && keyed[k - 1].reviewer == e.reviewer && keyed[k - 1].product == e.product) {
      ++d.duplicates_dropped_;
      continue;
    }
    auto& src = reviews[e.pos];
    d.records_.push_back({e.reviewer, e.product, src.rating, src.day});
    d.texts_.push_back(std::move(src.text));
    d.review_product_.push_back(e.product);
    ++d.reviewer_offsets_[e.reviewer + 1];
    ++product_count[e.product];
  }
  std::partial_sum(d.reviewer_offsets_.begin(), d.reviewer_offsets_.end(), d.reviewer_offsets_.begin());

  d.product_offsets_.assign(P + 1, 0);
  for (std::size_t p = 0; p < P; ++p) {
    d.product_offsets_[p + 1] = d.product_offsets_[p] + product_count[p];
    d.max_product_degree_ = std::max<std::size_t>(d.max_product_degree_, product_count[p]);
  }
  d.product_reviewers_.resize(d.records_.size());
  d.product_review_ids_.resize(d.records_.size());
  std::vector<std::uint32_t> cursor(d.product_offsets_.begin(), d.product_offsets_.end() - 1);
  // Records are in reviewer order, so each product's reviewer list comes out sorted.
  for (std::size_t k = 0; k < d.records_.size(); ++k) {
    const auto& rec = d.records_[k];
    const auto slot = cursor[rec.product]++;
    d.product_reviewers_[slot] = rec.reviewer;
    d.product_review_ids_[slot] = static_cast<std::uint32_t>(k);
  }

  if (labels) {
    d.has_labels_ = true;
    d.labels_.assign(R, -1);
    for (const auto& [id, fraud] : *labels) {
      if (auto i = lookup(d.reviewer_names_, id)) d.labels_[*i] = fraud ? 1 : 0;
    }
  }
  return d;
}

const char* provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::IsolatedNode: return "isolated_node";
    case Provenance::MergedEdgeSet: return "merged_edge_set";
    case Provenance::EdgeDifference: return "edge_difference";
    case Provenance::ConnectedComponent: return "connected_component";
    case Provenance::External: return "external";
  }
  return "unknown";
}

std::vector<ProductIndex> co_reviewed_targets(const Dataset& data,
                                              std::span<const ReviewerIndex> members) {
  std::vector<ProductIndex> all;
  for (auto i : members) {
    const auto ps = data.products_of(i);
    all.insert(all.end(), ps.begin(), ps.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<ProductIndex> shared;
  for (std::size_t k = 0; k < all.size();) {
    std::size_t run = k;
    while (run < all.size() && all[run] == all[k]) ++run;
    if (run - k >= 2) shared.push_back(all[k]);
    k = run;
  }
  if (!shared.empty()) return shared;
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

CandidateGroup make_group(const Dataset& data, std::vector<ReviewerIndex> members,
                          Provenance provenance, int iteration) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  CandidateGroup g;
  g.targets = co_reviewed_targets(data, members);
  g.members = std::move(members);
  g.provenance = provenance;
  g.iteration = iteration;
  return g;
}

}  // namespace defrauder
