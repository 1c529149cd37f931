#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "defrauder/model.hpp"
#include "defrauder/text.hpp"

namespace defrauder {

struct CollusionParams {
  double alpha = 0.3;  // time coherence weight
  double beta = 0.3;   // rating coherence weight
  double gamma = 0.4;  // text similarity weight
  double tau_t_days = 20.0;
  double tau_r_percent = 20.0;  // tau_r = (max - min) * percent / 100
  double theta = 0.4;
  unsigned threads = 1;

  double tau_r(const RatingScale& scale) const noexcept { return scale.span() * tau_r_percent / 100.0; }
};

// Checks weights, thresholds and the text-dominance constraint
// gamma > alpha, gamma > beta. Throws Error(InvalidArgument).
void validate(const CollusionParams& params);

// Suspicion of a product from its review count relative to the most-reviewed
// product: 2 / (1 + exp(-(max_rev - rev)^theta + 2^theta)) - 1.
double product_suspicion(std::size_t max_reviews, std::size_t reviews, double theta);
// Throws Error(UnknownProduct).
double product_suspicion(ProductIndex p, const Dataset& data, double theta);

// Collusive spamicity of i and j on product p. Throws Error(NotCoReviewers)
// unless both reviewed p. `texts` is indexed like Dataset::review(k).
double pair_collusion(ReviewerIndex i, ReviewerIndex j, ProductIndex p, const Dataset& data,
                      const CollusionParams& params, std::span<const TextVector> texts);

// Overall spamicity Phi(i, j) = 2 / (1 + exp(-sigma)) - 1 where sigma sums the
// per-product collusion over co-reviewed products, times the Jaccard of the
// two product sets.
double pair_spamicity(ReviewerIndex i, ReviewerIndex j, const Dataset& data, const CollusionParams& params,
                      std::span<const TextVector> texts);

struct CollusionEdge {
  ReviewerIndex i = 0;  // i < j
  ReviewerIndex j = 0;
  double weight = 0.0;

  friend bool operator==(const CollusionEdge&, const CollusionEdge&) = default;
};

// Weighted reviewer-reviewer graph. Every dataset reviewer is a node; only
// pairs with positive spamicity carry an edge.
struct CollusionGraph {
  std::size_t num_nodes = 0;
  std::vector<CollusionEdge> edges;  // sorted by (i, j)
  // Distinct co-reviewing pairs that were scored.
  std::size_t candidate_pairs = 0;
  // Scored pairs whose spamicity was <= 0 and so were not stored.
  std::size_t dropped_pairs = 0;
};

// Enumerates candidate pairs through the product index, so work is bounded
// by sum_p |Rev(p)|^2 rather than |R|^2. Deterministic for any thread count.
CollusionGraph build_collusion_graph(const Dataset& data, const CollusionParams& params,
                                     std::span<const TextVector> texts);

// `reviewer_i reviewer_j weight` per line, reviewer_i < reviewer_j.
void write_collusion_graph(std::ostream& out, const CollusionGraph& g, const Dataset& data);

}  // namespace defrauder
