#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defrauder/model.hpp"
#include "defrauder/text.hpp"

namespace defrauder {

// 1 / (1 + exp(-(|R| - 2))).
double group_size_score(std::size_t n_members);
double group_size_score(const CandidateGroup& g);

// Max over targets p of (1/|R|^2) * sum over ordered member pairs (self-pairs
// included) of the cosine of their reviews on p. A member without a review
// on p contributes 0. `texts` is indexed like Dataset::review(k).
double review_content_similarity(const CandidateGroup& g, const Dataset& data, std::span<const TextVector> texts);
double review_content_similarity(const CandidateGroup& g, const Dataset& data, const TextVectorizer& vectorizer);

// Earth mover's distance from the empirical distribution of `scores` to the
// point mass at 0, i.e. their mean. Throws Error(EmptyInput), or
// Error(InvalidArgument) for a score outside [0, 1].
double cdf_emd(std::span<const double> scores);

// Linear-gain NDCG over the first k positions. 1 when the ideal DCG is 0.
double ndcg_at_k(std::span<const double> ranked_relevances, std::size_t k);

// Fraction of members labeled fraud; unlabeled members count as genuine.
// Throws Error(NoLabels) when the dataset carries no labels.
double group_relevance(const CandidateGroup& g, const Dataset& data);

enum class PairFeature { CoReviewedCount, RatingGap, TimeGap };

const char* pair_feature_name(PairFeature f) noexcept;
// Accepts the names pair_feature_name returns. Throws Error(InvalidArgument).
PairFeature parse_pair_feature(std::string_view text);

// CoReviewedCount: |P_i ∩ P_j|. RatingGap and TimeGap: absolute difference
// of the two reviewers' mean rating and mean review day.
double pair_feature(PairFeature f, ReviewerIndex i, ReviewerIndex j, const Dataset& data);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_first = 0;
  std::size_t n_second = 0;
};

// Limiting Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^(k-1) e^(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// Two-sample KS test with the asymptotic p-value Q(sqrt(nm/(n+m)) D).
// Throws Error(InsufficientPairs) when either sample is empty.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Compares the feature over within-group reviewer pairs against uniformly
// drawn pairs of distinct reviewers. Throws Error(InsufficientPairs) when no
// group has two members, n_random_pairs < 100, or the dataset has fewer than
// two reviewers.
KsResult coherence_ks_test(const Dataset& data, const std::vector<CandidateGroup>& groups, PairFeature feature,
                           std::size_t n_random_pairs, std::uint64_t seed);

struct GroupMetrics {
  std::size_t group_id = 0;
  std::size_t rank = 0;
  std::size_t size = 0;
  double gs = 0.0;
  double rcs = 0.0;
  double relevance = 0.0;
};

struct MetricReport {
  std::vector<GroupMetrics> groups;  // in rank order
  double emd_gs = 0.0;
  double emd_rcs = 0.0;
  std::vector<std::pair<std::size_t, double>> ndcg;  // (k, NDCG@k)
  PairFeature ks_feature = PairFeature::CoReviewedCount;
  std::optional<KsResult> ks;
};

// Flat `key=value` lines.
void write_metric_report(std::ostream& out, const MetricReport& report);
// group_id,rank,size,gs,rcs,relevance
void write_group_scores_csv(std::ostream& out, const MetricReport& report);

// Parses a comma list such as "10,20,30". Throws Error(InvalidArgument).
std::vector<std::size_t> parse_k_list(std::string_view text);

}  // namespace defrauder
