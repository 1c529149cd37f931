#include "defrauder/indicators.hpp"

#include <algorithm>
#include <cmath>

#include "defrauder/error.hpp"

namespace defrauder {
namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require_scorable(const CandidateGroup& g) {
  if (g.members.size() < 2 || g.targets.empty())
    throw Error(Errc::GroupTooSmall, "group needs at least 2 members and 1 target, has " +
                                         std::to_string(g.members.size()) + " and " +
                                         std::to_string(g.targets.size()));
}

std::size_t intersection_size(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// Population variance, two-pass.
template <typename T>
double variance(const std::vector<T>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (auto x : xs) mean += static_cast<double>(x);
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (auto x : xs) {
    const double d = static_cast<double>(x) - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(xs.size());
}

// Ratings and days of the group members who reviewed target p.
struct TargetReviews {
  std::vector<int> ratings;
  std::vector<Days> days;
};

TargetReviews member_reviews_on(const CandidateGroup& g, const Dataset& data, ProductIndex p) {
  TargetReviews out;
  for (auto i : g.members) {
    if (auto k = data.find_review(i, p)) {
      out.ratings.push_back(data.review(*k).rating);
      out.days.push_back(data.review(*k).day);
    }
  }
  return out;
}

}  // namespace

double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double penalty(std::size_t n_members, std::size_t n_targets) {
  if (n_members < 2 || n_targets < 1)
    throw Error(Errc::GroupTooSmall, "penalty needs |R| >= 2 and |P| >= 1");
  return logistic(static_cast<double>(n_members) + static_cast<double>(n_targets) - 3.0);
}

double penalty(const CandidateGroup& g) { return penalty(g.members.size(), g.targets.size()); }

double review_tightness(const CandidateGroup& g, const Dataset& data) {
  require_scorable(g);
  std::size_t reviews = 0;
  for (auto i : g.members) reviews += intersection_size(data.products_of(i), g.targets);
  const double ratio = static_cast<double>(reviews) /
                       (static_cast<double>(g.members.size()) * static_cast<double>(g.targets.size()));
  return ratio * penalty(g);
}

double neighbor_tightness(const CandidateGroup& g, const Dataset& data) {
  require_scorable(g);
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < g.members.size(); ++a)
    for (std::size_t b = a + 1; b < g.members.size(); ++b) {
      sum += jaccard(data.products_of(g.members[a]), data.products_of(g.members[b]));
      ++pairs;
    }
  return sum / static_cast<double>(pairs) * penalty(g);
}

double product_tightness(const CandidateGroup& g, const Dataset& data) {
  require_scorable(g);
  const auto first = data.products_of(g.members.front());
  std::vector<ProductIndex> inter(first.begin(), first.end());
  std::vector<ProductIndex> uni(first.begin(), first.end());
  std::vector<ProductIndex> tmp;
  for (std::size_t k = 1; k < g.members.size(); ++k) {
    const auto ps = data.products_of(g.members[k]);
    tmp.clear();
    std::set_intersection(inter.begin(), inter.end(), ps.begin(), ps.end(), std::back_inserter(tmp));
    inter.swap(tmp);
    tmp.clear();
    std::set_union(uni.begin(), uni.end(), ps.begin(), ps.end(), std::back_inserter(tmp));
    uni.swap(tmp);
  }
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size()) * penalty(g);
}

double rating_variance(const CandidateGroup& g, const Dataset& data) {
  require_scorable(g);
  double total = 0.0;
  for (auto p : g.targets) total += variance(member_reviews_on(g, data, p).ratings);
  const double mean_var = total / static_cast<double>(g.targets.size());
  return 2.0 * penalty(g) * (1.0 - logistic(mean_var));
}

double reviewer_ratio(const CandidateGroup& g, const Dataset& data) {
  require_scorable(g);
  double best = 0.0;
  for (auto p : g.targets) {
    const auto rev = data.reviewers_of(p);
    if (rev.empty()) continue;
    const double r = static_cast<double>(intersection_size(rev, g.members)) / static_cast<double>(rev.size());
    best = std::max(best, r);
  }
  return best;
}

double time_window(const CandidateGroup& g, const Dataset& data, double window_days) {
  require_scorable(g);
  if (!(window_days > 0.0)) throw Error(Errc::InvalidArgument, "time window must be positive");
  double total = 0.0;
  for (auto p : g.targets) {
    const double sd = std::sqrt(variance(member_reviews_on(g, data, p).days));
    if (sd <= window_days) total += 1.0 - sd / window_days;
  }
  return total / static_cast<double>(g.targets.size()) * penalty(g);
}

IndicatorVector collective_score(const CandidateGroup& g, const Dataset& data, const IndicatorParams& params) {
  IndicatorVector v;
  v.penalty = penalty(g);
  v.rt = review_tightness(g, data);
  v.nt = neighbor_tightness(g, data);
  v.pt = product_tightness(g, data);
  v.rv = rating_variance(g, data);
  v.rr = reviewer_ratio(g, data);
  v.tw = time_window(g, data, params.time_window_days);
  v.collective = (v.rt + v.nt + v.pt + v.rv + v.rr + v.tw) / 6.0;
  return v;
}

}  // namespace defrauder
