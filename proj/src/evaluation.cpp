#include "defrauder/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "defrauder/error.hpp"
#include "defrauder/format.hpp"
#include "defrauder/random.hpp"

namespace defrauder {

double group_size_score(std::size_t n_members) {
  return 1.0 / (1.0 + std::exp(-(static_cast<double>(n_members) - 2.0)));
}

double group_size_score(const CandidateGroup& g) { return group_size_score(g.members.size()); }

double review_content_similarity(const CandidateGroup& g, const Dataset& data, std::span<const TextVector> texts) {
  const std::size_t n = g.members.size();
  if (n == 0) return 0.0;
  std::vector<const TextVector*> vecs(n);
  double best = 0.0;
  for (auto p : g.targets) {
    for (std::size_t a = 0; a < n; ++a) {
      const auto k = data.find_review(g.members[a], p);
      vecs[a] = k ? &texts[*k] : nullptr;
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      if (!vecs[a]) continue;
      sum += cosine(*vecs[a], *vecs[a]);
      for (std::size_t b = a + 1; b < n; ++b)
        if (vecs[b]) sum += 2.0 * cosine(*vecs[a], *vecs[b]);
    }
    best = std::max(best, sum / static_cast<double>(n * n));
  }
  return std::min(best, 1.0);
}

double review_content_similarity(const CandidateGroup& g, const Dataset& data, const TextVectorizer& vectorizer) {
  std::vector<TextVector> texts(data.num_reviews());
  for (auto i : g.members) {
    const auto first = data.first_review_of(i);
    const auto n = data.products_of(i).size();
    for (std::size_t k = first; k < first + n; ++k) texts[k] = vectorizer.vectorize(data.text(k));
  }
  return review_content_similarity(g, data, texts);
}

double cdf_emd(std::span<const double> scores) {
  if (scores.empty()) throw Error(Errc::EmptyInput, "no scores");
  double sum = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw Error(Errc::InvalidArgument, "score outside [0, 1]: " + format_real(s));
    sum += s;
  }
  return sum / static_cast<double>(scores.size());
}

double ndcg_at_k(std::span<const double> rel, std::size_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
  const std::size_t n = std::min(k, rel.size());
  auto dcg = [n](std::span<const double> r) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += r[i] / std::log2(static_cast<double>(i) + 2.0);
    return s;
  };
  std::vector<double> ideal(rel.begin(), rel.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg(ideal);
  if (idcg <= 0.0) return 1.0;
  return std::min(1.0, dcg(rel) / idcg);
}

double group_relevance(const CandidateGroup& g, const Dataset& data) {
  if (!data.has_labels()) throw Error(Errc::NoLabels, "dataset has no fraud labels");
  if (g.members.empty()) return 0.0;
  std::size_t fraud = 0;
  for (auto i : g.members)
    if (data.label(i).value_or(false)) ++fraud;
  return static_cast<double>(fraud) / static_cast<double>(g.members.size());
}

const char* pair_feature_name(PairFeature f) noexcept {
  switch (f) {
    case PairFeature::CoReviewedCount: return "co_reviewed_count";
    case PairFeature::RatingGap: return "rating_gap";
    case PairFeature::TimeGap: return "time_gap";
  }
  return "?";
}

PairFeature parse_pair_feature(std::string_view text) {
  for (auto f : {PairFeature::CoReviewedCount, PairFeature::RatingGap, PairFeature::TimeGap})
    if (text == pair_feature_name(f)) return f;
  throw Error(Errc::InvalidArgument, "unknown pair feature '" + std::string(text) + "'");
}

namespace {

double mean_rating(ReviewerIndex i, const Dataset& data) {
  const auto first = data.first_review_of(i);
  const auto n = data.products_of(i).size();
  double s = 0.0;
  for (std::size_t k = first; k < first + n; ++k) s += data.review(k).rating;
  return s / static_cast<double>(n);
}

double mean_day(ReviewerIndex i, const Dataset& data) {
  const auto first = data.first_review_of(i);
  const auto n = data.products_of(i).size();
  double s = 0.0;
  for (std::size_t k = first; k < first + n; ++k) s += static_cast<double>(data.review(k).day);
  return s / static_cast<double>(n);
}

}  // namespace

double pair_feature(PairFeature f, ReviewerIndex i, ReviewerIndex j, const Dataset& data) {
  switch (f) {
    case PairFeature::CoReviewedCount: {
      const auto a = data.products_of(i), b = data.products_of(j);
      std::size_t common = 0;
      auto x = a.begin(), y = b.begin();
      while (x != a.end() && y != b.end()) {
        if (*x < *y) ++x;
        else if (*y < *x) ++y;
        else {
          ++common;
          ++x;
          ++y;
        }
      }
      return static_cast<double>(common);
    }
    case PairFeature::RatingGap: return std::abs(mean_rating(i, data) - mean_rating(j, data));
    case PairFeature::TimeGap: return std::abs(mean_day(i, data) - mean_day(j, data));
  }
  return 0.0;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series converges fast for small lambda.
    const double pi = std::numbers::pi;
    const double t = pi * pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * t);
      s += term;
      if (term < 1e-300) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += sign * term;
    sign = -sign;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::InsufficientPairs, "KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  std::size_t x = 0, y = 0;
  double d = 0.0;
  while (x < a.size() && y < b.size()) {
    const double v = std::min(a[x], b[y]);
    while (x < a.size() && a[x] == v) ++x;
    while (y < b.size() && b[y] == v) ++y;
    d = std::max(d, std::abs(static_cast<double>(x) / n - static_cast<double>(y) / m));
  }
  KsResult r;
  r.statistic = d;
  r.n_first = a.size();
  r.n_second = b.size();
  r.p_value = kolmogorov_q(std::sqrt(n * m / (n + m)) * d);
  return r;
}

KsResult coherence_ks_test(const Dataset& data, const std::vector<CandidateGroup>& groups, PairFeature feature,
                           std::size_t n_random_pairs, std::uint64_t seed) {
  if (n_random_pairs < 100) throw Error(Errc::InsufficientPairs, "need at least 100 random pairs");
  if (data.num_reviewers() < 2) throw Error(Errc::InsufficientPairs, "dataset has fewer than two reviewers");
  std::vector<double> within;
  for (const auto& g : groups)
    for (std::size_t a = 0; a < g.members.size(); ++a)
      for (std::size_t b = a + 1; b < g.members.size(); ++b)
        within.push_back(pair_feature(feature, g.members[a], g.members[b], data));
  if (within.empty()) throw Error(Errc::InsufficientPairs, "no group has two members");
  Rng rng(seed);
  std::vector<double> random;
  random.reserve(n_random_pairs);
  const auto n = data.num_reviewers();
  for (std::size_t k = 0; k < n_random_pairs; ++k) {
    const auto i = static_cast<ReviewerIndex>(rng.below(n));
    auto j = static_cast<ReviewerIndex>(rng.below(n - 1));
    if (j >= i) ++j;
    random.push_back(pair_feature(feature, i, j, data));
  }
  return ks_two_sample(std::move(within), std::move(random));
}

void write_metric_report(std::ostream& out, const MetricReport& r) {
  out << "groups=" << r.groups.size() << '\n';
  if (!r.groups.empty()) {
    out << "emd_gs=" << format_real(r.emd_gs) << '\n';
    out << "emd_rcs=" << format_real(r.emd_rcs) << '\n';
  }
  for (const auto& [k, v] : r.ndcg) out << "ndcg@" << k << '=' << format_real(v) << '\n';
  out << "ks_feature=" << pair_feature_name(r.ks_feature) << '\n';
  if (r.ks) {
    out << "ks_statistic=" << format_real(r.ks->statistic) << '\n';
    out << "ks_p_value=" << format_real(r.ks->p_value) << '\n';
    out << "ks_group_pairs=" << r.ks->n_first << '\n';
    out << "ks_random_pairs=" << r.ks->n_second << '\n';
  } else {
    out << "ks_status=insufficient_pairs\n";
  }
}

void write_group_scores_csv(std::ostream& out, const MetricReport& r) {
  out << "group_id,rank,size,gs,rcs,relevance\n";
  for (const auto& g : r.groups)
    out << g.group_id << ',' << g.rank << ',' << g.size << ',' << format_real(g.gs) << ',' << format_real(g.rcs)
        << ',' << format_real(g.relevance) << '\n';
}

std::vector<std::size_t> parse_k_list(std::string_view text) {
  std::vector<std::size_t> ks;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::size_t k = 0;
    if (!parse_size(text.substr(start, pos - start), k) || k == 0)
      throw Error(Errc::InvalidArgument, "bad k list '" + std::string(text) + "'");
    ks.push_back(k);
    start = pos + 1;
  }
  return ks;
}

}  // namespace defrauder
