#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "defrauder/error.hpp"
#include "defrauder/evaluation.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace defrauder;
using testing_support::rv;

TEST(GroupSize, Examples) {
  EXPECT_DOUBLE_EQ(group_size_score(2), 0.5);
  EXPECT_NEAR(group_size_score(3), 0.731059, 1e-6);
  for (std::size_t n = 2; n < 30; ++n) {
    EXPECT_LT(group_size_score(n), 1.0);
    EXPECT_GT(group_size_score(n + 1), group_size_score(n));
  }
  for (std::size_t n = 30; n < 5000; ++n) {
    EXPECT_LE(group_size_score(n), 1.0);
    EXPECT_GE(group_size_score(n + 1), group_size_score(n));
  }
}

TEST(ReviewContent, Examples) {
  const auto table = TextVectorizer::pretrained({{"x", {1.0, 0.0}}, {"y", {0.5, std::sqrt(0.75)}}});
  const auto d = build_dataset({rv("a", "p", 5, 0, "x"), rv("b", "p", 5, 0, "y"), rv("c", "p", 5, 0, "x"),
                                rv("e", "p", 5, 0, ""), rv("f", "p", 5, 0, ""), rv("a", "q", 5, 0, "x")});
  const auto idx = [&](const char* n) { return *d.find_reviewer(n); };
  EXPECT_NEAR(review_content_similarity(make_group(d, {idx("a"), idx("b")}), d, table), 0.75, 1e-12);
  EXPECT_NEAR(review_content_similarity(make_group(d, {idx("a"), idx("c")}), d, table), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(review_content_similarity(make_group(d, {idx("e"), idx("f")}), d, table), 0.0);
  // b has no review on q; max over targets still picks p.
  auto g = make_group(d, {idx("a"), idx("b")});
  g.targets = {*d.find_product("q")};
  EXPECT_NEAR(review_content_similarity(g, d, table), 0.25, 1e-12);
}

TEST(ReviewContentProperty, MatchesExactCosineOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto reviews = testing_support::random_reviews(rng, 6, 4, 30, 0.6);
    const auto d = build_dataset(reviews);
    const auto stored = d.to_reviews();
    std::vector<ReviewerIndex> m;
    for (ReviewerIndex i = 0; i < d.num_reviewers(); ++i)
      if (rng.bernoulli(0.6)) m.push_back(i);
    if (m.size() < 2) continue;
    const auto g = make_group(d, m);
    double best = 0.0;
    for (auto p : g.targets) {
      double sum = 0;
      for (auto i : m)
        for (auto j : m) {
          const auto* a = oracle::find(stored, d.reviewer_name(i), d.product_name(p));
          const auto* b = oracle::find(stored, d.reviewer_name(j), d.product_name(p));
          if (a && b) sum += oracle::text_cosine(a->text, b->text);
        }
      best = std::max(best, sum / double(m.size() * m.size()));
    }
    const double got = review_content_similarity(g, d, TextVectorizer::hashed());
    EXPECT_NEAR(got, std::min(best, 1.0), 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(CdfEmd, ExamplesAndOracle) {
  const std::vector<double> half{0.0, 1.0}, same{0.3, 0.3, 0.3};
  EXPECT_DOUBLE_EQ(cdf_emd(half), 0.5);
  EXPECT_NEAR(cdf_emd(same), 0.3, 1e-15);
  EXPECT_THROW(cdf_emd(std::vector<double>{}), Error);
  EXPECT_THROW(cdf_emd(std::vector<double>{1.5}), Error);
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(1 + rng.below(30));
    for (auto& x : s) x = std::round(rng.uniform() * 1000) / 1000;
    EXPECT_NEAR(cdf_emd(s), oracle::emd_integral(s), 1e-6);
  }
}

TEST(Ndcg, ExamplesAndProperties) {
  const std::vector<double> sorted{3, 2, 1, 0}, swapped{0, 1};
  EXPECT_DOUBLE_EQ(ndcg_at_k(sorted, 4), 1.0);
  EXPECT_NEAR(ndcg_at_k(swapped, 2), 1.0 / std::log2(3.0), 1e-12);
  EXPECT_NEAR(ndcg_at_k(swapped, 2), 0.6309, 1e-4);
  EXPECT_DOUBLE_EQ(ndcg_at_k(std::vector<double>{0, 0}, 2), 1.0);
  EXPECT_THROW(ndcg_at_k(sorted, 0), Error);
  Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> rel(1 + rng.below(60));
    for (auto& r : rel) r = rng.bernoulli(0.3) ? rng.uniform() : 0.0;
    const std::size_t k = 1 + rng.below(70);
    const double v = ndcg_at_k(rel, k);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
    EXPECT_NEAR(v, oracle::ndcg(rel, k), 1e-12);
    auto scaled = rel;
    for (auto& r : scaled) r *= 7.5;
    EXPECT_NEAR(ndcg_at_k(scaled, k), v, 1e-12);
  }
}

TEST(GroupRelevance, Examples) {
  std::vector<Review> rs;
  for (auto u : {"a", "b", "c", "e", "u"}) rs.push_back(rv(u, "p", 5, 0));
  const auto d = build_dataset(rs, {}, LabelMap{{"a", true}, {"b", false}, {"c", false}, {"e", false}});
  const auto idx = [&](const char* n) { return *d.find_reviewer(n); };
  EXPECT_DOUBLE_EQ(group_relevance(make_group(d, {idx("a"), idx("b"), idx("c"), idx("e")}), d), 0.25);
  EXPECT_DOUBLE_EQ(group_relevance(make_group(d, {idx("a"), idx("u")}), d), 0.5);
  const auto all = build_dataset(rs, {}, LabelMap{{"a", true}, {"b", true}});
  EXPECT_DOUBLE_EQ(group_relevance(make_group(all, {idx("a"), idx("b")}), all), 1.0);
  EXPECT_THROW(group_relevance(make_group(build_dataset(rs), {0, 1}), build_dataset(rs)), Error);
}

TEST(Kolmogorov, TailValues) {
  EXPECT_DOUBLE_EQ(kolmogorov_q(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_q(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_q(1.63), 0.0098, 5e-4);
  EXPECT_NEAR(kolmogorov_q(0.5), 0.9639, 5e-4);
  double prev = 1.0;
  for (double l = 0.05; l < 4; l += 0.05) {
    const double q = kolmogorov_q(l);
    EXPECT_LE(q, prev + 1e-12);
    EXPECT_GE(q, 0.0);
    prev = q;
  }
}

TEST(KsTwoSample, StatisticMatchesOracle) {
  const std::vector<double> same{1, 2, 2, 3, 7};
  const auto self = ks_two_sample(same, same);
  EXPECT_DOUBLE_EQ(self.statistic, 0.0);
  EXPECT_DOUBLE_EQ(self.p_value, 1.0);
  EXPECT_THROW(ks_two_sample({}, same), Error);
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(1 + rng.below(40)), b(1 + rng.below(40));
    for (auto& x : a) x = double(rng.below(6));
    for (auto& x : b) x = double(rng.below(8));
    const auto r = ks_two_sample(a, b);
    EXPECT_NEAR(r.statistic, oracle::ks_statistic(a, b), 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    EXPECT_EQ(r.n_first, a.size());
  }
}

TEST(PairFeatures, Definitions) {
  const auto d = build_dataset({rv("a", "p", 5, 10), rv("a", "q", 3, 20), rv("b", "p", 1, 40), rv("b", "r", 1, 50)});
  EXPECT_DOUBLE_EQ(pair_feature(PairFeature::CoReviewedCount, 0, 1, d), 1.0);
  EXPECT_DOUBLE_EQ(pair_feature(PairFeature::RatingGap, 0, 1, d), 3.0);
  EXPECT_DOUBLE_EQ(pair_feature(PairFeature::TimeGap, 0, 1, d), 30.0);
  EXPECT_EQ(parse_pair_feature("time_gap"), PairFeature::TimeGap);
  EXPECT_THROW(parse_pair_feature("nope"), Error);
}

TEST(CoherenceKs, PlantedSignalAndErrors) {
  // 300 reviewers on 600 products; groups co-review 4 products each.
  std::vector<Review> rs;
  Rng rng(1);
  for (int u = 0; u < 300; ++u)
    for (int k = 0; k < 2; ++k) rs.push_back(rv("u" + std::to_string(u), "p" + std::to_string(rng.below(600)), 4, 0));
  for (int g = 0; g < 10; ++g)
    for (int m = 0; m < 4; ++m)
      for (int t = 0; t < 4; ++t)
        rs.push_back(rv("u" + std::to_string(g * 4 + m), "t" + std::to_string(g * 4 + t), 5, 0));
  const auto d = build_dataset(rs);
  std::vector<CandidateGroup> groups;
  for (int g = 0; g < 10; ++g) {
    std::vector<ReviewerIndex> m;
    for (int k = 0; k < 4; ++k) m.push_back(*d.find_reviewer("u" + std::to_string(g * 4 + k)));
    std::sort(m.begin(), m.end());
    groups.push_back(make_group(d, m));
  }
  const auto r = coherence_ks_test(d, groups, PairFeature::CoReviewedCount, 1000, 5);
  EXPECT_LT(r.p_value, 0.01);
  EXPECT_EQ(r.n_first, 60u);
  EXPECT_EQ(r.n_second, 1000u);
  EXPECT_EQ(coherence_ks_test(d, groups, PairFeature::CoReviewedCount, 1000, 5).statistic, r.statistic);
  EXPECT_THROW(coherence_ks_test(d, groups, PairFeature::CoReviewedCount, 99, 5), Error);
  EXPECT_THROW(coherence_ks_test(d, {}, PairFeature::CoReviewedCount, 1000, 5), Error);
}

TEST(MetricReport, Format) {
  MetricReport rep;
  rep.groups.push_back({3, 1, 2, 0.5, 0.75, 1.0});
  rep.emd_gs = 0.5;
  rep.emd_rcs = 0.75;
  rep.ndcg = {{10, 1.0}};
  std::ostringstream out;
  write_metric_report(out, rep);
  EXPECT_NE(out.str().find("ndcg@10=1\n"), std::string::npos);
  EXPECT_NE(out.str().find("ks_status=insufficient_pairs"), std::string::npos);
  std::ostringstream csv;
  write_group_scores_csv(csv, rep);
  EXPECT_EQ(csv.str(), "group_id,rank,size,gs,rcs,relevance\n3,1,2,0.5,0.75,1\n");
  EXPECT_EQ(parse_k_list("10,20"), (std::vector<std::size_t>{10, 20}));
  EXPECT_THROW(parse_k_list("10,,x"), Error);
}
