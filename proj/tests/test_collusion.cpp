#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "defrauder/collusion.hpp"
#include "defrauder/error.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace defrauder;
using testing_support::rv;

namespace {

std::vector<TextVector> hashed_texts(const Dataset& d) { return vectorize_reviews(d, TextVectorizer::hashed()); }

ReviewerIndex idx(const Dataset& d, const char* name) { return *d.find_reviewer(name); }

// Pair (a, b) on p0 plus `filler` single-review products each reviewed by
// `crowd` other reviewers, so that max_rev - rev(p0) is large.
std::vector<Review> lonely_pair(const std::string& text, int crowd) {
  std::vector<Review> rs{rv("a", "p0", 5, 0, text), rv("b", "p0", 5, 0, text)};
  for (int k = 0; k < crowd; ++k) rs.push_back(rv("c" + std::to_string(k), "hot", 3, k));
  return rs;
}

}  // namespace

TEST(ProductSuspicion, Examples) {
  EXPECT_NEAR(product_suspicion(10, 8, 0.4), 0.0, 1e-15);
  EXPECT_NEAR(product_suspicion(7, 7, 0.4), 2.0 / (1.0 + std::exp(std::pow(2.0, 0.4))) - 1.0, 1e-15);
  EXPECT_NEAR(product_suspicion(7, 7, 0.4), -0.5782, 1e-4);
  EXPECT_GT(product_suspicion(1000000, 1, 0.4), 0.99);
  EXPECT_THROW(product_suspicion(ProductIndex{5}, build_dataset({rv("a", "p", 5, 0)}), 0.4), Error);
}

TEST(ProductSuspicion, MonotoneInDelta) {
  double prev = -1.0;
  for (std::size_t rev = 500; rev-- > 0;) {
    const double s = product_suspicion(500, rev, 0.4);
    EXPECT_GT(s, prev);
    EXPECT_GT(s, -1.0);
    EXPECT_LT(s, 1.0);
    prev = s;
  }
}

TEST(PairCollusion, Boundaries) {
  const auto d = build_dataset({rv("a", "p", 5, 0, "x y"), rv("b", "p", 5, 21, "x y"), rv("c", "p", 4, 0, "x y"),
                                rv("e", "p", 5, 20, "x y"), rv("f", "q", 5, 0, "x")});
  const auto texts = hashed_texts(d);
  CollusionParams params;
  const auto p = *d.find_product("p");
  EXPECT_DOUBLE_EQ(pair_collusion(idx(d, "a"), idx(d, "b"), p, d, params, texts), 0.0);
  // |dr| = 1 >= tau_r = 0.8
  EXPECT_DOUBLE_EQ(pair_collusion(idx(d, "a"), idx(d, "c"), p, d, params, texts), 0.0);
  params.tau_r_percent = 25.0;  // tau_r = 1: still excluded at equality
  EXPECT_DOUBLE_EQ(pair_collusion(idx(d, "a"), idx(d, "c"), p, d, params, texts), 0.0);
  params = {};
  // |dt| = 20 = tau_t: kept with zero time term
  const double sp = product_suspicion(p, d, 0.4);
  EXPECT_NEAR(pair_collusion(idx(d, "a"), idx(d, "e"), p, d, params, texts), sp * (0.3 * 0 + 0.3 + 0.4), 1e-15);
  EXPECT_THROW(pair_collusion(idx(d, "a"), idx(d, "f"), p, d, params, texts), Error);
}

TEST(PairCollusion, IdenticalReviewsGiveSuspicion) {
  const auto d = build_dataset(lonely_pair("fast shipping", 9));
  const auto texts = hashed_texts(d);
  const auto p = *d.find_product("p0");
  EXPECT_NEAR(pair_collusion(idx(d, "a"), idx(d, "b"), p, d, {}, texts), product_suspicion(p, d, 0.4), 1e-12);
}

TEST(PairSpamicity, LargeDeltaExample) {
  const auto d = build_dataset(lonely_pair("great item", 4000));
  const auto texts = hashed_texts(d);
  const double phi = pair_spamicity(idx(d, "a"), idx(d, "b"), d, {}, texts);
  EXPECT_NEAR(phi, 0.4621, 2e-3);
  const double sp = product_suspicion(*d.find_product("p0"), d, 0.4);
  EXPECT_NEAR(phi, 2.0 / (1.0 + std::exp(-sp)) - 1.0, 1e-12);
  const auto g = build_collusion_graph(d, {}, texts);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].i, std::min(idx(d, "a"), idx(d, "b")));
  EXPECT_DOUBLE_EQ(g.edges[0].weight, phi);
}

TEST(PairSpamicity, DisjointProductsAreZero) {
  const auto d = build_dataset({rv("a", "p", 5, 0), rv("b", "q", 5, 0)});
  EXPECT_DOUBLE_EQ(pair_spamicity(0, 1, d, {}, hashed_texts(d)), 0.0);
  const auto g = build_collusion_graph(d, {}, hashed_texts(d));
  EXPECT_EQ(g.num_nodes, 2u);
  EXPECT_TRUE(g.edges.empty());
  EXPECT_EQ(g.candidate_pairs, 0u);
}

TEST(CollusionGraph, NonPositiveEdgesDropped) {
  // Only product: delta = 0, suspicion < 0.
  const auto d = build_dataset({rv("a", "p", 5, 0, "same"), rv("b", "p", 5, 0, "same")});
  const auto g = build_collusion_graph(d, {}, hashed_texts(d));
  EXPECT_TRUE(g.edges.empty());
  EXPECT_EQ(g.candidate_pairs, 1u);
  EXPECT_EQ(g.dropped_pairs, 1u);
  EXPECT_LT(pair_spamicity(0, 1, d, {}, hashed_texts(d)), 0.0);
}

TEST(CollusionParamsCheck, TextDominance) {
  CollusionParams p;
  EXPECT_NO_THROW(validate(p));
  p.alpha = 0.5;
  p.gamma = 0.4;
  EXPECT_THROW(validate(p), Error);
}

TEST(CollusionGraphProperty, MatchesBruteForce) {
  Rng rng(2024);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(19));
    const auto reviews = testing_support::random_reviews(rng, n, 2 + static_cast<int>(rng.below(8)), 40, 0.4);
    const auto d = build_dataset(reviews);
    const auto texts = hashed_texts(d);
    const auto g = build_collusion_graph(d, {}, texts);
    const auto stored = d.to_reviews();

    std::map<std::pair<ReviewerIndex, ReviewerIndex>, double> edges;
    for (const auto& e : g.edges) {
      EXPECT_LT(e.i, e.j);
      EXPECT_GT(e.weight, 0.0);
      EXPECT_LT(e.weight, 1.0);
      edges[{e.i, e.j}] = e.weight;
    }
    std::size_t candidates = 0;
    for (ReviewerIndex i = 0; i < d.num_reviewers(); ++i)
      for (ReviewerIndex j = i + 1; j < d.num_reviewers(); ++j) {
        const auto a = oracle::products_of(stored, d.reviewer_name(i));
        const auto b = oracle::products_of(stored, d.reviewer_name(j));
        if (oracle::inter_size(a, b) > 0) ++candidates;
        const double expect = oracle::phi(stored, d.reviewer_name(i), d.reviewer_name(j), {});
        const double got = pair_spamicity(i, j, d, {}, texts);
        EXPECT_NEAR(got, expect, 1e-12);
        EXPECT_EQ(got, pair_spamicity(j, i, d, {}, texts));
        auto it = edges.find({i, j});
        if (expect > 1e-12) {
          ASSERT_NE(it, edges.end());
          EXPECT_NEAR(it->second, expect, 1e-12);
        } else if (expect < -1e-12) {
          EXPECT_EQ(it, edges.end());
        }
      }
    EXPECT_EQ(g.candidate_pairs, candidates);
    EXPECT_EQ(g.candidate_pairs, g.edges.size() + g.dropped_pairs);
  }
}

TEST(CollusionGraph, ThreadCountDoesNotChangeResult) {
  Rng rng(5);
  const auto d = build_dataset(testing_support::random_reviews(rng, 60, 25, 30, 0.2));
  const auto texts = hashed_texts(d);
  CollusionParams p;
  const auto one = build_collusion_graph(d, p, texts);
  p.threads = 4;
  const auto four = build_collusion_graph(d, p, texts);
  EXPECT_EQ(one.edges, four.edges);
  EXPECT_EQ(one.candidate_pairs, four.candidate_pairs);
}

TEST(CollusionGraph, CandidatePairsFollowProductIndex) {
  // 200 reviewers, each on a private product, plus one product shared by 5.
  std::vector<Review> rs;
  for (int u = 0; u < 200; ++u) rs.push_back(rv("u" + std::to_string(u), "own" + std::to_string(u), 4, u));
  for (int u = 0; u < 5; ++u) rs.push_back(rv("u" + std::to_string(u), "shared", 4, 0));
  const auto d = build_dataset(rs);
  const auto g = build_collusion_graph(d, {}, hashed_texts(d));
  EXPECT_EQ(g.candidate_pairs, 10u);
}

TEST(CollusionGraph, Dump) {
  const auto d = build_dataset(lonely_pair("great item", 50));
  const auto g = build_collusion_graph(d, {}, hashed_texts(d));
  std::ostringstream out;
  write_collusion_graph(out, g, d);
  EXPECT_EQ(out.str().rfind("a b ", 0), 0u);
}
