#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "defrauder/error.hpp"
#include "defrauder/ranking.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace defrauder;
using testing_support::rv;

namespace {

// n reviewers r00..r(n-1) all on product p.
Dataset flat_dataset(int n, bool labeled = false) {
  std::vector<Review> rs;
  LabelMap labels;
  for (int u = 0; u < n; ++u) {
    const std::string id = (u < 10 ? "r0" : "r") + std::to_string(u);
    rs.push_back(rv(id, "p", 5, 0));
    labels[id] = u % 2 == 0;
  }
  return labeled ? build_dataset(rs, {}, labels) : build_dataset(rs);
}

ScoredGroup scored(std::size_t id, std::vector<ReviewerIndex> members) {
  ScoredGroup s;
  s.id = id;
  s.group.members = std::move(members);
  s.group.targets = {0};
  return s;
}

ReviewerEmbedding line_embedding(const std::vector<double>& xs) {
  ReviewerEmbedding emb(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) emb.vector(static_cast<ReviewerIndex>(i))[0] = xs[i];
  return emb;
}

}  // namespace

TEST(GroupDispersion, Examples) {
  const auto emb = line_embedding({0.0, 2.0, 3.0, 3.0});
  const std::vector<ReviewerIndex> a{0, 1}, b{2, 3};
  EXPECT_DOUBLE_EQ(group_dispersion(a, emb), 1.0);
  EXPECT_DOUBLE_EQ(group_dispersion(b, emb), 0.0);
  const std::vector<ReviewerIndex> missing{0, 9};
  EXPECT_THROW(group_dispersion(missing, emb), Error);
}

TEST(GroupDispersion, MissingEmbeddingNamesReviewer) {
  const auto d = flat_dataset(3);
  const auto emb = line_embedding({0.0, 1.0});
  try {
    group_dispersion(make_group(d, {0, 2}), emb, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingEmbedding);
    EXPECT_NE(std::string(e.what()).find("r02"), std::string::npos);
  }
}

TEST(GroupDispersionProperty, OracleTranslationAndScaling) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(9), dim = 1 + rng.below(12);
    ReviewerEmbedding emb(n, dim), shifted(n, dim), scaled(n, dim);
    std::vector<std::vector<double>> vs(n, std::vector<double>(dim));
    std::vector<double> shift(dim);
    for (auto& s : shift) s = rng.uniform() * 200 - 100;
    const double c = 0.1 + rng.uniform() * 5;
    std::vector<ReviewerIndex> members;
    for (std::size_t i = 0; i < n; ++i) {
      members.push_back(static_cast<ReviewerIndex>(i));
      for (std::size_t k = 0; k < dim; ++k) {
        const double x = rng.uniform() * 2 - 1;
        vs[i][k] = x;
        emb.vector(i)[k] = x;
        shifted.vector(i)[k] = x + shift[k];
        scaled.vector(i)[k] = c * x;
      }
    }
    const double base = group_dispersion(members, emb);
    EXPECT_GT(base, 0.0);
    ReviewerEmbedding same(n, dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < dim; ++k) same.vector(i)[k] = vs[0][k] * 3.7 + shift[k];
    EXPECT_EQ(group_dispersion(members, same), 0.0);
    EXPECT_NEAR(base, oracle::dispersion(vs), 1e-12);
    EXPECT_NEAR(group_dispersion(members, shifted), base, 1e-9);
    EXPECT_NEAR(group_dispersion(members, scaled), c * c * base, 1e-12 * std::max(1.0, c * c));
  }
}

TEST(RankGroups, SortAndTieBreak) {
  const auto d = flat_dataset(12);
  const auto emb = line_embedding({0, 0.2, 5, 6, 9, 9, 1, 1, 1, 1, 1, 4});
  // dispersions: g0 {0,1} 0.01, g1 {2,3} 0.25, g2 {4,5} 0, g3 {6..10} 0, g4 {6,7,8} 0
  std::vector<ScoredGroup> groups{scored(0, {0, 1}), scored(1, {2, 3}), scored(2, {4, 5}),
                                  scored(3, {6, 7, 8, 9, 10}), scored(4, {6, 7, 8})};
  const auto asc = rank_groups(groups, emb, d);
  std::vector<std::size_t> ids;
  for (const auto& r : asc) ids.push_back(r.group_id);
  EXPECT_EQ(ids, (std::vector<std::size_t>{3, 4, 2, 0, 1}));
  for (std::size_t k = 0; k < asc.size(); ++k) EXPECT_EQ(asc[k].rank, k + 1);
  EXPECT_FALSE(asc[0].frac_labeled_fraud);

  const auto desc = rank_groups(groups, emb, d, RankOrder::Descending);
  ASSERT_EQ(desc.size(), asc.size());
  for (std::size_t k = 0; k < asc.size(); ++k) {
    EXPECT_EQ(desc[k].group_id, asc[asc.size() - 1 - k].group_id);
    EXPECT_EQ(desc[k].rank, k + 1);
  }
  EXPECT_THROW(rank_groups({}, emb, d), Error);
}

TEST(RankGroups, SpecExamples) {
  const auto d = flat_dataset(8);
  const auto emb = line_embedding({0, std::sqrt(0.4), 0, std::sqrt(2.0), 0, 0, 3, 3});
  const auto ranked = rank_groups({scored(0, {0, 1}), scored(1, {2, 3}), scored(2, {4, 5})}, emb, d);
  EXPECT_EQ(ranked[0].group_id, 2u);
  EXPECT_NEAR(ranked[1].dispersion, 0.1, 1e-12);
  EXPECT_NEAR(ranked[2].dispersion, 0.5, 1e-12);

  const auto tie = rank_groups({scored(0, {5, 6, 7}), scored(1, {0, 1, 2, 3, 4})}, line_embedding({1, 1, 1, 1, 1, 1, 1, 1}), d);
  EXPECT_EQ(tie[0].group.members.size(), 5u);
}

TEST(RankGroupsProperty, RandomDispersionsArePermutationAndOrdered) {
  Rng rng(3);
  const auto d = flat_dataset(40, true);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(40);
    for (auto& x : xs) x = std::round(rng.uniform() * 4) / 2;
    const auto emb = line_embedding(xs);
    std::vector<ScoredGroup> groups;
    for (std::size_t g = 0; g < 15; ++g) {
      std::vector<ReviewerIndex> m;
      for (ReviewerIndex i = 0; i < 40; ++i)
        if (rng.bernoulli(0.1)) m.push_back(i);
      if (m.size() < 2) m = {static_cast<ReviewerIndex>(g), static_cast<ReviewerIndex>(g + 20)};
      groups.push_back(scored(g, m));
    }
    const auto asc = rank_groups(groups, emb, d);
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < asc.size(); ++k) {
      ids.push_back(asc[k].group_id);
      ASSERT_TRUE(asc[k].frac_labeled_fraud);
      if (k == 0) continue;
      const auto& a = asc[k - 1];
      const auto& b = asc[k];
      EXPECT_LE(a.dispersion, b.dispersion);
      if (a.dispersion == b.dispersion) {
        EXPECT_GE(a.group.members.size(), b.group.members.size());
        if (a.group.members.size() == b.group.members.size()) EXPECT_LT(a.group_id, b.group_id);
      }
    }
    std::sort(ids.begin(), ids.end());
    for (std::size_t k = 0; k < ids.size(); ++k) EXPECT_EQ(ids[k], k);
  }
}

TEST(RankedCsv, RoundTrip) {
  const auto d = flat_dataset(4, true);
  const auto emb = line_embedding({0, 1, 0.3, 0.3});
  auto g0 = scored(0, {0, 1});
  g0.scores.collective = 0.625;
  const auto ranked = rank_groups({g0, scored(1, {2, 3})}, emb, d);
  std::ostringstream out;
  write_ranked_csv(out, ranked);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "rank,group_id,dispersion,size,n_targets,collective,frac_labeled_fraud");
  std::istringstream in(out.str());
  const auto rows = read_ranked_csv(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].group_id, 1u);
  EXPECT_EQ(rows[1].dispersion, 0.25);
  EXPECT_EQ(rows[1].collective, 0.625);
  EXPECT_EQ(rows[1].frac_labeled_fraud, 0.5);
  std::istringstream bad("rank,group_id\nx,1\n");
  EXPECT_THROW(read_ranked_csv(bad), Error);
}

TEST(RankOrderNames, Parse) {
  EXPECT_EQ(parse_rank_order("desc"), RankOrder::Descending);
  EXPECT_EQ(parse_rank_order("ascending"), RankOrder::Ascending);
  EXPECT_STREQ(rank_order_name(RankOrder::Descending), "descending");
  EXPECT_THROW(parse_rank_order("sideways"), Error);
}
