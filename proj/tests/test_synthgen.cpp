#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "defrauder/error.hpp"
#include "defrauder/evaluation.hpp"
#include "defrauder/format.hpp"
#include "defrauder/indicators.hpp"
#include "defrauder/ingestion.hpp"
#include "defrauder/synthgen.hpp"

using namespace defrauder;

namespace {

CampaignSpec small_spec() {
  CampaignSpec s;
  s.n_organic_reviewers = 200;
  s.n_products = 150;
  s.n_organic_reviews = 400;
  s.seed = 9;
  return s;
}

}  // namespace

TEST(Synthgen, DeterministicForSeed) {
  auto spec = small_spec();
  spec.planted.assign(3, PlantedGroupSpec{});
  const auto a = generate(spec);
  const auto b = generate(spec);
  EXPECT_EQ(a.reviews, b.reviews);
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
  spec.seed = 10;
  EXPECT_NE(generate(spec).reviews, a.reviews);
}

TEST(Synthgen, OrganicShape) {
  const auto c = generate(small_spec());
  EXPECT_EQ(c.reviews.size(), 400u);
  EXPECT_EQ(c.dataset.num_reviewers(), 200u);
  EXPECT_TRUE(c.ground_truth.empty());
  for (const auto& [id, fraud] : c.labels) EXPECT_FALSE(fraud);
  EXPECT_EQ(c.labels.size(), 200u);
  for (ReviewerIndex i = 0; i < c.dataset.num_reviewers(); ++i) {
    EXPECT_GE(c.dataset.products_of(i).size(), 1u);
    EXPECT_LE(c.dataset.products_of(i).size(), 5u);
  }
  for (const auto& r : c.reviews) {
    EXPECT_GE(r.day, kSynthStartDay);
    EXPECT_LT(r.day, kSynthStartDay + kSynthSpanDays);
    EXPECT_TRUE(c.dataset.rating_scale().contains(r.rating));
    EXPECT_FALSE(r.text.empty());
  }
}

TEST(Synthgen, ZeroSpreadGroupsHitIndicatorCeiling) {
  auto spec = small_spec();
  spec.planted = {{4, 3, 0, 0, 0.0}, {3, 2, 0, 0, 0.0}, {5, 4, 0, 0, 0.0}};
  const auto c = generate(spec);
  ASSERT_EQ(c.ground_truth.size(), 3u);
  const auto vec = TextVectorizer::hashed();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& truth = c.ground_truth[k];
    EXPECT_EQ(truth.reviewers.size(), spec.planted[k].size);
    EXPECT_EQ(truth.products.size(), spec.planted[k].n_targets);
    for (const auto& id : truth.reviewers) EXPECT_TRUE(c.labels.at(id));
    const auto g = resolve_group(truth, c.dataset);
    const auto s = collective_score(g, c.dataset);
    EXPECT_NEAR(s.tw, s.penalty, 1e-12);
    EXPECT_NEAR(s.rv, s.penalty, 1e-12);
    EXPECT_NEAR(review_content_similarity(g, c.dataset, vec), 1.0, 1e-12);
    EXPECT_NEAR(truth.collective, s.collective, 1e-12);
  }
}

TEST(Synthgen, SpreadsAreRespected) {
  auto spec = small_spec();
  spec.planted = {{6, 3, 4, 1, 0.5}, {6, 3, 4, 1, 0.5}};
  const auto c = generate(spec);
  for (const auto& truth : c.ground_truth) {
    std::set<ProductIndex> targets;
    for (const auto& p : truth.products) targets.insert(*c.dataset.find_product(p));
    EXPECT_EQ(targets.size(), 3u);
    Days lo = INT64_MAX, hi = INT64_MIN;
    int rlo = 99, rhi = -99;
    for (const auto& u : truth.reviewers) {
      const auto i = *c.dataset.find_reviewer(u);
      for (auto p : targets) {
        const auto k = c.dataset.find_review(i, p);
        ASSERT_TRUE(k);
        const auto& r = c.dataset.review(*k);
        lo = std::min(lo, r.day);
        hi = std::max(hi, r.day);
        rlo = std::min(rlo, r.rating);
        rhi = std::max(rhi, r.rating);
      }
    }
    EXPECT_LE(hi - lo, 4);
    EXPECT_LE(rhi - rlo, 2);
  }
}

TEST(Synthgen, PlantedTextsAreParaphrases) {
  Rng rng(3);
  const std::string t = review_templates().front();
  EXPECT_EQ(paraphrase(t, 0.0, rng), t);
  const auto p = paraphrase(t, 1.0, rng);
  std::istringstream a(t), b(p);
  std::size_t na = 0, nb = 0;
  for (std::string w; a >> w;) ++na;
  for (std::string w; b >> w;) ++nb;
  EXPECT_EQ(na, nb);
  EXPECT_EQ(review_templates().size(), 50u);
}

TEST(CampaignSpecFile, RoundTrip) {
  std::istringstream in(
      "# fixture\nseed = 7\nn_organic_reviewers = 100\nn_products = 80\nn_organic_reviews = 150\n"
      "group = size:4 targets:3 time_spread:5 rating_spread:0 paraphrase:0.8 count:2\n"
      "group = size:3 targets:2 time_spread:1 rating_spread:1 paraphrase:0.25\n");
  const auto spec = parse_campaign_spec(in);
  EXPECT_EQ(spec.seed, 7u);
  ASSERT_EQ(spec.planted.size(), 3u);
  EXPECT_EQ(spec.planted[2].size, 3u);
  std::ostringstream out;
  write_campaign_spec(out, spec);
  std::istringstream again(out.str());
  EXPECT_EQ(parse_campaign_spec(again), spec);
}

TEST(CampaignSpecFile, Invalid) {
  const auto code = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_campaign_spec(in);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Io;
  };
  EXPECT_EQ(code("n_products = 0\n"), Errc::SpecInvalid);
  EXPECT_EQ(code("bogus = 1\n"), Errc::SpecInvalid);
  EXPECT_EQ(code("group = size:1\n"), Errc::SpecInvalid);
  EXPECT_EQ(code("group = size:4 paraphrase:1.5\n"), Errc::SpecInvalid);
  EXPECT_EQ(code("group = size:4 time_spread:-1\n"), Errc::SpecInvalid);
  EXPECT_EQ(code("group = size:4 targets:5000\n"), Errc::SpecInvalid);
  EXPECT_EQ(code("n_organic_reviewers = 10\nn_organic_reviews = 5\n"), Errc::SpecInvalid);
}

TEST(Synthgen, ReviewsSurviveCsvRoundTrip) {
  auto spec = small_spec();
  spec.planted.assign(2, PlantedGroupSpec{});
  const auto c = generate(spec);
  std::ostringstream out;
  write_reviews_csv(out, c.reviews);
  std::istringstream in(out.str());
  const auto loaded = load_reviews(in, ReviewFileSchema{});
  EXPECT_EQ(loaded.dataset, build_dataset(c.reviews));
}
