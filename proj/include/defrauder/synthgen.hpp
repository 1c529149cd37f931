#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "defrauder/format.hpp"
#include "defrauder/model.hpp"
#include "defrauder/random.hpp"

namespace defrauder {

struct PlantedGroupSpec {
  std::size_t size = 4;
  std::size_t n_targets = 3;
  Days time_spread_days = 3;
  int rating_spread = 0;
  double paraphrase_rate = 0.8;

  friend bool operator==(const PlantedGroupSpec&, const PlantedGroupSpec&) = default;
};

struct CampaignSpec {
  std::size_t n_organic_reviewers = 2000;
  std::size_t n_products = 1000;
  std::size_t n_organic_reviews = 4000;
  std::vector<PlantedGroupSpec> planted;
  RatingScale rating_scale;
  std::uint64_t seed = 1;

  friend bool operator==(const CampaignSpec&, const CampaignSpec&) = default;
};

// Days covered by organic reviews, starting at kSynthStartDay (2020-01-01).
inline constexpr Days kSynthSpanDays = 365;
inline constexpr Days kSynthStartDay = 18262;

// Throws Error(SpecInvalid) naming the offending field.
void validate(const CampaignSpec& spec);

struct SyntheticCorpus {
  std::vector<Review> reviews;  // organic first, then planted, in generation order
  LabelMap labels;
  Dataset dataset;
  // One record per planted group with its members and targets.
  std::vector<GroupRecord> ground_truth;
};

// Pure function of the spec.
SyntheticCorpus generate(const CampaignSpec& spec);

// Key-value spec file:
//   seed = 7
//   n_organic_reviewers = 2000
//   n_products = 1000
//   n_organic_reviews = 4000
//   rating_min = 1
//   rating_max = 5
//   group = size:4 targets:3 time_spread:5 rating_spread:0 paraphrase:0.8 count:2
// `#` starts a comment. Throws Error(SpecInvalid).
CampaignSpec parse_campaign_spec(std::istream& in);
CampaignSpec load_campaign_spec(const std::string& path);
void write_campaign_spec(std::ostream& out, const CampaignSpec& spec);

// The fixed template pool organic and planted texts are drawn from.
const std::vector<std::string>& review_templates();
// Replaces each word that has synonyms by a random synonym with probability `rate`.
std::string paraphrase(const std::string& text, double rate, Rng& rng);

}  // namespace defrauder
