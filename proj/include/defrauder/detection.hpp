#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "defrauder/graph.hpp"
#include "defrauder/indicators.hpp"
#include "defrauder/model.hpp"

namespace defrauder {

struct DetectionParams {
  double tau_t_days = 20.0;
  double tau_spam = 0.4;
  double js_merge_threshold = 0.5;
  int max_iterations = 32;
  std::size_t min_group_size = 2;
  IndicatorParams indicators;
  unsigned threads = 1;
};

struct ScoredGroup {
  std::size_t id = 0;
  CandidateGroup group;
  IndicatorVector scores;
};

struct IterationStats {
  int level = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t isolated_groups = 0;
  std::size_t merged_groups = 0;
  std::size_t difference_groups = 0;
  std::size_t component_groups = 0;
  std::size_t filtered_out = 0;
  // Candidate attribute pairs examined by the subset scan.
  std::size_t pair_checks = 0;
};

struct DetectionResult {
  std::vector<ScoredGroup> groups;
  int iterations_run = 0;
  // True when max_iterations stopped a graph that still had edges.
  bool safeguard_fired = false;
  std::vector<IterationStats> iterations;
  std::size_t duplicates_removed = 0;
  std::size_t undersized_removed = 0;
};

void validate(const DetectionParams& params);

// Keeps the groups whose collective score is strictly above tau_spam, in
// input order. Groups too small to score are dropped.
std::vector<ScoredGroup> collective_filter(const std::vector<CandidateGroup>& groups, const Dataset& data,
                                           double tau_spam, const IndicatorParams& params = {},
                                           unsigned threads = 1);

// Iterated group extraction over the product-rating graph and its line
// graphs. Groups are returned in emission order, deduplicated by member set.
DetectionResult extract_groups(const Dataset& data, const DetectionParams& params = {});

// Same, starting from a prebuilt graph of any level.
DetectionResult extract_groups(const Dataset& data, ProductRatingGraph graph, const DetectionParams& params);

}  // namespace defrauder
