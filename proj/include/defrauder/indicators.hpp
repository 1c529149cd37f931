#pragma once

#include <iosfwd>
#include <span>

#include "defrauder/model.hpp"

namespace defrauder {

struct IndicatorParams {
  double time_window_days = 30.0;  // T in the time-window indicator
};

// The six group indicators, their unweighted mean, and the size penalty.
struct IndicatorVector {
  double rt = 0.0;  // review tightness
  double nt = 0.0;  // neighbor tightness
  double pt = 0.0;  // product tightness
  double rv = 0.0;  // rating variance
  double rr = 0.0;  // product reviewer ratio
  double tw = 0.0;  // time window
  double collective = 0.0;
  double penalty = 0.0;
};

// Logistic size penalty 1 / (1 + exp(-(|R| + |P| - 3))), in [0.5, 1).
// Throws Error(GroupTooSmall) when |R| < 2 or |P| < 1.
double penalty(std::size_t n_members, std::size_t n_targets);
double penalty(const CandidateGroup& g);

// Each indicator takes a group whose members and targets index into `data`.
// All but reviewer_ratio are scaled by the penalty.
double review_tightness(const CandidateGroup& g, const Dataset& data);
double neighbor_tightness(const CandidateGroup& g, const Dataset& data);
double product_tightness(const CandidateGroup& g, const Dataset& data);
double rating_variance(const CandidateGroup& g, const Dataset& data);
double reviewer_ratio(const CandidateGroup& g, const Dataset& data);
double time_window(const CandidateGroup& g, const Dataset& data, double window_days = 30.0);

IndicatorVector collective_score(const CandidateGroup& g, const Dataset& data,
                                 const IndicatorParams& params = {});

// Jaccard similarity of two sorted index sets; 0 when both are empty.
double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

}  // namespace defrauder
