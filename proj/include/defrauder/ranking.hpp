#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defrauder/detection.hpp"
#include "defrauder/embedding.hpp"

namespace defrauder {

enum class RankOrder { Ascending, Descending };

const char* rank_order_name(RankOrder order) noexcept;
// Accepts "ascending"/"asc" and "descending"/"desc". Throws Error(InvalidArgument).
RankOrder parse_rank_order(std::string_view text);

// Mean squared Euclidean distance of the member vectors to their centroid.
// Throws Error(MissingEmbedding) when a member has no vector.
double group_dispersion(std::span<const ReviewerIndex> members, const ReviewerEmbedding& emb);
// Same, naming the reviewer in the error.
double group_dispersion(const CandidateGroup& g, const ReviewerEmbedding& emb, const Dataset& data);

struct RankedGroup {
  std::size_t rank = 0;  // 1-based
  std::size_t group_id = 0;
  CandidateGroup group;
  double dispersion = 0.0;
  IndicatorVector scores;
  std::optional<double> frac_labeled_fraud;
};

// Sorts by dispersion (ascending puts the tightest group first). Ties go to
// the larger group, then the smaller group id. Descending is the exact
// reverse of the ascending permutation. Throws Error(EmptyInput) for no groups.
std::vector<RankedGroup> rank_groups(const std::vector<ScoredGroup>& groups, const ReviewerEmbedding& emb,
                                     const Dataset& data, RankOrder order = RankOrder::Ascending,
                                     unsigned threads = 1);

// rank,group_id,dispersion,size,n_targets,collective[,frac_labeled_fraud]
// The last column appears when any row carries a label fraction.
void write_ranked_csv(std::ostream& out, const std::vector<RankedGroup>& ranked);

struct RankedRow {
  std::size_t rank = 0;
  std::size_t group_id = 0;
  double dispersion = 0.0;
  std::size_t size = 0;
  std::size_t n_targets = 0;
  double collective = 0.0;
  std::optional<double> frac_labeled_fraud;

  friend bool operator==(const RankedRow&, const RankedRow&) = default;
};

// Rows come back in file order. Throws Error(MalformedRow) or Error(Io).
std::vector<RankedRow> read_ranked_csv(std::istream& in);
std::vector<RankedRow> read_ranked_csv(const std::string& path);

}  // namespace defrauder
