#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "defrauder/detection.hpp"
#include "defrauder/model.hpp"

namespace defrauder {

// Shortest decimal text that round-trips to the same double.
std::string format_real(double x);

// Strict parse of a whole field as a double. Returns false on any junk.
bool parse_real(std::string_view text, double& out);
bool parse_size(std::string_view text, std::size_t& out);

// One line of a groups file:
// group_id<TAB>reviewer_ids<TAB>product_ids<TAB>collective_score
// with comma-separated id lists.
struct GroupRecord {
  std::size_t id = 0;
  std::vector<std::string> reviewers;
  std::vector<std::string> products;
  double collective = 0.0;

  friend bool operator==(const GroupRecord&, const GroupRecord&) = default;
};

GroupRecord to_record(const ScoredGroup& g, const Dataset& data);

void write_groups(std::ostream& out, const std::vector<GroupRecord>& groups);
void write_groups(std::ostream& out, const std::vector<ScoredGroup>& groups, const Dataset& data);

// Throws Error(MalformedRow) naming the line, or Error(Io) for the path form.
std::vector<GroupRecord> read_groups(std::istream& in);
std::vector<GroupRecord> read_groups(const std::string& path);

// Maps a record's ids onto `data`. An empty product list falls back to the
// co-reviewed targets. Throws Error(UnknownReviewer) or Error(UnknownProduct).
CandidateGroup resolve_group(const GroupRecord& record, const Dataset& data);

// group_id,rt,nt,pt,rv,rr,tw,collective,penalty,size,n_targets
void write_indicator_csv(std::ostream& out, const std::vector<ScoredGroup>& groups);

}  // namespace defrauder
