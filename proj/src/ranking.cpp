#include "defrauder/ranking.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "defrauder/error.hpp"
#include "defrauder/evaluation.hpp"
#include "defrauder/format.hpp"
#include "defrauder/ingestion.hpp"
#include "defrauder/parallel.hpp"
#include "defrauder/simd/kernels.hpp"

namespace defrauder {
namespace {

double dispersion_unchecked(std::span<const ReviewerIndex> members, const ReviewerEmbedding& emb) {
  if (members.empty()) return 0.0;
  // Centroid accumulated as offsets from the first member, so that identical
  // vectors give exactly 0.
  const auto origin = emb.vector(members.front());
  std::vector<double> offset(emb.dimension(), 0.0), diff(emb.dimension());
  const double inv = 1.0 / static_cast<double>(members.size());
  for (auto i : members) {
    const auto v = emb.vector(i);
    std::copy(v.begin(), v.end(), diff.begin());
    simd::axpy(-1.0, origin, std::span<double>(diff));
    simd::axpy(inv, std::span<const double>(diff), std::span<double>(offset));
  }
  std::vector<double> centroid(origin.begin(), origin.end());
  simd::axpy(1.0, std::span<const double>(offset), std::span<double>(centroid));
  double total = 0.0;
  for (auto i : members) total += simd::squared_distance(emb.vector(i), std::span<const double>(centroid));
  return total * inv;
}

}  // namespace

const char* rank_order_name(RankOrder order) noexcept {
  return order == RankOrder::Ascending ? "ascending" : "descending";
}

RankOrder parse_rank_order(std::string_view text) {
  if (text == "ascending" || text == "asc") return RankOrder::Ascending;
  if (text == "descending" || text == "desc") return RankOrder::Descending;
  throw Error(Errc::InvalidArgument, "unknown rank order '" + std::string(text) + "'");
}

double group_dispersion(std::span<const ReviewerIndex> members, const ReviewerEmbedding& emb) {
  for (auto i : members)
    if (!emb.contains(i)) throw Error(Errc::MissingEmbedding, "reviewer index " + std::to_string(i));
  return dispersion_unchecked(members, emb);
}

double group_dispersion(const CandidateGroup& g, const ReviewerEmbedding& emb, const Dataset& data) {
  for (auto i : g.members) {
    if (emb.contains(i)) continue;
    throw Error(Errc::MissingEmbedding,
                i < data.num_reviewers() ? data.reviewer_name(i) : "reviewer index " + std::to_string(i));
  }
  return dispersion_unchecked(g.members, emb);
}

std::vector<RankedGroup> rank_groups(const std::vector<ScoredGroup>& groups, const ReviewerEmbedding& emb,
                                     const Dataset& data, RankOrder order, unsigned threads) {
  if (groups.empty()) throw Error(Errc::EmptyInput, "no groups to rank");
  std::vector<double> disp(groups.size());
  parallel_chunks(groups.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (auto k = b; k < e; ++k) disp[k] = group_dispersion(groups[k].group, emb, data);
  });
  std::vector<std::size_t> perm(groups.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (disp[a] != disp[b]) return disp[a] < disp[b];
    const auto sa = groups[a].group.members.size(), sb = groups[b].group.members.size();
    if (sa != sb) return sa > sb;
    return groups[a].id < groups[b].id;
  });
  if (order == RankOrder::Descending) std::reverse(perm.begin(), perm.end());

  std::vector<RankedGroup> out;
  out.reserve(groups.size());
  for (std::size_t r = 0; r < perm.size(); ++r) {
    const auto& g = groups[perm[r]];
    RankedGroup rg;
    rg.rank = r + 1;
    rg.group_id = g.id;
    rg.group = g.group;
    rg.dispersion = disp[perm[r]];
    rg.scores = g.scores;
    if (data.has_labels()) rg.frac_labeled_fraud = group_relevance(g.group, data);
    out.push_back(std::move(rg));
  }
  return out;
}

void write_ranked_csv(std::ostream& out, const std::vector<RankedGroup>& ranked) {
  const bool labeled = std::any_of(ranked.begin(), ranked.end(),
                                   [](const RankedGroup& r) { return r.frac_labeled_fraud.has_value(); });
  out << "rank,group_id,dispersion,size,n_targets,collective";
  if (labeled) out << ",frac_labeled_fraud";
  out << '\n';
  for (const auto& r : ranked) {
    out << r.rank << ',' << r.group_id << ',' << format_real(r.dispersion) << ',' << r.group.members.size() << ','
        << r.group.targets.size() << ',' << format_real(r.scores.collective);
    if (labeled) out << ',' << (r.frac_labeled_fraud ? format_real(*r.frac_labeled_fraud) : "");
    out << '\n';
  }
}

std::vector<RankedRow> read_ranked_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error(Errc::EmptyInput, "ranked report is empty");
  const std::vector<std::string> base{"rank", "group_id", "dispersion", "size", "n_targets", "collective"};
  const bool labeled = fields.size() == base.size() + 1;
  if (fields.size() < base.size() || !std::equal(base.begin(), base.end(), fields.begin()) ||
      (labeled && fields.back() != "frac_labeled_fraud") || fields.size() > base.size() + 1)
    throw Error(Errc::MalformedRow, "ranked report header does not match");
  std::vector<RankedRow> out;
  while (reader.next(fields)) {
    const auto line = reader.record_line();
    auto bad = [&](const char* why) {
      return Error(Errc::MalformedRow, "ranked report line " + std::to_string(line) + ": " + why);
    };
    if (fields.size() != base.size() + (labeled ? 1 : 0)) throw bad("wrong field count");
    RankedRow r;
    if (!parse_size(fields[0], r.rank) || !parse_size(fields[1], r.group_id) ||
        !parse_real(fields[2], r.dispersion) || !parse_size(fields[3], r.size) ||
        !parse_size(fields[4], r.n_targets) || !parse_real(fields[5], r.collective))
      throw bad("unparsable field");
    if (labeled && !fields[6].empty()) {
      double f = 0.0;
      if (!parse_real(fields[6], f)) throw bad("unparsable label fraction");
      r.frac_labeled_fraud = f;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<RankedRow> read_ranked_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  try {
    return read_ranked_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

}  // namespace defrauder
