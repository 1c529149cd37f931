#include "defrauder/graph.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include "defrauder/error.hpp"
#include "defrauder/parallel.hpp"

namespace defrauder {
namespace {

std::uint64_t edge_key(std::uint32_t u, std::uint32_t v) { return (std::uint64_t{u} << 32) | v; }

}  // namespace

ProductRatingGraph build_product_rating_graph(const Dataset& data, double tau_t_days, unsigned threads) {
  if (!(tau_t_days > 0.0)) throw Error(Errc::InvalidArgument, "tau_t must be positive");
  ProductRatingGraph g;
  g.level = 0;

  // Vertices, and per-review vertex ids.
  std::vector<std::uint32_t> review_vertex(data.num_reviews());
  for (ProductIndex p = 0; p < data.num_products(); ++p) {
    const auto reviewers = data.reviewers_of(p);
    const auto ids = data.reviews_of(p);
    std::vector<int> ratings;
    for (auto k : ids) ratings.push_back(data.review(k).rating);
    std::sort(ratings.begin(), ratings.end());
    ratings.erase(std::unique(ratings.begin(), ratings.end()), ratings.end());
    const auto base = static_cast<std::uint32_t>(g.vertex_attr.size());
    for (int r : ratings) {
      g.vertex_key.emplace_back(p, r);
      g.vertex_attr.emplace_back();
    }
    for (std::size_t n = 0; n < ids.size(); ++n) {
      const int r = data.review(ids[n]).rating;
      const auto offset = static_cast<std::uint32_t>(std::lower_bound(ratings.begin(), ratings.end(), r) - ratings.begin());
      review_vertex[ids[n]] = base + offset;
      g.vertex_attr[base + offset].push_back(reviewers[n]);
    }
  }

  // Edges, accumulated per reviewer chunk so attributes come out sorted.
  const std::size_t R = data.num_reviewers();
  threads = std::max(1u, threads);
  std::vector<std::unordered_map<std::uint64_t, ReviewerSet>> partial(threads);
  parallel_chunks(R, threads, [&](std::size_t begin, std::size_t end, unsigned chunk) {
    auto& acc = partial[chunk];
    std::vector<std::pair<Days, std::uint32_t>> by_day;
    for (std::size_t i = begin; i < end; ++i) {
      const auto reviewer = static_cast<ReviewerIndex>(i);
      const std::size_t first = data.first_review_of(reviewer);
      const std::size_t count = data.products_of(reviewer).size();
      by_day.clear();
      for (std::size_t k = first; k < first + count; ++k)
        by_day.emplace_back(data.review(k).day, static_cast<std::uint32_t>(k));
      std::sort(by_day.begin(), by_day.end());
      for (std::size_t a = 0; a < by_day.size(); ++a) {
        for (std::size_t b = a + 1; b < by_day.size(); ++b) {
          if (static_cast<double>(by_day[b].first - by_day[a].first) > tau_t_days) break;
          std::uint32_t u = review_vertex[by_day[a].second];
          std::uint32_t v = review_vertex[by_day[b].second];
          if (u > v) std::swap(u, v);
          acc[edge_key(u, v)].push_back(reviewer);
        }
      }
    }
  });

  std::unordered_map<std::uint64_t, ReviewerSet> merged = std::move(partial[0]);
  for (unsigned t = 1; t < partial.size(); ++t)
    for (auto& [key, attr] : partial[t]) {
      auto& dst = merged[key];
      dst.insert(dst.end(), attr.begin(), attr.end());
    }
  std::vector<std::uint64_t> keys;
  keys.reserve(merged.size());
  for (const auto& kv : merged) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  g.edges.reserve(keys.size());
  for (auto key : keys)
    g.edges.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffu),
                       std::move(merged[key])});
  return g;
}

ProductRatingGraph line_graph(const ProductRatingGraph& g) {
  if (g.edges.empty()) throw Error(Errc::NoEdges, "line graph of an edgeless graph");
  ProductRatingGraph out;
  out.level = g.level + 1;
  out.vertex_attr.reserve(g.edges.size());
  out.vertex_origin.reserve(g.edges.size());
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
    out.vertex_attr.push_back(g.edges[e].attr);
    out.vertex_origin.push_back(e);
  }

  std::vector<std::vector<std::uint32_t>> incident(g.num_vertices());
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
    incident[g.edges[e].u].push_back(e);
    incident[g.edges[e].v].push_back(e);
  }
  ReviewerSet common;
  for (const auto& inc : incident) {
    for (std::size_t a = 0; a < inc.size(); ++a)
      for (std::size_t b = a + 1; b < inc.size(); ++b) {
        const auto& x = g.edges[inc[a]].attr;
        const auto& y = g.edges[inc[b]].attr;
        common.clear();
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
        if (!common.empty()) out.edges.push_back({inc[a], inc[b], common});
      }
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  return out;
}

void write_graph_dump(std::ostream& out, const ProductRatingGraph& g, const Dataset& data) {
  auto label = [&](std::uint32_t v) {
    if (g.level == 0) return data.product_name(g.vertex_key[v].first) + "@" + std::to_string(g.vertex_key[v].second);
    return "e" + std::to_string(g.vertex_origin[v]);
  };
  for (const auto& e : g.edges) {
    out << label(e.u) << ';' << label(e.v) << ';';
    for (std::size_t k = 0; k < e.attr.size(); ++k) out << (k ? "," : "") << data.reviewer_name(e.attr[k]);
    out << '\n';
  }
}

}  // namespace defrauder
