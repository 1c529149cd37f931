#include "defrauder/detection.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "defrauder/error.hpp"
#include "defrauder/parallel.hpp"

namespace defrauder {
namespace {

// |∩ P_m| / |∪ P_m| over the members' full product sets.
double member_product_jaccard(const Dataset& data, const ReviewerSet& members) {
  if (members.empty()) return 0.0;
  const auto first = data.products_of(members.front());
  std::vector<ProductIndex> inter(first.begin(), first.end());
  std::vector<ProductIndex> uni(first.begin(), first.end());
  std::vector<ProductIndex> tmp;
  for (std::size_t k = 1; k < members.size(); ++k) {
    const auto ps = data.products_of(members[k]);
    tmp.clear();
    std::set_intersection(inter.begin(), inter.end(), ps.begin(), ps.end(), std::back_inserter(tmp));
    inter.swap(tmp);
    tmp.clear();
    std::set_union(uni.begin(), uni.end(), ps.begin(), ps.end(), std::back_inserter(tmp));
    uni.swap(tmp);
  }
  return uni.empty() ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

ReviewerSet set_union(const ReviewerSet& a, const ReviewerSet& b) {
  ReviewerSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;
  }
};

struct Candidate {
  ReviewerSet members;
  Provenance provenance;
};

struct SubsetScan {
  std::vector<std::vector<std::uint32_t>> merged_into;  // per attribute i: the j's with A_i ⊊ A_j merged
  std::vector<char> consumed;
  std::vector<ReviewerSet> differences;
  std::size_t pair_checks = 0;
};

// Step 2 over distinct edge attributes. Decisions read only the attribute
// list as it stood at the start of the step, so the result does not depend
// on enumeration order.
SubsetScan scan_subsets(const Dataset& data, const std::vector<ReviewerSet>& attrs, double threshold,
                        unsigned threads) {
  const std::size_t n = attrs.size();
  std::vector<double> js(n);
  parallel_chunks(n, threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t d = b; d < e; ++d) js[d] = member_product_jaccard(data, attrs[d]);
  });

  std::vector<std::vector<std::uint32_t>> postings(data.num_reviewers());
  for (std::uint32_t d = 0; d < n; ++d)
    for (auto r : attrs[d]) postings[r].push_back(d);

  threads = std::max(1u, threads);
  struct Partial {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> merges;  // (i, j)
    std::vector<ReviewerSet> differences;
    std::size_t checks = 0;
  };
  std::vector<Partial> parts(threads);
  parallel_chunks(n, threads, [&](std::size_t b, std::size_t e, unsigned chunk) {
    auto& part = parts[chunk];
    ReviewerSet diff;
    for (std::size_t i = b; i < e; ++i) {
      const auto& ai = attrs[i];
      const std::vector<std::uint32_t>* best = nullptr;
      for (auto r : ai) {
        const auto& list = postings[r];
        if (!best || list.size() < best->size()) best = &list;
      }
      for (auto j : *best) {
        if (j == i) continue;
        ++part.checks;
        const auto& aj = attrs[j];
        if (aj.size() <= ai.size() || !std::includes(aj.begin(), aj.end(), ai.begin(), ai.end())) continue;
        if (js[j] > threshold) {
          part.merges.emplace_back(static_cast<std::uint32_t>(i), j);
        } else {
          diff.clear();
          std::set_difference(aj.begin(), aj.end(), ai.begin(), ai.end(), std::back_inserter(diff));
          if (member_product_jaccard(data, diff) > threshold) part.differences.push_back(diff);
        }
      }
    }
  });

  SubsetScan out;
  out.merged_into.resize(n);
  out.consumed.assign(n, 0);
  for (auto& part : parts) {
    for (auto [i, j] : part.merges) {
      out.merged_into[i].push_back(j);
      out.consumed[j] = 1;
    }
    for (auto& d : part.differences) out.differences.push_back(std::move(d));
    out.pair_checks += part.checks;
  }
  return out;
}

// Compacts the surviving part of a working graph into a fresh graph.
ProductRatingGraph compact(const ProductRatingGraph& g, const std::vector<char>& vertex_alive,
                           const std::vector<char>& edge_alive) {
  ProductRatingGraph out;
  out.level = g.level;
  std::vector<std::uint32_t> remap(g.num_vertices(), UINT32_MAX);
  for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
    if (!vertex_alive[v]) continue;
    remap[v] = static_cast<std::uint32_t>(out.vertex_attr.size());
    out.vertex_attr.push_back(g.vertex_attr[v]);
    if (!g.vertex_key.empty()) out.vertex_key.push_back(g.vertex_key[v]);
    if (!g.vertex_origin.empty()) out.vertex_origin.push_back(g.vertex_origin[v]);
  }
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    if (edge_alive[e]) out.edges.push_back({remap[g.edges[e].u], remap[g.edges[e].v], g.edges[e].attr});
  return out;
}

// One pass of the group detector over `g`. Appends raw candidates and
// returns the surviving graph.
ProductRatingGraph detect_once(const Dataset& data, const ProductRatingGraph& g, const DetectionParams& params,
                               std::vector<Candidate>& out, IterationStats& stats) {
  const std::size_t V = g.num_vertices();
  const std::size_t E = g.num_edges();
  std::vector<char> vertex_alive(V, 1);
  std::vector<char> edge_alive(E, 1);
  std::vector<std::uint32_t> degree(V, 0);
  for (const auto& e : g.edges) {
    ++degree[e.u];
    ++degree[e.v];
  }

  // (1) isolated vertices
  for (std::uint32_t v = 0; v < V; ++v) {
    if (degree[v] != 0) continue;
    out.push_back({g.vertex_attr[v], Provenance::IsolatedNode});
    vertex_alive[v] = 0;
    ++stats.isolated_groups;
  }

  // (2) subset scan over distinct edge attributes
  std::vector<std::uint32_t> order(E);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return g.edges[a].attr < g.edges[b].attr; });
  std::vector<ReviewerSet> attrs;
  std::vector<std::uint32_t> attr_of_edge(E);
  for (std::size_t k = 0; k < E; ++k) {
    if (k == 0 || g.edges[order[k]].attr != g.edges[order[k - 1]].attr) attrs.push_back(g.edges[order[k]].attr);
    attr_of_edge[order[k]] = static_cast<std::uint32_t>(attrs.size() - 1);
  }
  SubsetScan scan = scan_subsets(data, attrs, params.js_merge_threshold, params.threads);
  stats.pair_checks = scan.pair_checks;
  for (auto& d : scan.differences) {
    out.push_back({std::move(d), Provenance::EdgeDifference});
    ++stats.difference_groups;
  }

  // (3) merged sets become groups; the consumed edges leave the graph
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (scan.merged_into[i].empty()) continue;
    ReviewerSet k;
    for (auto j : scan.merged_into[i]) k = set_union(k, attrs[j]);
    out.push_back({std::move(k), Provenance::MergedEdgeSet});
    ++stats.merged_groups;
  }
  for (std::size_t e = 0; e < E; ++e) {
    if (!scan.consumed[attr_of_edge[e]]) continue;
    edge_alive[e] = 0;
    --degree[g.edges[e].u];
    --degree[g.edges[e].v];
  }
  for (std::uint32_t v = 0; v < V; ++v)
    if (vertex_alive[v] && degree[v] == 0) vertex_alive[v] = 0;

  // (4) connected components with more than two vertices
  DisjointSets dsu(V);
  for (std::size_t e = 0; e < E; ++e)
    if (edge_alive[e]) dsu.unite(g.edges[e].u, g.edges[e].v);
  std::vector<std::uint32_t> comp_size(V, 0);
  for (std::uint32_t v = 0; v < V; ++v)
    if (vertex_alive[v]) ++comp_size[dsu.find(v)];
  std::map<std::uint32_t, ReviewerSet> comp_members;  // keyed by root = smallest vertex id
  for (std::size_t e = 0; e < E; ++e) {
    if (!edge_alive[e]) continue;
    const auto root = dsu.find(g.edges[e].u);
    if (comp_size[root] <= 2) continue;
    auto& acc = comp_members[root];
    acc = set_union(acc, g.edges[e].attr);
    edge_alive[e] = 0;
  }
  for (std::uint32_t v = 0; v < V; ++v)
    if (vertex_alive[v] && comp_size[dsu.find(v)] > 2) vertex_alive[v] = 0;
  for (auto& [root, members] : comp_members) {
    out.push_back({std::move(members), Provenance::ConnectedComponent});
    ++stats.component_groups;
  }

  return compact(g, vertex_alive, edge_alive);
}

}  // namespace

void validate(const DetectionParams& p) {
  if (!(p.tau_t_days > 0.0)) throw Error(Errc::InvalidArgument, "tau_t must be positive");
  if (!(p.tau_spam >= 0.0 && p.tau_spam <= 1.0)) throw Error(Errc::InvalidArgument, "tau_spam must lie in [0, 1]");
  if (!(p.js_merge_threshold > 0.0 && p.js_merge_threshold <= 1.0))
    throw Error(Errc::InvalidArgument, "merge threshold must lie in (0, 1]");
  if (p.max_iterations < 1) throw Error(Errc::InvalidArgument, "max_iterations must be at least 1");
  if (!(p.indicators.time_window_days > 0.0)) throw Error(Errc::InvalidArgument, "time window must be positive");
}

std::vector<ScoredGroup> collective_filter(const std::vector<CandidateGroup>& groups, const Dataset& data,
                                           double tau_spam, const IndicatorParams& params, unsigned threads) {
  std::vector<std::optional<ScoredGroup>> slots(groups.size());
  parallel_chunks(groups.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t k = b; k < e; ++k) {
      const auto& g = groups[k];
      if (g.members.size() < 2 || g.targets.empty()) continue;
      auto scores = collective_score(g, data, params);
      if (scores.collective > tau_spam) slots[k] = ScoredGroup{k, g, scores};
    }
  });
  std::vector<ScoredGroup> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

DetectionResult extract_groups(const Dataset& data, ProductRatingGraph graph, const DetectionParams& params) {
  validate(params);
  DetectionResult result;
  std::set<ReviewerSet> seen;
  for (;;) {
    IterationStats stats;
    stats.level = graph.level;
    stats.vertices = graph.num_vertices();
    stats.edges = graph.num_edges();
    std::vector<Candidate> raw;
    ProductRatingGraph rest = detect_once(data, graph, params, raw, stats);
    ++result.iterations_run;

    // (5) score and filter this pass's new candidates
    std::vector<CandidateGroup> fresh;
    for (auto& c : raw) {
      if (!seen.insert(c.members).second) {
        ++result.duplicates_removed;
        continue;
      }
      fresh.push_back(make_group(data, std::move(c.members), c.provenance, result.iterations_run));
    }
    auto kept = collective_filter(fresh, data, params.tau_spam, params.indicators, params.threads);
    stats.filtered_out = fresh.size() - kept.size();
    for (auto& k : kept) result.groups.push_back(std::move(k));
    result.iterations.push_back(stats);

    if (rest.num_edges() <= 1) break;
    if (result.iterations_run >= params.max_iterations) {
      result.safeguard_fired = true;
      break;
    }
    graph = line_graph(rest);
  }

  const auto before = result.groups.size();
  std::erase_if(result.groups,
                [&](const ScoredGroup& s) { return s.group.members.size() < params.min_group_size; });
  result.undersized_removed = before - result.groups.size();
  for (std::size_t k = 0; k < result.groups.size(); ++k) result.groups[k].id = k;
  return result;
}

DetectionResult extract_groups(const Dataset& data, const DetectionParams& params) {
  validate(params);
  return extract_groups(data, build_product_rating_graph(data, params.tau_t_days, params.threads), params);
}

}  // namespace defrauder
