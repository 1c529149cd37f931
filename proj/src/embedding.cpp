#include "defrauder/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>

#include "defrauder/error.hpp"
#include "defrauder/format.hpp"
#include "defrauder/parallel.hpp"
#include "defrauder/random.hpp"
#include "defrauder/simd/kernels.hpp"

namespace defrauder {
namespace {

// Vose alias sampler over non-negative weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights) { build(weights); }

  void build(std::span<const double> weights) {
    const std::size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    double total = 0.0;
    for (double w : weights) total += w;
    if (n == 0 || !(total > 0.0)) return;
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t k = 0; k < n; ++k) {
      scaled[k] = weights[k] * static_cast<double>(n) / total;
      (scaled[k] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(k));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (auto l : large) prob_[l] = 1.0;
    for (auto s : small) prob_[s] = 1.0;
  }

  std::uint32_t sample(Rng& rng) const {
    const auto k = static_cast<std::uint32_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[k] ? k : alias_[k];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> neighbors;  // sorted per node
  std::vector<double> weights;

  std::size_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
  std::span<const std::uint32_t> nbrs(std::uint32_t v) const {
    return {neighbors.data() + offsets[v], degree(v)};
  }
  std::span<const double> wts(std::uint32_t v) const { return {weights.data() + offsets[v], degree(v)}; }
  bool connected(std::uint32_t a, std::uint32_t b) const {
    const auto n = nbrs(a);
    return std::binary_search(n.begin(), n.end(), b);
  }
};

Adjacency make_adjacency(const CollusionGraph& g) {
  Adjacency adj;
  const std::size_t n = g.num_nodes;
  adj.offsets.assign(n + 1, 0);
  for (const auto& e : g.edges) {
    ++adj.offsets[e.i + 1];
    ++adj.offsets[e.j + 1];
  }
  for (std::size_t v = 0; v < n; ++v) adj.offsets[v + 1] += adj.offsets[v];
  adj.neighbors.resize(adj.offsets[n]);
  adj.weights.resize(adj.offsets[n]);
  std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  // Edges are sorted by (i, j), which leaves each neighbor list sorted too:
  // a node's smaller neighbors arrive as `j` before its larger ones as `i`.
  for (const auto& e : g.edges) {
    adj.neighbors[cursor[e.i]] = e.j;
    adj.weights[cursor[e.i]++] = e.weight;
    adj.neighbors[cursor[e.j]] = e.i;
    adj.weights[cursor[e.j]++] = e.weight;
  }
  for (std::size_t v = 0; v < n; ++v) {
    const auto b = adj.offsets[v], e = adj.offsets[v + 1];
    std::vector<std::pair<std::uint32_t, double>> tmp;
    for (auto k = b; k < e; ++k) tmp.emplace_back(adj.neighbors[k], adj.weights[k]);
    if (!std::is_sorted(tmp.begin(), tmp.end())) {
      std::sort(tmp.begin(), tmp.end());
      for (auto k = b; k < e; ++k) std::tie(adj.neighbors[k], adj.weights[k]) = tmp[k - b];
    }
  }
  return adj;
}

struct WalkCorpus {
  std::vector<std::uint32_t> tokens;
  std::vector<std::size_t> offsets{0};

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const std::uint32_t> walk(std::size_t k) const {
    return {tokens.data() + offsets[k], offsets[k + 1] - offsets[k]};
  }
};

WalkCorpus build_corpus(const CollusionGraph& g, const EmbeddingParams& params, std::uint64_t seed) {
  const Adjacency adj = make_adjacency(g);
  const std::size_t n = g.num_nodes;
  const bool unbiased = params.return_bias == 1.0 && params.inout_bias == 1.0;
  std::vector<AliasTable> first_order(n);
  for (std::uint32_t v = 0; v < n; ++v)
    if (adj.degree(v) > 0) first_order[v].build(adj.wts(v));

  Rng rng(mix_seed(seed, 1));
  WalkCorpus corpus;
  std::vector<std::uint32_t> order(n);
  std::vector<double> biased;
  for (std::size_t round = 0; round < params.walks_per_node; ++round) {
    for (std::uint32_t v = 0; v < n; ++v) order[v] = v;
    for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    for (auto start : order) {
      corpus.tokens.push_back(start);
      std::size_t len = 1;
      std::uint32_t prev = start, cur = start;
      while (len < params.walk_length && adj.degree(cur) > 0) {
        std::uint32_t next;
        if (len == 1 || unbiased) {
          next = adj.nbrs(cur)[first_order[cur].sample(rng)];
        } else {
          const auto nb = adj.nbrs(cur);
          const auto w = adj.wts(cur);
          biased.resize(nb.size());
          double total = 0.0;
          for (std::size_t k = 0; k < nb.size(); ++k) {
            double bias = 1.0 / params.inout_bias;
            if (nb[k] == prev) bias = 1.0 / params.return_bias;
            else if (adj.connected(prev, nb[k])) bias = 1.0;
            total += biased[k] = w[k] * bias;
          }
          double u = rng.uniform() * total;
          std::size_t k = 0;
          while (k + 1 < nb.size() && u >= biased[k]) u -= biased[k++];
          next = nb[k];
        }
        corpus.tokens.push_back(next);
        prev = cur;
        cur = next;
        ++len;
      }
      corpus.offsets.push_back(corpus.tokens.size());
    }
  }
  return corpus;
}

struct SkipGram {
  std::size_t dim;
  std::vector<float> syn0;
  std::vector<float> syn1;

  std::span<float> in(std::uint32_t v) { return {syn0.data() + std::size_t{v} * dim, dim}; }
  std::span<float> out(std::uint32_t v) { return {syn1.data() + std::size_t{v} * dim, dim}; }
};

void train_walks(SkipGram& model, const WalkCorpus& corpus, std::size_t begin, std::size_t end,
                 const AliasTable& noise, const EmbeddingParams& params, Rng& rng,
                 std::atomic<std::size_t>& processed, std::size_t total) {
  std::vector<float> neu1e(model.dim);
  const double lr0 = params.learning_rate;
  for (std::size_t w = begin; w < end; ++w) {
    const auto walk = corpus.walk(w);
    if (walk.size() < 2) {
      processed.fetch_add(walk.size(), std::memory_order_relaxed);
      continue;
    }
    for (std::size_t pos = 0; pos < walk.size(); ++pos) {
      const double progress =
          static_cast<double>(processed.fetch_add(1, std::memory_order_relaxed)) / static_cast<double>(total + 1);
      const auto alpha = static_cast<float>(lr0 * std::max(1e-4, 1.0 - progress));
      const std::uint32_t center = walk[pos];
      const std::size_t reach = params.window - rng.below(params.window);
      const std::size_t lo = pos >= reach ? pos - reach : 0;
      const std::size_t hi = std::min(walk.size() - 1, pos + reach);
      for (std::size_t c = lo; c <= hi; ++c) {
        if (c == pos) continue;
        const auto ctx = model.in(walk[c]);
        std::fill(neu1e.begin(), neu1e.end(), 0.0f);
        for (std::size_t d = 0; d <= params.negative; ++d) {
          std::uint32_t target = center;
          float label = 1.0f;
          if (d > 0) {
            target = noise.sample(rng);
            if (target == center) continue;
            label = 0.0f;
          }
          const auto tgt = model.out(target);
          const float f = simd::dot(std::span<const float>(ctx), std::span<const float>(tgt));
          const float g = (label - 1.0f / (1.0f + std::exp(-f))) * alpha;
          simd::axpy(g, std::span<const float>(tgt), std::span<float>(neu1e));
          simd::axpy(g, std::span<const float>(ctx), tgt);
        }
        simd::axpy(1.0f, std::span<const float>(neu1e), ctx);
      }
    }
  }
}

}  // namespace

void validate(const EmbeddingParams& p) {
  if (p.dimension == 0) throw Error(Errc::InvalidArgument, "embedding dimension must be positive");
  if (p.walk_length == 0 || p.walks_per_node == 0) throw Error(Errc::InvalidArgument, "walks must be non-empty");
  if (p.window == 0) throw Error(Errc::InvalidArgument, "window must be positive");
  if (!(p.return_bias > 0.0) || !(p.inout_bias > 0.0)) throw Error(Errc::InvalidArgument, "p and q must be positive");
  if (p.epochs == 0) throw Error(Errc::InvalidArgument, "epochs must be positive");
  if (!(p.learning_rate > 0.0)) throw Error(Errc::InvalidArgument, "learning rate must be positive");
}

std::vector<std::vector<std::uint32_t>> generate_walks(const CollusionGraph& g, const EmbeddingParams& params,
                                                       std::uint64_t seed) {
  validate(params);
  const auto corpus = build_corpus(g, params, seed);
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto w = corpus.walk(k);
    out.emplace_back(w.begin(), w.end());
  }
  return out;
}

ReviewerEmbedding embed_reviewers(const CollusionGraph& g, const EmbeddingParams& params, std::uint64_t seed) {
  validate(params);
  if (g.num_nodes == 0) throw Error(Errc::EmptyGraph, "collusion graph has no nodes");
  const std::size_t n = g.num_nodes;
  const std::size_t dim = params.dimension;
  const WalkCorpus corpus = build_corpus(g, params, seed);

  SkipGram model{dim, std::vector<float>(n * dim), std::vector<float>(n * dim, 0.0f)};
  {
    Rng init(mix_seed(seed, 2));
    for (auto& x : model.syn0) x = static_cast<float>((init.uniform() - 0.5) / static_cast<double>(dim));
  }

  // Noise distribution: corpus frequency^0.75 over nodes seen in multi-node walks.
  std::vector<double> freq(n, 0.0);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto w = corpus.walk(k);
    if (w.size() < 2) continue;
    for (auto v : w) freq[v] += 1.0;
  }
  bool any_context = false;
  for (auto& f : freq) {
    any_context = any_context || f > 0.0;
    f = std::pow(f, 0.75);
  }

  if (any_context) {
    const AliasTable noise(freq);
    const std::size_t total = corpus.tokens.size() * params.epochs;
    std::atomic<std::size_t> processed{0};
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      if (params.threads <= 1) {
        Rng rng(mix_seed(seed, 3 + epoch));
        train_walks(model, corpus, 0, corpus.size(), noise, params, rng, processed, total);
      } else {
        parallel_chunks(corpus.size(), params.threads, [&](std::size_t b, std::size_t e, unsigned t) {
          Rng rng(mix_seed(seed, 1000 + epoch * 1024 + t));
          train_walks(model, corpus, b, e, noise, params, rng, processed, total);
        });
      }
    }
  }

  ReviewerEmbedding emb(n, dim);
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto src = model.in(v);
    auto dst = emb.vector(v);
    for (std::size_t k = 0; k < dim; ++k) dst[k] = static_cast<double>(src[k]);
    if (!params.normalize) continue;
    const double norm = std::sqrt(simd::dot(std::span<const double>(dst), std::span<const double>(dst)));
    if (norm > 0.0)
      for (auto& x : dst) x /= norm;
  }
  return emb;
}

void write_embedding(std::ostream& out, const ReviewerEmbedding& emb, const Dataset& data) {
  out << emb.size() << ' ' << emb.dimension() << '\n';
  for (ReviewerIndex i = 0; i < emb.size(); ++i) {
    out << data.reviewer_name(i);
    for (double x : emb.vector(i)) out << ' ' << format_real(x);
    out << '\n';
  }
}

}  // namespace defrauder
