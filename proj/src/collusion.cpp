#include "defrauder/collusion.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "defrauder/error.hpp"
#include "defrauder/format.hpp"
#include "defrauder/parallel.hpp"

namespace defrauder {
namespace {

struct Thresholds {
  double tau_t;
  double tau_r;
};

double collusion_term(const ReviewRecord& a, const ReviewRecord& b, const TextVector& ta, const TextVector& tb,
                      double suspicion, const CollusionParams& params, const Thresholds& th) {
  const double dt = std::abs(static_cast<double>(a.day - b.day));
  const double dr = std::abs(static_cast<double>(a.rating - b.rating));
  if (dt > th.tau_t || dr >= th.tau_r) return 0.0;
  return suspicion * (params.alpha * (1.0 - dt / th.tau_t) + params.beta * (1.0 - dr / th.tau_r) +
                      params.gamma * cosine(ta, tb));
}

double squash(double sigma) { return 2.0 / (1.0 + std::exp(-sigma)) - 1.0; }

}  // namespace

void validate(const CollusionParams& p) {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(p.alpha) || !unit(p.beta) || !unit(p.gamma))
    throw Error(Errc::InvalidArgument, "alpha, beta, gamma must lie in [0, 1]");
  if (std::abs(p.alpha + p.beta + p.gamma - 1.0) > 1e-9)
    throw Error(Errc::InvalidArgument, "alpha + beta + gamma must equal 1");
  if (!(p.gamma > p.alpha && p.gamma > p.beta))
    throw Error(Errc::InvalidArgument, "gamma must exceed both alpha and beta");
  if (!(p.tau_t_days > 0.0)) throw Error(Errc::InvalidArgument, "tau_t must be positive");
  if (!(p.tau_r_percent > 0.0)) throw Error(Errc::InvalidArgument, "tau_r percent must be positive");
  if (!unit(p.theta)) throw Error(Errc::InvalidArgument, "theta must lie in [0, 1]");
}

double product_suspicion(std::size_t max_reviews, std::size_t reviews, double theta) {
  const double delta = static_cast<double>(max_reviews) - static_cast<double>(reviews);
  return 2.0 / (1.0 + std::exp(-std::pow(delta, theta) + std::pow(2.0, theta))) - 1.0;
}

double product_suspicion(ProductIndex p, const Dataset& data, double theta) {
  if (p >= data.num_products()) throw Error(Errc::UnknownProduct, "product index " + std::to_string(p));
  return product_suspicion(data.max_product_degree(), data.reviewers_of(p).size(), theta);
}

double pair_collusion(ReviewerIndex i, ReviewerIndex j, ProductIndex p, const Dataset& data,
                      const CollusionParams& params, std::span<const TextVector> texts) {
  if (p >= data.num_products()) throw Error(Errc::UnknownProduct, "product index " + std::to_string(p));
  if (i >= data.num_reviewers() || j >= data.num_reviewers())
    throw Error(Errc::UnknownReviewer, "reviewer index out of range");
  const auto ki = data.find_review(i, p);
  const auto kj = data.find_review(j, p);
  if (!ki || !kj)
    throw Error(Errc::NotCoReviewers, "'" + data.reviewer_name(i) + "' and '" + data.reviewer_name(j) +
                                          "' did not both review '" + data.product_name(p) + "'");
  const Thresholds th{params.tau_t_days, params.tau_r(data.rating_scale())};
  return collusion_term(data.review(*ki), data.review(*kj), texts[*ki], texts[*kj],
                        product_suspicion(p, data, params.theta), params, th);
}

double pair_spamicity(ReviewerIndex i, ReviewerIndex j, const Dataset& data, const CollusionParams& params,
                      std::span<const TextVector> texts) {
  const auto pi = data.products_of(i);
  const auto pj = data.products_of(j);
  std::vector<ProductIndex> common;
  std::set_intersection(pi.begin(), pi.end(), pj.begin(), pj.end(), std::back_inserter(common));
  if (common.empty()) return 0.0;
  double sum = 0.0;
  for (auto p : common) sum += pair_collusion(i, j, p, data, params, texts);
  const double jac = static_cast<double>(common.size()) /
                     static_cast<double>(pi.size() + pj.size() - common.size());
  return squash(sum * jac);
}

CollusionGraph build_collusion_graph(const Dataset& data, const CollusionParams& params,
                                     std::span<const TextVector> texts) {
  validate(params);
  if (texts.size() != data.num_reviews())
    throw Error(Errc::InvalidArgument, "text vectors do not match the dataset");
  const Thresholds th{params.tau_t_days, params.tau_r(data.rating_scale())};
  std::vector<double> suspicion(data.num_products());
  for (ProductIndex p = 0; p < data.num_products(); ++p)
    suspicion[p] = product_suspicion(p, data, params.theta);

  const std::size_t R = data.num_reviewers();
  const unsigned threads = std::max(1u, params.threads);
  struct Partial {
    std::vector<CollusionEdge> edges;
    std::size_t candidates = 0;
    std::size_t dropped = 0;
  };
  std::vector<Partial> parts(threads);
  parallel_chunks(R, threads, [&](std::size_t begin, std::size_t end, unsigned chunk) {
    auto& part = parts[chunk];
    struct Acc {
      double sum = 0.0;
      std::uint32_t common = 0;
    };
    std::unordered_map<ReviewerIndex, Acc> acc;
    std::vector<ReviewerIndex> partners;
    for (std::size_t ii = begin; ii < end; ++ii) {
      const auto i = static_cast<ReviewerIndex>(ii);
      acc.clear();
      const auto products = data.products_of(i);
      const std::size_t first = data.first_review_of(i);
      // Products ascend, so each pair's sum is accumulated in product order.
      for (std::size_t n = 0; n < products.size(); ++n) {
        const auto p = products[n];
        const auto& ri = data.review(first + n);
        const auto revs = data.reviewers_of(p);
        const auto ids = data.reviews_of(p);
        auto start = std::upper_bound(revs.begin(), revs.end(), i) - revs.begin();
        for (auto m = static_cast<std::size_t>(start); m < revs.size(); ++m) {
          auto& a = acc[revs[m]];
          a.sum += collusion_term(ri, data.review(ids[m]), texts[first + n], texts[ids[m]], suspicion[p], params, th);
          ++a.common;
        }
      }
      partners.clear();
      for (const auto& kv : acc) partners.push_back(kv.first);
      std::sort(partners.begin(), partners.end());
      part.candidates += partners.size();
      for (auto j : partners) {
        const auto& a = acc[j];
        const double jac = static_cast<double>(a.common) /
                           static_cast<double>(products.size() + data.products_of(j).size() - a.common);
        const double phi = squash(a.sum * jac);
        if (phi > 0.0) part.edges.push_back({i, j, phi});
        else ++part.dropped;
      }
    }
  });

  CollusionGraph g;
  g.num_nodes = R;
  for (auto& part : parts) {
    g.edges.insert(g.edges.end(), part.edges.begin(), part.edges.end());
    g.candidate_pairs += part.candidates;
    g.dropped_pairs += part.dropped;
  }
  return g;
}

void write_collusion_graph(std::ostream& out, const CollusionGraph& g, const Dataset& data) {
  for (const auto& e : g.edges)
    out << data.reviewer_name(e.i) << ' ' << data.reviewer_name(e.j) << ' ' << format_real(e.weight) << '\n';
}

}  // namespace defrauder
