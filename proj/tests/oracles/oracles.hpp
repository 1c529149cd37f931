#pragma once

// Straight-line transcriptions of the scoring formulas over plain review
// lists. They share no code with the library beyond the Review struct.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "defrauder/model.hpp"

namespace oracle {

using defrauder::Review;
using Ids = std::set<std::string>;

inline const Review* find(const std::vector<Review>& rs, const std::string& u, const std::string& p) {
  for (const auto& r : rs)
    if (r.reviewer_id == u && r.product_id == p) return &r;
  return nullptr;
}

inline Ids products_of(const std::vector<Review>& rs, const std::string& u) {
  Ids out;
  for (const auto& r : rs)
    if (r.reviewer_id == u) out.insert(r.product_id);
  return out;
}

inline Ids reviewers_of(const std::vector<Review>& rs, const std::string& p) {
  Ids out;
  for (const auto& r : rs)
    if (r.product_id == p) out.insert(r.reviewer_id);
  return out;
}

inline std::size_t inter_size(const Ids& a, const Ids& b) {
  std::size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

inline double jaccard(const Ids& a, const Ids& b) {
  const std::size_t i = inter_size(a, b);
  const std::size_t u = a.size() + b.size() - i;
  return u == 0 ? 0.0 : double(i) / double(u);
}

inline double L(std::size_t nr, std::size_t np) { return 1.0 / (1.0 + std::exp(-(double(nr) + double(np) - 3.0))); }

inline double rt(const std::vector<Review>& rs, const Ids& R, const Ids& P) {
  double sum = 0;
  for (const auto& u : R) sum += double(inter_size(products_of(rs, u), P));
  return sum / (double(R.size()) * double(P.size())) * L(R.size(), P.size());
}

inline double nt(const std::vector<Review>& rs, const Ids& R, const Ids& P) {
  std::vector<std::string> m(R.begin(), R.end());
  double sum = 0;
  int pairs = 0;
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = a + 1; b < m.size(); ++b) {
      sum += jaccard(products_of(rs, m[a]), products_of(rs, m[b]));
      ++pairs;
    }
  return sum / pairs * L(R.size(), P.size());
}

inline double pt(const std::vector<Review>& rs, const Ids& R, const Ids& P) {
  Ids inter, uni;
  bool first = true;
  for (const auto& u : R) {
    const Ids pu = products_of(rs, u);
    uni.insert(pu.begin(), pu.end());
    if (first) inter = pu;
    else {
      Ids keep;
      for (const auto& p : inter)
        if (pu.count(p)) keep.insert(p);
      inter = keep;
    }
    first = false;
  }
  return double(inter.size()) / double(uni.size()) * L(R.size(), P.size());
}

inline double rv(const std::vector<Review>& rs, const Ids& R, const Ids& P) {
  double total = 0;
  for (const auto& p : P) {
    std::vector<double> x;
    for (const auto& u : R)
      if (const auto* r = find(rs, u, p)) x.push_back(r->rating);
    double mean = 0, var = 0;
    for (double v : x) mean += v;
    if (!x.empty()) mean /= double(x.size());
    for (double v : x) var += (v - mean) * (v - mean);
    if (!x.empty()) var /= double(x.size());
    total += var;
  }
  const double s2 = total / double(P.size());
  return 2.0 * L(R.size(), P.size()) * (1.0 - 1.0 / (1.0 + std::exp(-s2)));
}

inline double rr(const std::vector<Review>& rs, const Ids& R, const Ids& P) {
  double best = 0;
  for (const auto& p : P) {
    const Ids rev = reviewers_of(rs, p);
    best = std::max(best, double(inter_size(R, rev)) / double(rev.size()));
  }
  return best;
}

inline double tw(const std::vector<Review>& rs, const Ids& R, const Ids& P, double T) {
  double total = 0;
  for (const auto& p : P) {
    std::vector<double> x;
    for (const auto& u : R)
      if (const auto* r = find(rs, u, p)) x.push_back(double(r->day));
    double mean = 0, var = 0;
    for (double v : x) mean += v;
    if (!x.empty()) mean /= double(x.size());
    for (double v : x) var += (v - mean) * (v - mean);
    if (!x.empty()) var /= double(x.size());
    const double sd = std::sqrt(var);
    total += sd > T ? 0.0 : 1.0 - sd / T;
  }
  return total / double(P.size()) * L(R.size(), P.size());
}

// Collusion terms.
inline double suspicion(double delta, double theta) {
  return 2.0 / (1.0 + std::exp(-std::pow(delta, theta) + std::pow(2.0, theta))) - 1.0;
}

// Cosine over whitespace/punctuation tokens, lowercased, with raw counts.
inline std::map<std::string, double> bag(const std::string& text) {
  std::map<std::string, double> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out[cur] += 1.0;
    cur.clear();
  };
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) cur += static_cast<char>(std::tolower(uc));
    else flush();
  }
  flush();
  return out;
}

inline double text_cosine(const std::string& a, const std::string& b) {
  const auto x = bag(a), y = bag(b);
  double dot = 0, nx = 0, ny = 0;
  for (const auto& [k, v] : x) {
    nx += v * v;
    if (auto it = y.find(k); it != y.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : y) ny += v * v;
  if (nx == 0 || ny == 0) return 0.0;
  return dot / std::sqrt(nx * ny);
}

struct CollParams {
  double alpha = 0.3, beta = 0.3, gamma = 0.4, tau_t = 20, tau_r = 0.8, theta = 0.4;
};

inline double coll(const std::vector<Review>& rs, const std::string& i, const std::string& j, const std::string& p,
                   const CollParams& c, double (*cos)(const std::string&, const std::string&) = text_cosine) {
  const Review* a = find(rs, i, p);
  const Review* b = find(rs, j, p);
  const double dt = std::fabs(double(a->day - b->day));
  const double dr = std::fabs(double(a->rating - b->rating));
  if (dt > c.tau_t || dr >= c.tau_r) return 0.0;
  std::size_t max_rev = 0;
  std::set<std::string> products;
  for (const auto& r : rs) products.insert(r.product_id);
  for (const auto& q : products) max_rev = std::max(max_rev, reviewers_of(rs, q).size());
  const double sp = suspicion(double(max_rev - reviewers_of(rs, p).size()), c.theta);
  return sp * (c.alpha * (1 - dt / c.tau_t) + c.beta * (1 - dr / c.tau_r) + c.gamma * cos(a->text, b->text));
}

inline double phi(const std::vector<Review>& rs, const std::string& i, const std::string& j, const CollParams& c,
                  double (*cos)(const std::string&, const std::string&) = text_cosine) {
  const Ids pi = products_of(rs, i), pj = products_of(rs, j);
  double sum = 0;
  for (const auto& p : pi)
    if (pj.count(p)) sum += coll(rs, i, j, p, c, cos);
  const double sigma = sum * jaccard(pi, pj);
  return 2.0 / (1.0 + std::exp(-sigma)) - 1.0;
}

// Two-pass mean then deviation.
inline double dispersion(const std::vector<std::vector<double>>& vs) {
  const std::size_t d = vs.front().size();
  std::vector<double> c(d, 0.0);
  for (const auto& v : vs)
    for (std::size_t k = 0; k < d; ++k) c[k] += v[k];
  for (auto& x : c) x /= double(vs.size());
  double s = 0;
  for (const auto& v : vs)
    for (std::size_t k = 0; k < d; ++k) s += (v[k] - c[k]) * (v[k] - c[k]);
  return s / double(vs.size());
}

// Area between the empirical CDF and the vertical axis on [0,1], by 1000-bin
// piecewise integration of (1 - F(x)). Exact for step functions whose jumps
// fall inside bins because each bin integrates the step exactly.
inline double emd_integral(const std::vector<double>& scores) {
  std::vector<double> s(scores);
  std::sort(s.begin(), s.end());
  const int bins = 1000;
  double area = 0;
  for (int b = 0; b < bins; ++b) {
    const double lo = double(b) / bins, hi = double(b + 1) / bins;
    // integral over [lo,hi] of fraction of scores > x
    for (double v : s) {
      if (v <= lo) continue;
      area += (std::min(v, hi) - lo) / double(s.size());
    }
  }
  return area;
}

inline double ndcg(const std::vector<double>& rel, std::size_t k) {
  auto dcg = [k](const std::vector<double>& r) {
    double s = 0;
    for (std::size_t i = 1; i <= std::min(k, r.size()); ++i) s += r[i - 1] / std::log2(double(i) + 1);
    return s;
  };
  std::vector<double> ideal(rel);
  std::sort(ideal.rbegin(), ideal.rend());
  const double id = dcg(ideal);
  return id == 0 ? 1.0 : dcg(rel) / id;
}

// sup |F_a - G_b| evaluated at every sample point.
inline double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  auto cdf = [](const std::vector<double>& s, double x) {
    double n = 0;
    for (double v : s) n += v <= x ? 1 : 0;
    return n / double(s.size());
  };
  double d = 0;
  for (double x : a) d = std::max(d, std::fabs(cdf(a, x) - cdf(b, x)));
  for (double x : b) d = std::max(d, std::fabs(cdf(a, x) - cdf(b, x)));
  return d;
}

}  // namespace oracle
