#pragma once

#include <string>
#include <vector>

#include "defrauder/model.hpp"
#include "defrauder/random.hpp"

namespace testing_support {

using defrauder::Review;

inline Review rv(std::string u, std::string p, int rating, defrauder::Days day, std::string text = "") {
  return Review{std::move(u), std::move(p), rating, day, std::move(text)};
}

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words{"good", "bad", "fast", "slow", "cheap", "price", "great",
                                              "item", "love", "broke", "works", "fine"};
  return words;
}

// Random small corpus: each reviewer reviews a random subset of products
// with days inside `day_span` and texts over a tiny vocabulary.
inline std::vector<Review> random_reviews(defrauder::Rng& rng, int n_reviewers, int n_products, int day_span,
                                          double density = 0.5) {
  std::vector<Review> out;
  const auto& vocab = vocabulary();
  for (int u = 0; u < n_reviewers; ++u) {
    bool any = false;
    for (int p = 0; p < n_products; ++p) {
      if (!rng.bernoulli(density) && !(p == n_products - 1 && !any)) continue;
      any = true;
      std::string text;
      const auto words = rng.below(4);
      for (std::uint64_t w = 0; w < words; ++w) text += (w ? " " : "") + vocab[rng.below(vocab.size())];
      out.push_back(rv("r" + std::to_string(u), "p" + std::to_string(p), static_cast<int>(rng.between(1, 5)),
                       rng.between(0, day_span), text));
    }
  }
  return out;
}

}  // namespace testing_support
