#include "defrauder/synthgen.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "defrauder/error.hpp"
#include "defrauder/indicators.hpp"

namespace defrauder {
namespace {

const std::vector<std::vector<std::string>>& synonym_sets() {
  static const std::vector<std::vector<std::string>> sets{
      {"good", "great", "excellent", "superb", "fantastic"},
      {"product", "item", "purchase", "thing", "unit"},
      {"really", "truly", "very", "seriously", "totally"},
      {"love", "adore", "enjoy", "like", "appreciate"},
      {"fast", "quick", "speedy", "rapid", "prompt"},
      {"shipping", "delivery", "shipment", "dispatch"},
      {"price", "cost", "deal", "value"},
      {"quality", "build", "craftsmanship", "finish"},
      {"recommend", "suggest", "endorse", "praise"},
      {"buy", "order", "get", "grab"},
      {"works", "functions", "performs", "operates"},
      {"happy", "pleased", "satisfied", "glad", "thrilled"},
      {"bad", "poor", "awful", "terrible", "lousy"},
      {"broke", "failed", "died", "stopped"},
      {"cheap", "flimsy", "weak", "fragile"},
      {"store", "shop", "seller", "vendor"},
      {"friends", "family", "everyone", "people"},
      {"easy", "simple", "effortless", "painless"},
      {"use", "operate", "handle", "run"},
      {"box", "package", "packaging", "parcel"},
  };
  return sets;
}

const std::unordered_map<std::string, std::size_t>& synonym_index() {
  static const auto index = [] {
    std::unordered_map<std::string, std::size_t> m;
    const auto& sets = synonym_sets();
    for (std::size_t s = 0; s < sets.size(); ++s)
      for (const auto& w : sets[s]) m.emplace(w, s);
    return m;
  }();
  return index;
}

std::string zero_pad(std::size_t value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

std::string padded(char prefix, std::size_t value, int width) { return prefix + zero_pad(value, width); }

int digits(std::size_t n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::SpecInvalid, what); }

}  // namespace

const std::vector<std::string>& review_templates() {
  static const std::vector<std::string> pool = [] {
    const std::vector<std::string> openings{
        "this product is really good",
        "i love this item and the quality is great",
        "fast shipping and good price",
        "the quality is bad and it broke after a week",
        "easy to use and works as described",
        "i would recommend this product to friends",
        "cheap build but the price is fair",
        "happy with this purchase overall",
        "the box arrived late and the item failed",
        "great value for the price and fast delivery",
    };
    const std::vector<std::string> closings{
        "will buy again from this store",
        "my family is really happy with it",
        "it works fine for daily use",
        "not sure i would order it again",
        "the package looked cheap but the product is good",
    };
    std::vector<std::string> out;
    for (const auto& o : openings)
      for (const auto& c : closings) out.push_back(o + " " + c);
    return out;
  }();
  return pool;
}

std::string paraphrase(const std::string& text, double rate, Rng& rng) {
  const auto& index = synonym_index();
  const auto& sets = synonym_sets();
  std::istringstream in(text);
  std::string word, out;
  while (in >> word) {
    if (!out.empty()) out += ' ';
    const auto it = index.find(word);
    if (it != index.end() && rng.bernoulli(rate)) {
      const auto& set = sets[it->second];
      out += set[rng.below(set.size())];
    } else {
      out += word;
    }
  }
  return out;
}

void validate(const CampaignSpec& spec) {
  if (spec.n_organic_reviewers < 1) invalid("n_organic_reviewers must be at least 1");
  if (spec.n_products < 1) invalid("n_products must be at least 1");
  if (spec.n_organic_reviews < spec.n_organic_reviewers)
    invalid("n_organic_reviews must be at least n_organic_reviewers");
  const std::size_t cap = std::min<std::size_t>(5, spec.n_products);
  if (spec.n_organic_reviews > cap * spec.n_organic_reviewers)
    invalid("n_organic_reviews exceeds " + std::to_string(cap) + " per organic reviewer");
  if (spec.rating_scale.min_rating >= spec.rating_scale.max_rating) invalid("rating scale is empty");
  for (std::size_t g = 0; g < spec.planted.size(); ++g) {
    const auto& p = spec.planted[g];
    const std::string at = "planted group " + std::to_string(g) + ": ";
    if (p.size < 2) invalid(at + "size must be at least 2");
    if (p.n_targets < 1 || p.n_targets > spec.n_products) invalid(at + "n_targets must be in [1, n_products]");
    if (p.time_spread_days < 0 || p.time_spread_days >= kSynthSpanDays)
      invalid(at + "time_spread must be in [0, " + std::to_string(kSynthSpanDays - 1) + "]");
    if (p.rating_spread < 0 || p.rating_spread > spec.rating_scale.span())
      invalid(at + "rating_spread must be in [0, rating span]");
    if (!(p.paraphrase_rate >= 0.0 && p.paraphrase_rate <= 1.0)) invalid(at + "paraphrase_rate must be in [0, 1]");
  }
}

SyntheticCorpus generate(const CampaignSpec& spec) {
  validate(spec);
  const auto& templates = review_templates();
  const auto& scale = spec.rating_scale;
  SyntheticCorpus out;

  const int rw = std::max(6, digits(spec.n_organic_reviewers));
  const int pw = std::max(5, digits(spec.n_products));
  std::vector<std::string> products(spec.n_products);
  for (std::size_t p = 0; p < spec.n_products; ++p) products[p] = padded('p', p, pw);

  // Per-reviewer review counts: halving odds from 1 up to the cap, then
  // nudged one at a time to hit the requested total exactly.
  Rng counts_rng(mix_seed(spec.seed, 1));
  const std::size_t cap = std::min<std::size_t>(5, spec.n_products);
  std::vector<std::size_t> counts(spec.n_organic_reviewers, 1);
  std::size_t total = 0;
  for (auto& c : counts) {
    while (c < cap && counts_rng.bernoulli(0.5)) ++c;
    total += c;
  }
  while (total < spec.n_organic_reviews) {
    auto& c = counts[counts_rng.below(counts.size())];
    if (c < cap) {
      ++c;
      ++total;
    }
  }
  while (total > spec.n_organic_reviews) {
    auto& c = counts[counts_rng.below(counts.size())];
    if (c > 1) {
      --c;
      --total;
    }
  }

  Rng rng(mix_seed(spec.seed, 2));
  std::vector<std::size_t> chosen;
  for (std::size_t u = 0; u < spec.n_organic_reviewers; ++u) {
    const std::string id = padded('u', u, rw);
    chosen.clear();
    while (chosen.size() < counts[u]) {
      const auto p = rng.below(spec.n_products);
      if (std::find(chosen.begin(), chosen.end(), p) == chosen.end()) chosen.push_back(p);
    }
    for (auto p : chosen) {
      Review r;
      r.reviewer_id = id;
      r.product_id = products[p];
      r.rating = static_cast<int>(rng.between(scale.min_rating, scale.max_rating));
      r.day = kSynthStartDay + static_cast<Days>(rng.below(kSynthSpanDays));
      r.text = paraphrase(templates[rng.below(templates.size())], 1.0, rng);
      out.reviews.push_back(std::move(r));
    }
    out.labels.emplace(id, false);
  }

  Rng planted_rng(mix_seed(spec.seed, 3));
  const int gw = std::max(2, digits(spec.planted.size()));
  for (std::size_t g = 0; g < spec.planted.size(); ++g) {
    const auto& pg = spec.planted[g];
    const int mw = std::max(2, digits(pg.size));
    std::vector<std::size_t> targets;
    while (targets.size() < pg.n_targets) {
      const auto p = planted_rng.below(spec.n_products);
      if (std::find(targets.begin(), targets.end(), p) == targets.end()) targets.push_back(p);
    }
    const Days anchor_day = kSynthStartDay + static_cast<Days>(planted_rng.below(
                                                 static_cast<std::uint64_t>(kSynthSpanDays - pg.time_spread_days)));
    const int anchor_rating = static_cast<int>(planted_rng.between(scale.min_rating, scale.max_rating));
    std::vector<std::string> seeds;
    for (std::size_t t = 0; t < targets.size(); ++t)
      seeds.push_back(paraphrase(templates[planted_rng.below(templates.size())], 1.0, planted_rng));

    GroupRecord truth;
    truth.id = g;
    const std::string group_prefix = padded('s', g, gw) + "_";
    for (std::size_t m = 0; m < pg.size; ++m) {
      const std::string id = group_prefix + zero_pad(m, mw);
      for (std::size_t t = 0; t < targets.size(); ++t) {
        Review r;
        r.reviewer_id = id;
        r.product_id = products[targets[t]];
        r.rating = std::clamp(anchor_rating + static_cast<int>(planted_rng.between(-pg.rating_spread, pg.rating_spread)),
                              scale.min_rating, scale.max_rating);
        r.day = anchor_day + planted_rng.between(0, pg.time_spread_days);
        r.text = paraphrase(seeds[t], pg.paraphrase_rate, planted_rng);
        out.reviews.push_back(std::move(r));
      }
      out.labels.emplace(id, true);
      truth.reviewers.push_back(id);
    }
    std::sort(targets.begin(), targets.end());
    for (auto p : targets) truth.products.push_back(products[p]);
    out.ground_truth.push_back(std::move(truth));
  }

  out.dataset = build_dataset(out.reviews, scale, out.labels);
  for (auto& truth : out.ground_truth) {
    std::vector<ReviewerIndex> members;
    for (const auto& id : truth.reviewers) members.push_back(*out.dataset.find_reviewer(id));
    const auto group = make_group(out.dataset, std::move(members));
    truth.collective = collective_score(group, out.dataset).collective;
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_integer(const std::string& text, const std::string& key) {
  std::size_t v = 0;
  bool negative = !text.empty() && text[0] == '-';
  if (!parse_size(negative ? std::string_view(text).substr(1) : std::string_view(text), v))
    invalid("bad value for " + key + ": '" + text + "'");
  if (negative) {
    if constexpr (std::is_unsigned_v<T>) invalid(key + " must not be negative");
    return -static_cast<T>(v);
  }
  return static_cast<T>(v);
}

}  // namespace

CampaignSpec parse_campaign_spec(std::istream& in) {
  CampaignSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) invalid("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "seed") spec.seed = parse_integer<std::uint64_t>(value, key);
    else if (key == "n_organic_reviewers") spec.n_organic_reviewers = parse_integer<std::size_t>(value, key);
    else if (key == "n_products") spec.n_products = parse_integer<std::size_t>(value, key);
    else if (key == "n_organic_reviews") spec.n_organic_reviews = parse_integer<std::size_t>(value, key);
    else if (key == "rating_min") spec.rating_scale.min_rating = parse_integer<int>(value, key);
    else if (key == "rating_max") spec.rating_scale.max_rating = parse_integer<int>(value, key);
    else if (key == "group") {
      PlantedGroupSpec g;
      std::size_t count = 1;
      std::istringstream items(value);
      std::string item;
      while (items >> item) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) invalid("line " + std::to_string(line_no) + ": expected name:value");
        const std::string name = item.substr(0, colon), v = item.substr(colon + 1);
        if (name == "size") g.size = parse_integer<std::size_t>(v, name);
        else if (name == "targets") g.n_targets = parse_integer<std::size_t>(v, name);
        else if (name == "time_spread") g.time_spread_days = parse_integer<Days>(v, name);
        else if (name == "rating_spread") g.rating_spread = parse_integer<int>(v, name);
        else if (name == "count") count = parse_integer<std::size_t>(v, name);
        else if (name == "paraphrase") {
          if (!parse_real(v, g.paraphrase_rate)) invalid("bad value for paraphrase: '" + v + "'");
        } else {
          invalid("line " + std::to_string(line_no) + ": unknown group field '" + name + "'");
        }
      }
      spec.planted.insert(spec.planted.end(), count, g);
    } else {
      invalid("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  validate(spec);
  return spec;
}

CampaignSpec load_campaign_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  try {
    return parse_campaign_spec(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

void write_campaign_spec(std::ostream& out, const CampaignSpec& spec) {
  out << "seed = " << spec.seed << '\n'
      << "n_organic_reviewers = " << spec.n_organic_reviewers << '\n'
      << "n_products = " << spec.n_products << '\n'
      << "n_organic_reviews = " << spec.n_organic_reviews << '\n'
      << "rating_min = " << spec.rating_scale.min_rating << '\n'
      << "rating_max = " << spec.rating_scale.max_rating << '\n';
  for (const auto& g : spec.planted)
    out << "group = size:" << g.size << " targets:" << g.n_targets << " time_spread:" << g.time_spread_days
        << " rating_spread:" << g.rating_spread << " paraphrase:" << format_real(g.paraphrase_rate) << '\n';
}

}  // namespace defrauder
