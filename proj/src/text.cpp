#include "defrauder/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "defrauder/error.hpp"
#include "defrauder/parallel.hpp"
#include "defrauder/simd/kernels.hpp"

namespace defrauder {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool token_char(unsigned char c) { return std::isalnum(c) || c == '\'' || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (token_char(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double cosine(const TextVector& a, const TextVector& b) {
  if (a.is_zero() || b.is_zero()) return 0.0;
  if (a == b) return 1.0;
  double dot = 0.0;
  if (a.dense && b.dense) {
    if (a.value.size() != b.value.size()) return 0.0;
    dot = simd::dot(std::span<const double>(a.value), std::span<const double>(b.value));
  } else if (!a.dense && !b.dense) {
    std::size_t i = 0, j = 0;
    while (i < a.index.size() && j < b.index.size()) {
      if (a.index[i] < b.index[j]) ++i;
      else if (b.index[j] < a.index[i]) ++j;
      else dot += a.value[i++] * b.value[j++];
    }
  } else {
    return 0.0;
  }
  const double c = dot / std::sqrt(a.squared_norm * b.squared_norm);
  return std::clamp(c, -1.0, 1.0);
}

TextVectorizer TextVectorizer::hashed(std::size_t buckets) {
  if (buckets == 0) throw Error(Errc::InvalidArgument, "hashed vectorizer needs at least one bucket");
  TextVectorizer v;
  v.mode_ = Mode::HashedTermFrequency;
  v.dim_ = buckets;
  return v;
}

TextVectorizer TextVectorizer::pretrained(std::unordered_map<std::string, std::vector<double>> table) {
  if (table.empty()) throw Error(Errc::EmptyInput, "word-vector table is empty");
  TextVectorizer v;
  v.mode_ = Mode::PretrainedWordVectors;
  v.dim_ = table.begin()->second.size();
  for (const auto& [tok, vec] : table)
    if (vec.size() != v.dim_) throw Error(Errc::MalformedRow, "word vector for '" + tok + "' has wrong dimension");
  v.table_ = std::move(table);
  v.source_ = "in-memory";
  return v;
}

TextVectorizer TextVectorizer::pretrained(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  std::unordered_map<std::string, std::vector<double>> table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    std::vector<double> vec;
    std::string num;
    while (ss >> num) {
      double x = 0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), x);
      if (ec != std::errc{} || ptr != num.data() + num.size())
        throw Error(Errc::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": bad number");
      vec.push_back(x);
    }
    if (line_no == 1 && vec.size() == 1) continue;  // `count dim` header
    if (vec.empty()) throw Error(Errc::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": no values");
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim)
      throw Error(Errc::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": dimension mismatch");
    table.emplace(tokenize(token).empty() ? token : tokenize(token).front(), std::move(vec));
  }
  auto v = pretrained(std::move(table));
  v.source_ = path.string();
  return v;
}

std::string TextVectorizer::describe() const {
  if (mode_ == Mode::HashedTermFrequency) return "hashed_tf:" + std::to_string(dim_);
  return "word_vectors:" + source_ + ":" + std::to_string(dim_);
}

TextVector TextVectorizer::vectorize(std::string_view text) const {
  TextVector out;
  const auto tokens = tokenize(text);
  if (mode_ == Mode::HashedTermFrequency) {
    std::vector<std::uint32_t> buckets;
    buckets.reserve(tokens.size());
    for (const auto& t : tokens) buckets.push_back(static_cast<std::uint32_t>(fnv1a(t) % dim_));
    std::sort(buckets.begin(), buckets.end());
    for (std::size_t k = 0; k < buckets.size();) {
      std::size_t run = k;
      while (run < buckets.size() && buckets[run] == buckets[k]) ++run;
      out.index.push_back(buckets[k]);
      out.value.push_back(static_cast<double>(run - k));
      k = run;
    }
  } else {
    out.dense = true;
    out.value.assign(dim_, 0.0);
    std::size_t found = 0;
    for (const auto& t : tokens) {
      auto it = table_.find(t);
      if (it == table_.end()) continue;
      simd::axpy(1.0, std::span<const double>(it->second), std::span<double>(out.value));
      ++found;
    }
    if (found == 0) {
      out.value.clear();
      return out;
    }
    for (auto& x : out.value) x /= static_cast<double>(found);
  }
  for (double x : out.value) out.squared_norm += x * x;
  return out;
}

std::vector<TextVector> vectorize_reviews(const Dataset& data, const TextVectorizer& vectorizer,
                                          unsigned threads) {
  std::vector<TextVector> out(data.num_reviews());
  parallel_chunks(out.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t k = b; k < e; ++k) out[k] = vectorizer.vectorize(data.text(k));
  });
  return out;
}

}  // namespace defrauder
