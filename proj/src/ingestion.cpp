#include "defrauder/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "defrauder/error.hpp"

namespace defrauder {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Integer ratings only; "4.0" is accepted as 4, "4.5" is not.
std::optional<int> parse_rating(std::string_view s) {
  if (auto v = parse_int(s)) return static_cast<int>(*v);
  s = trim(s);
  double d = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  if (!std::isfinite(d) || d != std::floor(d) || std::abs(d) > 1e9) return std::nullopt;
  return static_cast<int>(d);
}

struct RowOutcome {
  std::optional<Review> review;
  std::string reason;
};

RowOutcome finish_row(std::string reviewer, std::string product, std::optional<int> rating,
                      std::optional<Days> day, std::string text, const RatingScale& scale) {
  RowOutcome out;
  if (reviewer.empty()) out.reason = "empty reviewer_id";
  else if (product.empty()) out.reason = "empty product_id";
  else if (!valid_identifier(reviewer)) out.reason = "reviewer_id contains a reserved character";
  else if (!valid_identifier(product)) out.reason = "product_id contains a reserved character";
  else if (!rating) out.reason = "unparseable rating";
  else if (!scale.contains(*rating)) out.reason = "rating " + std::to_string(*rating) + " out of scale";
  else if (!day) out.reason = "unparseable date";
  else out.review = Review{std::move(reviewer), std::move(product), *rating, *day, std::move(text)};
  return out;
}

class RowSink {
 public:
  explicit RowSink(ParseReport& report) : report_(report) {}

  void accept(RowOutcome&& o, std::size_t line, std::vector<Review>& reviews) {
    ++report_.rows_read;
    if (o.review) {
      ++report_.rows_accepted;
      reviews.push_back(std::move(*o.review));
    } else {
      ++report_.rows_rejected;
      report_.rejections.push_back({line, std::move(o.reason)});
    }
  }

 private:
  ParseReport& report_;
};

void parse_csv(std::istream& in, const ReviewFileSchema& schema, const RatingScale& scale,
               std::vector<Review>& reviews, ParseReport& report) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw Error(Errc::EmptyInput, "review file is empty");
  auto column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (lower(std::string(trim(header[c]))) == lower(name)) return c;
    if (required) throw Error(Errc::MalformedRow, "line 1: header lacks column '" + name + "'");
    return std::nullopt;
  };
  const auto c_reviewer = *column(schema.reviewer_column, true);
  const auto c_product = *column(schema.product_column, true);
  const auto c_rating = *column(schema.rating_column, true);
  const auto c_date = *column(schema.date_column, true);
  const auto c_text = column(schema.text_column, false);

  RowSink sink(report);
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != header.size()) {
      sink.accept({std::nullopt, "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(f.size())},
                  reader.record_line(), reviews);
      continue;
    }
    sink.accept(finish_row(std::string(trim(f[c_reviewer])), std::string(trim(f[c_product])),
                           parse_rating(f[c_rating]), parse_day(f[c_date]),
                           c_text ? std::move(f[*c_text]) : std::string(), scale),
                reader.record_line(), reviews);
  }
}

void parse_jsonl(std::istream& in, const ReviewFileSchema& schema, const RatingScale& scale,
                 std::vector<Review>& reviews, ParseReport& report) {
  RowSink sink(report);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      sink.accept({std::nullopt, "invalid JSON"}, line_no, reviews);
      continue;
    }
    if (!obj.is_object()) {
      sink.accept({std::nullopt, "line is not a JSON object"}, line_no, reviews);
      continue;
    }
    auto as_id = [&](const std::string& key) -> std::string {
      auto it = obj.find(key);
      if (it == obj.end()) return {};
      if (it->is_string()) return std::string(trim(it->get<std::string>()));
      if (it->is_number_integer()) return std::to_string(it->get<long long>());
      return {};
    };
    std::optional<int> rating;
    if (auto it = obj.find(schema.rating_column); it != obj.end()) {
      if (it->is_number()) rating = parse_rating(it->dump());
      else if (it->is_string()) rating = parse_rating(it->get<std::string>());
    }
    std::optional<Days> day;
    if (auto it = obj.find(schema.date_column); it != obj.end()) {
      if (it->is_number_integer()) day = it->get<Days>();
      else if (it->is_string()) day = parse_day(it->get<std::string>());
    }
    std::string text;
    if (auto it = obj.find(schema.text_column); it != obj.end() && it->is_string())
      text = it->get<std::string>();
    sink.accept(finish_row(as_id(schema.reviewer_column), as_id(schema.product_column), rating, day,
                           std::move(text), scale),
                line_no, reviews);
  }
}

}  // namespace

ReviewFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return ReviewFormat::JsonLines;
  return ReviewFormat::Csv;
}

std::optional<Days> parse_day(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (auto v = parse_int(s)) return static_cast<Days>(*v);
  if (s.size() < 10) return std::nullopt;
  if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
  if (s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = parse_int(s.substr(0, 4));
  auto m = parse_int(s.substr(5, 2));
  auto d = parse_int(s.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{static_cast<int>(*y)}, month{static_cast<unsigned>(*m)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return static_cast<Days>(sys_days{ymd}.time_since_epoch().count());
}

std::string format_day(Days d) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{d}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (at_start_) {
    at_start_ = false;
    if (in_.peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
        in_.clear();
        in_.seekg(0);
      }
    }
  }
  for (;;) {
    if (in_.peek() == std::char_traits<char>::eof()) return false;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    bool any = false;
    for (;;) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) {
        if (quoted) throw Error(Errc::MalformedRow, "line " + std::to_string(record_line_) + ": unterminated quote");
        break;
      }
      any = true;
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == '"' && field.empty() && !field_was_quoted) {
        quoted = field_was_quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c == '\r') {
        if (in_.peek() == '\n') in_.get();
        ++line_;
        break;
      } else {
        field.push_back(static_cast<char>(c));
      }
    }
    if (!any) return false;
    if (fields.empty() && field.empty() && !field_was_quoted) continue;  // blank line
    fields.push_back(std::move(field));
    return true;
  }
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool valid_identifier(std::string_view id) noexcept {
  return !id.empty() && id.find_first_of(",\t\r\n; ") == std::string_view::npos;
}

LoadedDataset load_reviews(std::istream& in, const ReviewFileSchema& schema, RatingScale scale,
                           const std::optional<LabelMap>& labels) {
  ParseReport report;
  std::vector<Review> reviews;
  if (schema.format == ReviewFormat::Csv) parse_csv(in, schema, scale, reviews, report);
  else parse_jsonl(in, schema, scale, reviews, report);

  if (report.rows_read == 0) throw Error(Errc::EmptyInput, "review file has no data rows");
  if (report.rows_rejected > 1 &&
      static_cast<double>(report.rows_rejected) > kMaxRejectFraction * static_cast<double>(report.rows_read)) {
    std::ostringstream msg;
    msg << report.rows_rejected << " of " << report.rows_read << " rows rejected";
    if (!report.rejections.empty())
      msg << "; first at line " << report.rejections.front().line << ": " << report.rejections.front().reason;
    throw Error(Errc::MalformedRow, msg.str());
  }
  if (reviews.empty()) throw Error(Errc::EmptyInput, "no valid reviews");
  Dataset data = build_dataset(std::move(reviews), scale, labels);
  report.duplicates_dropped = data.duplicates_dropped();
  return {std::move(data), std::move(report)};
}

LoadedDataset load_reviews(const std::filesystem::path& path, const ReviewFileSchema& schema,
                           RatingScale scale, const std::optional<LabelMap>& labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  return load_reviews(in, schema, scale, labels);
}

LabelMap load_labels(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f)) return {};
  if (f.size() != 2 || lower(std::string(trim(f[0]))) != "reviewer_id" || lower(std::string(trim(f[1]))) != "label")
    throw Error(Errc::MalformedRow, "line 1: label header must be 'reviewer_id,label'");
  LabelMap labels;
  while (reader.next(f)) {
    const auto line = std::to_string(reader.record_line());
    if (f.size() != 2) throw Error(Errc::MalformedRow, "line " + line + ": expected 2 fields");
    const std::string id(trim(f[0]));
    const auto flag = parse_int(f[1]);
    if (id.empty() || !flag || (*flag != 0 && *flag != 1))
      throw Error(Errc::MalformedRow, "line " + line + ": label must be 0 or 1 with a reviewer id");
    auto [it, inserted] = labels.emplace(id, *flag == 1);
    if (!inserted && it->second != (*flag == 1))
      throw Error(Errc::ConflictingLabel, "reviewer '" + id + "' labeled both 0 and 1 (line " + line + ")");
  }
  return labels;
}

LabelMap load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  return load_labels(in);
}

void write_reviews_csv(std::ostream& out, const std::vector<Review>& reviews) {
  out << "reviewer_id,product_id,rating,date,text\n";
  for (const auto& r : reviews)
    out << csv_field(r.reviewer_id) << ',' << csv_field(r.product_id) << ',' << r.rating << ','
        << format_day(r.day) << ',' << csv_field(r.text) << '\n';
}

void write_reviews_jsonl(std::ostream& out, const std::vector<Review>& reviews) {
  for (const auto& r : reviews) {
    nlohmann::ordered_json j;
    j["reviewer_id"] = r.reviewer_id;
    j["product_id"] = r.product_id;
    j["rating"] = r.rating;
    j["date"] = format_day(r.day);
    j["text"] = r.text;
    out << j.dump() << '\n';
  }
}

void write_labels_csv(std::ostream& out, const LabelMap& labels) {
  out << "reviewer_id,label\n";
  for (const auto& [id, fraud] : labels) out << csv_field(id) << ',' << (fraud ? 1 : 0) << '\n';
}

}  // namespace defrauder
