#include "defrauder/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "defrauder/error.hpp"

namespace defrauder {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items, char sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += items[k];
  }
  return out;
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

bool parse_real(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

bool parse_size(std::string_view text, std::size_t& out) {
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

GroupRecord to_record(const ScoredGroup& g, const Dataset& data) {
  GroupRecord r;
  r.id = g.id;
  for (auto i : g.group.members) r.reviewers.push_back(data.reviewer_name(i));
  for (auto p : g.group.targets) r.products.push_back(data.product_name(p));
  r.collective = g.scores.collective;
  return r;
}

void write_groups(std::ostream& out, const std::vector<GroupRecord>& groups) {
  for (const auto& g : groups)
    out << g.id << '\t' << join(g.reviewers, ',') << '\t' << join(g.products, ',') << '\t'
        << format_real(g.collective) << '\n';
}

void write_groups(std::ostream& out, const std::vector<ScoredGroup>& groups, const Dataset& data) {
  std::vector<GroupRecord> records;
  records.reserve(groups.size());
  for (const auto& g : groups) records.push_back(to_record(g, data));
  write_groups(out, records);
}

std::vector<GroupRecord> read_groups(std::istream& in) {
  std::vector<GroupRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    auto bad = [&](const std::string& why) {
      return Error(Errc::MalformedRow, "groups line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 4) throw bad("expected 4 tab-separated fields");
    GroupRecord r;
    if (!parse_size(fields[0], r.id)) throw bad("bad group id '" + fields[0] + "'");
    r.reviewers = split(fields[1], ',');
    r.products = split(fields[2], ',');
    if (r.reviewers.empty()) throw bad("no reviewers");
    for (const auto& id : r.reviewers)
      if (id.empty()) throw bad("empty reviewer id");
    for (const auto& id : r.products)
      if (id.empty()) throw bad("empty product id");
    if (!parse_real(fields[3], r.collective)) throw bad("bad collective score '" + fields[3] + "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GroupRecord> read_groups(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  try {
    return read_groups(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

CandidateGroup resolve_group(const GroupRecord& record, const Dataset& data) {
  std::vector<ReviewerIndex> members;
  for (const auto& id : record.reviewers) {
    const auto i = data.find_reviewer(id);
    if (!i) throw Error(Errc::UnknownReviewer, "group " + std::to_string(record.id) + ": " + id);
    members.push_back(*i);
  }
  CandidateGroup g = make_group(data, std::move(members));
  if (!record.products.empty()) {
    std::vector<ProductIndex> targets;
    for (const auto& id : record.products) {
      const auto p = data.find_product(id);
      if (!p) throw Error(Errc::UnknownProduct, "group " + std::to_string(record.id) + ": " + id);
      targets.push_back(*p);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    g.targets = std::move(targets);
  }
  return g;
}

void write_indicator_csv(std::ostream& out, const std::vector<ScoredGroup>& groups) {
  out << "group_id,rt,nt,pt,rv,rr,tw,collective,penalty,size,n_targets\n";
  for (const auto& g : groups) {
    const auto& s = g.scores;
    out << g.id << ',' << format_real(s.rt) << ',' << format_real(s.nt) << ',' << format_real(s.pt) << ','
        << format_real(s.rv) << ',' << format_real(s.rr) << ',' << format_real(s.tw) << ','
        << format_real(s.collective) << ',' << format_real(s.penalty) << ',' << g.group.members.size() << ','
        << g.group.targets.size() << '\n';
  }
}

}  // namespace defrauder
