#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "defrauder/cli.hpp"
#include "defrauder/error.hpp"
#include "defrauder/format.hpp"
#include "defrauder/parallel.hpp"
#include "defrauder/simd/kernels.hpp"
#include "defrauder/text.hpp"

namespace defrauder::cli {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

void prepare_out_dir(const fs::path& dir) {
  if (dir.empty()) throw Error(Errc::InvalidArgument, "no output directory given");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::Io, "cannot create output directory " + dir.string());
}

ReviewFileSchema schema_for(const PipelineConfig& c) {
  ReviewFileSchema s;
  if (c.format == "csv") s.format = ReviewFormat::Csv;
  else if (c.format == "jsonl") s.format = ReviewFormat::JsonLines;
  else s.format = format_from_path(c.reviews);
  return s;
}

unsigned threads_of(const PipelineConfig& c) { return resolve_threads(c.threads); }

Dataset load(const PipelineConfig& c, std::ostream& log) {
  std::optional<LabelMap> labels;
  if (!c.labels.empty()) labels = load_labels(c.labels);
  auto loaded = load_reviews(c.reviews, schema_for(c), c.rating_scale, labels);
  const auto& r = loaded.report;
  log << "loaded " << c.reviews.string() << ": " << r.rows_accepted << " of " << r.rows_read << " rows";
  if (r.rows_rejected) log << ", " << r.rows_rejected << " rejected";
  if (r.duplicates_dropped) log << ", " << r.duplicates_dropped << " duplicates dropped";
  log << '\n';
  for (std::size_t k = 0; k < r.rejections.size() && k < 5; ++k)
    log << "  line " << r.rejections[k].line << ": " << r.rejections[k].reason << '\n';
  return std::move(loaded.dataset);
}

TextVectorizer vectorizer_for(const PipelineConfig& c) {
  return c.word_vectors.empty() ? TextVectorizer::hashed() : TextVectorizer::pretrained(c.word_vectors);
}

std::string k_list_text(const std::vector<std::size_t>& ks) {
  std::string s;
  for (std::size_t k = 0; k < ks.size(); ++k) s += (k ? "," : "") + std::to_string(ks[k]);
  return s;
}

class Manifest {
 public:
  void set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void set(const std::string& key, double value) { set(key, format_real(value)); }
  void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }

  void input(const std::string& key, const fs::path& path) {
    if (path.empty()) return;
    set(key, path.string());
    set(key + "_fnv1a64", file_digest(path));
  }

  void outputs(const fs::path& dir, std::initializer_list<const char*> names) {
    for (const char* name : names)
      if (fs::exists(dir / name)) set(std::string("output.") + name + "_fnv1a64", file_digest(dir / name));
  }

  void write(const fs::path& dir) const {
    const auto path = dir / kManifestFile;
    auto out = open_out(path);
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
    finish(out, path);
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void record_common(Manifest& m, const std::string& command, const PipelineConfig& c) {
  m.set("command", command);
  m.set("version", kVersion);
  m.set("seed", std::to_string(c.seed));
  m.set("threads", std::size_t{threads_of(c)});
  m.set("simd", simd::backend_name(simd::active_backend()));
  m.set("rating_min", std::to_string(c.rating_scale.min_rating));
  m.set("rating_max", std::to_string(c.rating_scale.max_rating));
  m.set("format", c.format);
}

void record_detection(Manifest& m, const DetectionParams& d) {
  m.set("tau_t", d.tau_t_days);
  m.set("tau_spam", d.tau_spam);
  m.set("js_merge", d.js_merge_threshold);
  m.set("max_iterations", std::to_string(d.max_iterations));
  m.set("min_group_size", d.min_group_size);
  m.set("time_window", d.indicators.time_window_days);
}

void record_rank(Manifest& m, const PipelineConfig& c) {
  const auto& co = c.collusion;
  m.set("alpha", co.alpha);
  m.set("beta", co.beta);
  m.set("gamma", co.gamma);
  m.set("tau_t_collusion", co.tau_t_days);
  m.set("tau_r_percent", co.tau_r_percent);
  m.set("theta", co.theta);
  const auto& e = c.embedding;
  m.set("dim", e.dimension);
  m.set("walk_length", e.walk_length);
  m.set("walks_per_node", e.walks_per_node);
  m.set("window", e.window);
  m.set("p", e.return_bias);
  m.set("q", e.inout_bias);
  m.set("negative", e.negative);
  m.set("epochs", e.epochs);
  m.set("learning_rate", e.learning_rate);
  m.set("normalize", e.normalize ? "true" : "false");
  m.set("order", rank_order_name(c.order));
  m.set("text_model", vectorizer_for(c).describe());
}

void record_eval(Manifest& m, const PipelineConfig& c) {
  m.set("k", k_list_text(c.k_list));
  m.set("ks_feature", pair_feature_name(c.ks_feature));
  m.set("ks_pairs", c.ks_pairs);
}

DetectionParams detection_params(const PipelineConfig& c) {
  auto d = c.detection;
  d.threads = threads_of(c);
  return d;
}

void run_detect(const PipelineConfig& c, const Dataset& data, std::ostream& log) {
  const auto result = extract_groups(data, detection_params(c));
  for (const auto& it : result.iterations)
    log << "level " << it.level << ": " << it.vertices << " vertices, " << it.edges << " edges, "
        << it.isolated_groups + it.merged_groups + it.difference_groups + it.component_groups << " candidates, "
        << it.filtered_out << " filtered\n";
  if (result.safeguard_fired)
    log << "warning: max_iterations (" << c.detection.max_iterations << ") stopped detection before convergence\n";
  log << "detected " << result.groups.size() << " groups\n";
  {
    const auto path = c.out_dir / kGroupsFile;
    auto out = open_out(path);
    write_groups(out, result.groups, data);
    finish(out, path);
  }
  const auto path = c.out_dir / kIndicatorsFile;
  auto out = open_out(path);
  write_indicator_csv(out, result.groups);
  finish(out, path);
}

void run_rank(const PipelineConfig& c, const fs::path& groups_path, const Dataset& data, std::ostream& log) {
  const auto records = read_groups(groups_path.string());
  std::vector<ScoredGroup> groups;
  for (const auto& r : records) {
    auto g = resolve_group(r, data);
    const auto scores = collective_score(g, data, c.detection.indicators);
    groups.push_back({r.id, std::move(g), scores});
  }
  std::vector<RankedGroup> ranked;
  if (!groups.empty()) {
    const unsigned threads = threads_of(c);
    const auto texts = vectorize_reviews(data, vectorizer_for(c), threads);
    auto cp = c.collusion;
    cp.threads = threads;
    const auto graph = build_collusion_graph(data, cp, texts);
    log << "collusion graph: " << graph.edges.size() << " edges from " << graph.candidate_pairs
        << " candidate pairs\n";
    auto ep = c.embedding;
    ep.threads = threads;
    const auto emb = embed_reviewers(graph, ep, mix_seed(c.seed, 0xE3B));
    ranked = rank_groups(groups, emb, data, c.order, threads);
    if (c.dump_embedding) {
      const auto epath = c.out_dir / kEmbeddingFile;
      auto eout = open_out(epath);
      write_embedding(eout, emb, data);
      finish(eout, epath);
      const auto gpath = c.out_dir / kCollusionFile;
      auto gout = open_out(gpath);
      write_collusion_graph(gout, graph, data);
      finish(gout, gpath);
    }
  }
  log << "ranked " << ranked.size() << " groups\n";
  const auto path = c.out_dir / kRankedFile;
  auto out = open_out(path);
  write_ranked_csv(out, ranked);
  finish(out, path);
}

void run_eval(const PipelineConfig& c, const fs::path& groups_path, const fs::path& ranked_path,
              const Dataset& data, std::ostream& log) {
  if (!data.has_labels()) throw Error(Errc::NoLabels, "evaluation needs a labels file");
  const auto records = read_groups(groups_path.string());
  std::map<std::size_t, const GroupRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  const auto rows = read_ranked_csv(ranked_path.string());

  const auto vectorizer = vectorizer_for(c);
  const auto texts = rows.empty() ? std::vector<TextVector>{} : vectorize_reviews(data, vectorizer, threads_of(c));
  MetricReport report;
  report.ks_feature = c.ks_feature;
  std::vector<CandidateGroup> groups;
  std::vector<double> gs, rcs, rel;
  for (const auto& row : rows) {
    const auto it = by_id.find(row.group_id);
    if (it == by_id.end())
      throw Error(Errc::MalformedRow, "ranked group " + std::to_string(row.group_id) + " is not in " +
                                          groups_path.string());
    auto g = resolve_group(*it->second, data);
    GroupMetrics m;
    m.group_id = row.group_id;
    m.rank = row.rank;
    m.size = g.members.size();
    m.gs = group_size_score(g);
    m.rcs = review_content_similarity(g, data, texts);
    m.relevance = group_relevance(g, data);
    gs.push_back(m.gs);
    rcs.push_back(m.rcs);
    rel.push_back(m.relevance);
    report.groups.push_back(m);
    groups.push_back(std::move(g));
  }
  if (!rows.empty()) {
    report.emd_gs = cdf_emd(gs);
    report.emd_rcs = cdf_emd(rcs);
  }
  for (auto k : c.k_list) report.ndcg.emplace_back(k, ndcg_at_k(rel, k));
  try {
    report.ks = coherence_ks_test(data, groups, c.ks_feature, c.ks_pairs, mix_seed(c.seed, 0x4B5));
  } catch (const Error& e) {
    if (e.code() != Errc::InsufficientPairs) throw;
    log << "KS test skipped: " << e.detail() << '\n';
  }
  for (const auto& [k, v] : report.ndcg) log << "NDCG@" << k << " = " << format_real(v) << '\n';
  {
    const auto path = c.out_dir / kMetricsFile;
    auto out = open_out(path);
    write_metric_report(out, report);
    finish(out, path);
  }
  const auto path = c.out_dir / kGroupScoresFile;
  auto out = open_out(path);
  write_group_scores_csv(out, report);
  finish(out, path);
}

template <typename Fn>
void stage(const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.detail());
  }
}

}  // namespace

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void validate(const PipelineConfig& c, bool need_groups, bool need_ranked, bool need_labels) {
  validate(c.detection);
  validate(c.collusion);
  validate(c.embedding);
  if (c.rating_scale.min_rating >= c.rating_scale.max_rating)
    throw Error(Errc::InvalidArgument, "rating_min must be below rating_max");
  if (c.format != "auto" && c.format != "csv" && c.format != "jsonl")
    throw Error(Errc::InvalidArgument, "format must be auto, csv or jsonl");
  if (c.k_list.empty()) throw Error(Errc::InvalidArgument, "k list is empty");
  if (c.ks_pairs < 100) throw Error(Errc::InvalidArgument, "ks_pairs must be at least 100");
  auto must_exist = [](const fs::path& p, const char* what) {
    if (p.empty()) throw Error(Errc::InvalidArgument, std::string("no ") + what + " file given");
    if (!fs::is_regular_file(p)) throw Error(Errc::Io, std::string(what) + " file not found: " + p.string());
  };
  must_exist(c.reviews, "reviews");
  if (need_labels) {
    if (c.labels.empty()) throw Error(Errc::NoLabels, "evaluation needs --labels");
    must_exist(c.labels, "labels");
  } else if (!c.labels.empty()) {
    must_exist(c.labels, "labels");
  }
  if (need_groups) must_exist(c.groups, "groups");
  if (need_ranked) must_exist(c.ranked, "ranked report");
  if (!c.word_vectors.empty()) must_exist(c.word_vectors, "word vectors");
}

CampaignSpec default_campaign_spec() {
  CampaignSpec spec;
  spec.n_organic_reviewers = 2000;
  spec.n_products = 1000;
  spec.n_organic_reviews = 4000;
  for (std::size_t g = 0; g < 10; ++g) {
    PlantedGroupSpec p;
    p.size = 3 + g % 4;
    p.n_targets = 3;
    p.time_spread_days = 5;
    p.rating_spread = 0;
    p.paraphrase_rate = 0.8;
    spec.planted.push_back(p);
  }
  return spec;
}

void cmd_synth(const CampaignSpec& spec, const fs::path& out_dir, ReviewFormat format, std::ostream& log) {
  const auto corpus = generate(spec);
  prepare_out_dir(out_dir);
  const auto reviews_name = format == ReviewFormat::Csv ? "reviews.csv" : "reviews.jsonl";
  {
    const auto path = out_dir / reviews_name;
    auto out = open_out(path);
    if (format == ReviewFormat::Csv) write_reviews_csv(out, corpus.reviews);
    else write_reviews_jsonl(out, corpus.reviews);
    finish(out, path);
  }
  {
    const auto path = out_dir / "labels.csv";
    auto out = open_out(path);
    write_labels_csv(out, corpus.labels);
    finish(out, path);
  }
  {
    const auto path = out_dir / "ground_truth.tsv";
    auto out = open_out(path);
    write_groups(out, corpus.ground_truth);
    finish(out, path);
  }
  {
    const auto path = out_dir / "spec.txt";
    auto out = open_out(path);
    write_campaign_spec(out, spec);
    finish(out, path);
  }
  Manifest m;
  m.set("command", "synth");
  m.set("version", kVersion);
  m.set("seed", std::to_string(spec.seed));
  m.outputs(out_dir, {reviews_name, "labels.csv", "ground_truth.tsv", "spec.txt"});
  m.write(out_dir);
  log << "wrote " << corpus.reviews.size() << " reviews, " << corpus.ground_truth.size() << " planted groups to "
      << out_dir.string() << '\n';
}

void cmd_detect(const PipelineConfig& c, std::ostream& log) {
  validate(c, false, false, false);
  const Dataset data = load(c, log);
  prepare_out_dir(c.out_dir);
  run_detect(c, data, log);
  Manifest m;
  record_common(m, "detect", c);
  m.input("reviews", c.reviews);
  m.input("labels", c.labels);
  record_detection(m, c.detection);
  m.outputs(c.out_dir, {kGroupsFile, kIndicatorsFile});
  m.write(c.out_dir);
}

void cmd_rank(const PipelineConfig& c, std::ostream& log) {
  validate(c, true, false, false);
  const Dataset data = load(c, log);
  prepare_out_dir(c.out_dir);
  run_rank(c, c.groups, data, log);
  Manifest m;
  record_common(m, "rank", c);
  m.input("reviews", c.reviews);
  m.input("labels", c.labels);
  m.input("groups", c.groups);
  m.input("word_vectors", c.word_vectors);
  m.set("time_window", c.detection.indicators.time_window_days);
  record_rank(m, c);
  m.outputs(c.out_dir, {kRankedFile, kEmbeddingFile, kCollusionFile});
  m.write(c.out_dir);
}

void cmd_eval(const PipelineConfig& c, std::ostream& log) {
  validate(c, true, true, true);
  const Dataset data = load(c, log);
  prepare_out_dir(c.out_dir);
  run_eval(c, c.groups, c.ranked, data, log);
  Manifest m;
  record_common(m, "eval", c);
  m.input("reviews", c.reviews);
  m.input("labels", c.labels);
  m.input("groups", c.groups);
  m.input("ranked", c.ranked);
  m.input("word_vectors", c.word_vectors);
  record_eval(m, c);
  m.outputs(c.out_dir, {kMetricsFile, kGroupScoresFile});
  m.write(c.out_dir);
}

void cmd_pipeline(const PipelineConfig& c, std::ostream& log) {
  stage("setup", [&] { validate(c, false, false, false); });
  Dataset data;
  stage("load", [&] { data = load(c, log); });
  stage("setup", [&] { prepare_out_dir(c.out_dir); });
  const auto groups_path = c.out_dir / kGroupsFile;
  const auto ranked_path = c.out_dir / kRankedFile;
  stage("detect", [&] { run_detect(c, data, log); });
  stage("rank", [&] { run_rank(c, groups_path, data, log); });
  const bool evaluate = data.has_labels();
  if (evaluate) stage("eval", [&] { run_eval(c, groups_path, ranked_path, data, log); });
  else log << "no labels given; skipping eval\n";

  Manifest m;
  record_common(m, "pipeline", c);
  m.input("reviews", c.reviews);
  m.input("labels", c.labels);
  m.input("word_vectors", c.word_vectors);
  record_detection(m, c.detection);
  record_rank(m, c);
  record_eval(m, c);
  m.set("eval", evaluate ? "run" : "skipped");
  m.outputs(c.out_dir,
            {kGroupsFile, kIndicatorsFile, kRankedFile, kMetricsFile, kGroupScoresFile, kEmbeddingFile, kCollusionFile});
  m.write(c.out_dir);
}

}  // namespace defrauder::cli
