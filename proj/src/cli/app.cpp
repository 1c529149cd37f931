#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "defrauder/cli.hpp"
#include "defrauder/error.hpp"

namespace defrauder::cli {
namespace {

constexpr const char* kPrecedence =
    "Parameter precedence: command-line flags, then the --config file, then the environment\n"
    "(DEFRAUDER_THREADS for --threads), then built-in defaults.\n"
    "The config file holds `name = value` lines using the long flag names without dashes.";

struct Raw {
  std::string order = "ascending";
  std::string k_list = "10,20,30,40,50";
  std::string ks_feature = "co_reviewed_count";
  std::string reviews, labels, groups, ranked, out, word_vectors;
};

void add_common(CLI::App& sub, PipelineConfig& c, Raw& raw) {
  sub.add_option("--config", "Parameter file (name = value per line)");
  sub.add_option("--out", raw.out, "Output directory")->required();
  sub.add_option("--threads", c.threads, "Worker threads, 0 for all cores; 1 is deterministic")
      ->envname("DEFRAUDER_THREADS")
      ->capture_default_str();
  sub.add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  sub.footer(kPrecedence);
}

void add_input(CLI::App& sub, PipelineConfig& c, Raw& raw, bool labels_required) {
  sub.add_option("--reviews", raw.reviews, "Review file (CSV or JSON lines)")->required();
  auto* labels = sub.add_option("--labels", raw.labels, "Label file reviewer_id,label");
  if (labels_required) labels->required();
  sub.add_option("--format", c.format, "Review file format: auto, csv or jsonl")->capture_default_str();
  sub.add_option("--rating-min", c.rating_scale.min_rating, "Lowest rating on the scale")->capture_default_str();
  sub.add_option("--rating-max", c.rating_scale.max_rating, "Highest rating on the scale")->capture_default_str();
  sub.add_option("--time-window", c.detection.indicators.time_window_days, "Time-window indicator span T (days)")
      ->capture_default_str();
}

void add_detection(CLI::App& sub, PipelineConfig& c) {
  auto& d = c.detection;
  sub.add_option("--tau-t", d.tau_t_days, "Max days between a reviewer's linked reviews")->capture_default_str();
  sub.add_option("--tau-spam", d.tau_spam, "Collective-score threshold")->capture_default_str();
  sub.add_option("--js-merge", d.js_merge_threshold, "Jaccard threshold for merging edge attributes")
      ->capture_default_str();
  sub.add_option("--max-iterations", d.max_iterations, "Safeguard on line-graph iterations")->capture_default_str();
  sub.add_option("--min-group-size", d.min_group_size, "Smallest group kept")->capture_default_str();
}

void add_rank(CLI::App& sub, PipelineConfig& c, Raw& raw) {
  auto& co = c.collusion;
  sub.add_option("--alpha", co.alpha, "Time coherence weight")->capture_default_str();
  sub.add_option("--beta", co.beta, "Rating coherence weight")->capture_default_str();
  sub.add_option("--gamma", co.gamma, "Text similarity weight")->capture_default_str();
  sub.add_option("--tau-t-collusion", co.tau_t_days, "Time threshold for pair collusion (days)")
      ->capture_default_str();
  sub.add_option("--tau-r-percent", co.tau_r_percent, "Rating threshold as percent of the scale span")
      ->capture_default_str();
  sub.add_option("--theta", co.theta, "Product suspicion exponent")->capture_default_str();
  auto& e = c.embedding;
  sub.add_option("--dim", e.dimension, "Embedding dimension")->capture_default_str();
  sub.add_option("--walk-length", e.walk_length, "Random walk length")->capture_default_str();
  sub.add_option("--walks-per-node", e.walks_per_node, "Walks started per node")->capture_default_str();
  sub.add_option("--window", e.window, "Skip-gram context window")->capture_default_str();
  sub.add_option("--p", e.return_bias, "Walk return bias")->capture_default_str();
  sub.add_option("--q", e.inout_bias, "Walk in-out bias")->capture_default_str();
  sub.add_option("--negative", e.negative, "Negative samples per context")->capture_default_str();
  sub.add_option("--epochs", e.epochs, "Passes over the walk corpus")->capture_default_str();
  sub.add_option("--learning-rate", e.learning_rate, "Initial skip-gram learning rate")->capture_default_str();
  sub.add_option("--normalize", e.normalize, "Scale embedding rows to unit length")->capture_default_str();
  sub.add_option("--order", raw.order, "Rank order: ascending (tightest first) or descending")
      ->capture_default_str();
  sub.add_option("--word-vectors", raw.word_vectors, "Pretrained word vectors for review text");
  sub.add_flag("--dump-embedding", c.dump_embedding, "Also write the embedding and collusion graph");
}

void add_eval(CLI::App& sub, PipelineConfig& c, Raw& raw) {
  sub.add_option("--k", raw.k_list, "Comma list of NDCG cutoffs")->capture_default_str();
  sub.add_option("--ks-feature", raw.ks_feature, "co_reviewed_count, rating_gap or time_gap")
      ->capture_default_str();
  sub.add_option("--ks-pairs", c.ks_pairs, "Random pairs for the KS test")->capture_default_str();
}

void finalize(PipelineConfig& c, const Raw& raw) {
  c.reviews = raw.reviews;
  c.labels = raw.labels;
  c.groups = raw.groups;
  c.ranked = raw.ranked;
  c.out_dir = raw.out;
  c.word_vectors = raw.word_vectors;
  c.order = parse_rank_order(raw.order);
  c.k_list = parse_k_list(raw.k_list);
  c.ks_feature = parse_pair_feature(raw.ks_feature);
}

// CLI11 reads config files only for the top-level app, so a subcommand's
// --config file is spliced into the arguments right after the subcommand
// name. Options keep their last value, which lets explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::size_t sub = 1;
  while (sub < args.size() && args[sub].rfind("-", 0) == 0) ++sub;
  std::optional<std::string> path;
  for (std::size_t k = sub + 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    else if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw Error(Errc::Io, "cannot open config file " + *path);
  std::vector<std::string> spliced;
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents.front() != args[sub]) continue;
    std::string value;
    for (std::size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
    spliced.push_back("--" + item.name + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(std::min(sub + 1, args.size())), spliced.begin(),
              spliced.end());
  return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Detect, rank and evaluate collusive reviewer groups.", "defrauder");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  PipelineConfig cfg;
  Raw raw;

  std::string spec_path, synth_out, synth_format = "csv";
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted groups");
  synth->add_option("--spec", spec_path, "Campaign spec file (default: 2000 organic reviewers, 10 planted groups)");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the spec seed");
  synth->add_option("--format", synth_format, "Review file format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();

  auto* detect = app.add_subcommand("detect", "Extract candidate groups into groups.tsv and indicators.csv");
  add_common(*detect, cfg, raw);
  add_input(*detect, cfg, raw, false);
  add_detection(*detect, cfg);

  auto* rank = app.add_subcommand("rank", "Rank groups by embedding dispersion into ranked.csv");
  add_common(*rank, cfg, raw);
  add_input(*rank, cfg, raw, false);
  rank->add_option("--groups", raw.groups, "Groups file from detect")->required();
  add_rank(*rank, cfg, raw);

  auto* eval = app.add_subcommand("eval", "Score a ranked report against labels into metrics.txt");
  add_common(*eval, cfg, raw);
  add_input(*eval, cfg, raw, true);
  eval->add_option("--groups", raw.groups, "Groups file from detect")->required();
  eval->add_option("--ranked", raw.ranked, "Ranked report from rank")->required();
  add_eval(*eval, cfg, raw);

  auto* pipeline = app.add_subcommand("pipeline", "Run detect, rank and eval into one directory");
  add_common(*pipeline, cfg, raw);
  add_input(*pipeline, cfg, raw, false);
  add_detection(*pipeline, cfg);
  add_rank(*pipeline, cfg, raw);
  add_eval(*pipeline, cfg, raw);

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (synth->parsed()) {
      CampaignSpec spec = spec_path.empty() ? default_campaign_spec() : load_campaign_spec(spec_path);
      if (synth_seed) spec.seed = *synth_seed;
      cmd_synth(spec, synth_out, synth_format == "csv" ? ReviewFormat::Csv : ReviewFormat::JsonLines, err);
      return 0;
    }
    finalize(cfg, raw);
    if (detect->parsed()) cmd_detect(cfg, err);
    else if (rank->parsed()) cmd_rank(cfg, err);
    else if (eval->parsed()) cmd_eval(cfg, err);
    else if (pipeline->parsed()) cmd_pipeline(cfg, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace defrauder::cli
