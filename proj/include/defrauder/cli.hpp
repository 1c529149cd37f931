#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "defrauder/collusion.hpp"
#include "defrauder/detection.hpp"
#include "defrauder/embedding.hpp"
#include "defrauder/evaluation.hpp"
#include "defrauder/ingestion.hpp"
#include "defrauder/ranking.hpp"
#include "defrauder/synthgen.hpp"

namespace defrauder::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kGroupsFile = "groups.tsv";
inline constexpr const char* kIndicatorsFile = "indicators.csv";
inline constexpr const char* kRankedFile = "ranked.csv";
inline constexpr const char* kMetricsFile = "metrics.txt";
inline constexpr const char* kGroupScoresFile = "group_scores.csv";
inline constexpr const char* kManifestFile = "manifest.txt";
inline constexpr const char* kEmbeddingFile = "embedding.txt";
inline constexpr const char* kCollusionFile = "collusion_graph.txt";

struct PipelineConfig {
  std::filesystem::path reviews;
  std::filesystem::path labels;  // empty when absent
  std::filesystem::path groups;
  std::filesystem::path ranked;
  std::filesystem::path out_dir;
  std::filesystem::path word_vectors;  // empty selects hashed term frequencies
  std::string format = "auto";         // auto, csv or jsonl
  RatingScale rating_scale;
  DetectionParams detection;
  CollusionParams collusion;
  EmbeddingParams embedding;
  RankOrder order = RankOrder::Ascending;
  std::vector<std::size_t> k_list{10, 20, 30, 40, 50};
  PairFeature ks_feature = PairFeature::CoReviewedCount;
  std::size_t ks_pairs = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 means all cores
  bool dump_embedding = false;
};

// Checks parameters and that every referenced input file exists.
// Throws Error(InvalidArgument) or Error(Io).
void validate(const PipelineConfig& config, bool need_groups, bool need_ranked, bool need_labels);

// Each command writes its outputs and a manifest into config.out_dir and
// reports progress on `log`. Failures throw defrauder::Error.
void cmd_synth(const CampaignSpec& spec, const std::filesystem::path& out_dir, ReviewFormat format,
               std::ostream& log);
void cmd_detect(const PipelineConfig& config, std::ostream& log);
void cmd_rank(const PipelineConfig& config, std::ostream& log);
void cmd_eval(const PipelineConfig& config, std::ostream& log);
// detect, rank, then eval when labels are given. A failing stage aborts the
// run with the stage name in the message.
void cmd_pipeline(const PipelineConfig& config, std::ostream& log);

// The spec `synth` uses without --spec.
CampaignSpec default_campaign_spec();

// 64-bit FNV-1a over a file's bytes, as 16 hex digits. Throws Error(Io).
std::string file_digest(const std::filesystem::path& path);

// Entry point behind the `defrauder` binary. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace defrauder::cli
