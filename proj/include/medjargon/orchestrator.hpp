#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "medjargon/augmentation.hpp"
#include "medjargon/corpus.hpp"
#include "medjargon/gateway.hpp"
#include "medjargon/metrics.hpp"
#include "medjargon/prompting.hpp"

namespace medjargon {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct GridSpec {
  std::vector<PromptStyle> styles = {PromptStyle::General, PromptStyle::Structured};
  std::vector<int> shots = {0, 2};  // 0 = zero-shot; nonzero = few-shot n
  std::vector<int> ks = {3, 5, 10};
};

struct EvaluateConfig {
  std::string config_path;  // where this config was loaded from
  std::string gold_corpus;
  std::string templates_dir;  // empty = builtin templates
  std::string cache_file;
  std::string output_dir;
  int fold_count = 5;
  std::uint64_t fold_seed = 1;
  std::uint64_t sampling_seed = 2;
  int parallelism = 4;
  GridSpec grid;
  std::vector<ProviderConfig> providers;
};

struct AugmentConfig {
  std::string config_path;
  std::string gold_corpus;
  std::string discharge_pool;
  std::string templates_dir;
  std::string cache_file;
  std::string output_dir;
  std::uint64_t sampling_seed = 2;
  int parallelism = 4;
  ProviderConfig teacher;
  std::vector<std::string> exemplar_ids;
  std::vector<std::size_t> sizes = {10, 100, 1000, 10000};
  std::map<std::string, std::string> training_overrides;
};

EvaluateConfig load_evaluate_config(const std::string& path);
AugmentConfig load_augment_config(const std::string& path);

/// Runs the full grid and writes report.md, report.csv, report.json,
/// scores.jsonl and manifest.json under output_dir. Every output except the
/// manifest timestamp is byte-stable given the same cache.
RunReport run_evaluate(const EvaluateConfig& config, std::shared_ptr<Transport> transport,
                       const Gateway::Options& gateway_options = {});

struct AugmentOutcome {
  std::vector<std::string> training_files;
  std::string config_file;
  std::size_t accepted = 0;
  std::size_t parse_failed = 0;
};

AugmentOutcome run_augment(const AugmentConfig& config, std::shared_ptr<Transport> transport,
                           const Gateway::Options& gateway_options = {});

/// Re-renders the persisted report of an earlier run directory.
std::string run_report(const std::string& run_dir, TableFormat format);

struct CompareRequest {
  std::string run_a;
  std::string run_b;
  std::string metric;  // "f1" or "mrr"
  PromptStyle style = PromptStyle::General;
  bool few_shot = false;
  int top_k = 3;
  std::string model;  // optional; required when a run holds several models
};

struct CompareResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double p_value = 0.0;
  std::string line;  // human-readable one-liner
};

CompareResult run_compare(const CompareRequest& request);

/// Parses "STYLE,SHOTS,K" (e.g. "general,few,5" or "structured,zero,top10").
void parse_cell_spec(const std::string& cell, CompareRequest& out);

RunReport load_run_report(const std::string& run_dir);

}  // namespace medjargon
