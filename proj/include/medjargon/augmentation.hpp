#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medjargon/corpus.hpp"
#include "medjargon/extraction.hpp"
#include "medjargon/gateway.hpp"
#include "medjargon/prompting.hpp"

namespace medjargon {

struct AugmentationJob {
  std::string pool_path;
  ProviderConfig teacher;
  std::vector<std::string> exemplar_ids;  // exactly 2 distinct gold note ids
  std::vector<std::size_t> sizes;         // ascending target record counts
  std::uint64_t seed = 0;
  int parallelism = 1;
};

struct AugmentedRecord {
  enum class Status { Accepted, ParseFailed };

  std::string source_note_id;
  std::string note_text;
  std::string teacher_response;
  std::optional<Extraction> parsed;  // set iff Accepted
  Status status = Status::ParseFailed;
};

struct TrainingConfig {
  int lora_rank = 64;
  double learning_rate = 3e-4;
  int epochs = 100;
  int per_device_batch = 1;
  int grad_accum_steps = 128;

  bool operator==(const TrainingConfig&) const = default;
};

/// Walks a deterministic shuffle of the pool, prompting the teacher until the
/// largest target size is reached in Accepted records (unparseable teacher
/// output keeps the walk going). Gold note texts are excluded from the pool
/// so training inputs never leak evaluation data. Raises PoolExhaustedError
/// (carrying the accepted count) when the pool runs out first.
std::vector<AugmentedRecord> generate_records(const AugmentationJob& job,
                                              const Corpus& gold,
                                              const std::vector<DischargeNote>& pool,
                                              Gateway& gateway,
                                              const TemplateStore& store);

/// The instruction field every emitted training example carries: the
/// zero-shot structured top-10 instruction section.
std::string training_instruction(const TemplateStore& store);

/// One train_<size>.jsonl per size, each holding the first <size> Accepted
/// records ({instruction, input, output} lines), so smaller sets are strict
/// prefixes of larger ones.
std::vector<std::string> emit_training_sets(const std::vector<AugmentedRecord>& records,
                                            const std::vector<std::size_t>& sizes,
                                            const std::string& out_dir,
                                            const TemplateStore& store);

/// Flat key=value file with the TrainingConfig fields; overrides are applied
/// and noted in a comment.
void emit_training_config(const std::map<std::string, std::string>& overrides,
                          const std::string& path);

TrainingConfig load_training_config(const std::string& path);

}  // namespace medjargon
