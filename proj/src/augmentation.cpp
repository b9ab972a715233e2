#include "medjargon/augmentation.hpp"

#include <json.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <set>

#include "medjargon/errors.hpp"
#include "medjargon/util.hpp"

namespace medjargon {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<ExemplarInput> resolve_exemplars(const AugmentationJob& job,
                                             const Corpus& gold) {
  if (job.exemplar_ids.size() != 2 || job.exemplar_ids[0] == job.exemplar_ids[1]) {
    raise(ErrorKind::ConfigError, "augmentation needs 2 distinct exemplar ids");
  }
  std::vector<ExemplarInput> out;
  for (const auto& id : job.exemplar_ids) {
    const ClinicalNote* note = gold.find(id);
    if (!note) raise(ErrorKind::ConfigError, "exemplar id not in gold corpus: " + id);
    out.push_back({note->text, note->gold});
  }
  return out;
}

}  // namespace

std::vector<AugmentedRecord> generate_records(const AugmentationJob& job,
                                              const Corpus& gold,
                                              const std::vector<DischargeNote>& pool,
                                              Gateway& gateway,
                                              const TemplateStore& store) {
  if (job.sizes.empty()) raise(ErrorKind::ConfigError, "no target sizes configured");
  if (!std::is_sorted(job.sizes.begin(), job.sizes.end())) {
    raise(ErrorKind::ConfigError, "target sizes must be ascending");
  }
  const std::vector<ExemplarInput> exemplars = resolve_exemplars(job, gold);
  const std::size_t target = job.sizes.back();

  // Leakage guard: evaluation note bodies must never become training inputs.
  std::set<std::string> gold_texts;
  for (const auto& n : gold.notes) gold_texts.insert(n.text);

  std::vector<DischargeNote> walk = sample_pool(pool, pool.size(), job.seed);
  std::erase_if(walk, [&](const DischargeNote& n) { return gold_texts.count(n.text) > 0; });

  std::vector<AugmentedRecord> records;
  std::size_t accepted = 0;
  std::size_t cursor = 0;

  while (accepted < target && cursor < walk.size()) {
    const std::size_t want = target - accepted;
    const std::size_t take = std::min(want, walk.size() - cursor);

    std::vector<std::string> prompts;
    prompts.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      prompts.push_back(
          render_augmentation_prompt(store, exemplars, walk[cursor + i]).full_text);
    }
    const std::vector<BatchItem> items = gateway.run_batch(prompts, job.parallelism);

    for (std::size_t i = 0; i < take; ++i) {
      const DischargeNote& note = walk[cursor + i];
      if (!items[i].ok) {
        raise(ErrorKind::ProviderRejected,
              "teacher failed on pool note " + note.id + ": " + items[i].error);
      }
      AugmentedRecord rec;
      rec.source_note_id = note.id;
      rec.note_text = note.text;
      rec.teacher_response = items[i].text;
      try {
        rec.parsed = parse_ranked_list(items[i].text);
        rec.status = AugmentedRecord::Status::Accepted;
        ++accepted;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ParseEmpty) throw;
        rec.status = AugmentedRecord::Status::ParseFailed;  // kept for audit
      }
      records.push_back(std::move(rec));
    }
    cursor += take;
  }

  if (accepted < target) {
    throw PoolExhaustedError(
        accepted, fmt::format("pool exhausted at {} accepted records, target {}", accepted,
                              target));
  }
  return records;
}

std::string training_instruction(const TemplateStore& store) {
  const PromptSpec spec{PromptStyle::Structured, 0, 10};
  return render_prompt(store, spec, "", {}).instruction_text;
}

std::vector<std::string> emit_training_sets(const std::vector<AugmentedRecord>& records,
                                            const std::vector<std::size_t>& sizes,
                                            const std::string& out_dir,
                                            const TemplateStore& store) {
  std::vector<const AugmentedRecord*> accepted;
  for (const auto& r : records) {
    if (r.status == AugmentedRecord::Status::Accepted) accepted.push_back(&r);
  }
  if (sizes.empty()) raise(ErrorKind::ConfigError, "no target sizes configured");
  if (accepted.size() < sizes.back()) {
    raise(ErrorKind::InsufficientRecords,
          fmt::format("{} accepted records, largest target is {}", accepted.size(),
                      sizes.back()));
  }

  const std::string instruction = training_instruction(store);
  std::vector<std::string> paths;
  for (std::size_t size : sizes) {
    std::string body;
    for (std::size_t i = 0; i < size; ++i) {
      const AugmentedRecord& r = *accepted[i];
      std::vector<RankedEntry> entries;
      for (const auto& t : r.parsed->terms) entries.push_back({t.text, t.major, t.minor});
      ordered_json j;
      j["instruction"] = instruction;
      j["input"] = r.note_text;
      j["output"] = render_ranked_block(entries);
      body += j.dump();
      body.push_back('\n');
    }
    const std::string path = fmt::format("{}/train_{}.jsonl", out_dir, size);
    write_file(path, body);
    paths.push_back(path);
  }
  return paths;
}

namespace {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "lora_rank", "learning_rate", "epochs", "per_device_batch", "grad_accum_steps"};
  return keys;
}

}  // namespace

void emit_training_config(const std::map<std::string, std::string>& overrides,
                          const std::string& path) {
  TrainingConfig cfg;
  std::vector<std::string> applied;
  for (const auto& [key, value] : overrides) {
    try {
      if (key == "lora_rank") cfg.lora_rank = std::stoi(value);
      else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "per_device_batch") cfg.per_device_batch = std::stoi(value);
      else if (key == "grad_accum_steps") cfg.grad_accum_steps = std::stoi(value);
      else raise(ErrorKind::ConfigError, "unknown training config key: " + key);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(ErrorKind::ConfigError, "bad value for " + key + ": " + value);
    }
    applied.push_back(key);
  }

  std::string body = "# fine-tuning hyperparameters\n";
  if (!applied.empty()) {
    body += "# overridden:";
    for (const auto& k : applied) body += " " + k;
    body += "\n";
  }
  body += fmt::format("lora_rank={}\n", cfg.lora_rank);
  body += fmt::format("learning_rate={}\n", cfg.learning_rate);
  body += fmt::format("epochs={}\n", cfg.epochs);
  body += fmt::format("per_device_batch={}\n", cfg.per_device_batch);
  body += fmt::format("grad_accum_steps={}\n", cfg.grad_accum_steps);
  write_file(path, body);
}

TrainingConfig load_training_config(const std::string& path) {
  TrainingConfig cfg;
  std::set<std::string> seen;
  for (const auto& raw : split_lines(read_file(path))) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      raise(ErrorKind::MalformedRecord, path + ": expected key=value, got: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "lora_rank") cfg.lora_rank = std::stoi(value);
      else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "per_device_batch") cfg.per_device_batch = std::stoi(value);
      else if (key == "grad_accum_steps") cfg.grad_accum_steps = std::stoi(value);
      else raise(ErrorKind::MalformedRecord, path + ": unknown key " + key);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(ErrorKind::MalformedRecord, path + ": bad value for " + key);
    }
    seen.insert(key);
  }
  for (const auto& key : config_keys()) {
    if (!seen.count(key)) raise(ErrorKind::MalformedRecord, path + ": missing key " + key);
  }
  return cfg;
}

}  // namespace medjargon
