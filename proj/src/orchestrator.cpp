#include "medjargon/orchestrator.hpp"

#include <json.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "medjargon/errors.hpp"
#include "medjargon/extraction.hpp"
#include "medjargon/util.hpp"

namespace medjargon {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse_json_file(const std::string& path) {
  const std::string body = read_file(path);
  try {
    return ordered_json::parse(body);
  } catch (const std::exception& e) {
    raise(ErrorKind::ConfigError, path + ": invalid json: " + e.what());
  }
}

void reject_unknown_keys(const ordered_json& j, const std::set<std::string>& known,
                         const std::string& ctx) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) {
      raise(ErrorKind::ConfigError, ctx + ": unknown key \"" + key + "\"");
    }
  }
}

ProviderConfig parse_provider(const ordered_json& j, const std::string& ctx) {
  if (!j.is_object()) raise(ErrorKind::ConfigError, ctx + ": provider must be an object");
  reject_unknown_keys(j,
                      {"name", "base_url", "model", "auth_env", "max_tokens", "temperature",
                       "requests_per_minute"},
                      ctx);
  ProviderConfig cfg;
  for (const char* key : {"name", "base_url", "model"}) {
    if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
      raise(ErrorKind::ConfigError, ctx + ": provider needs a non-empty \"" +
                                        std::string(key) + "\"");
    }
  }
  cfg.name = j["name"].get<std::string>();
  cfg.base_url = j["base_url"].get<std::string>();
  cfg.model = j["model"].get<std::string>();
  if (j.contains("auth_env")) cfg.auth_env = j["auth_env"].get<std::string>();
  if (j.contains("max_tokens")) cfg.max_tokens = j["max_tokens"].get<int>();
  if (j.contains("temperature")) cfg.temperature = j["temperature"].get<double>();
  if (j.contains("requests_per_minute")) {
    cfg.requests_per_minute = j["requests_per_minute"].get<int>();
  }
  if (cfg.temperature < 0) raise(ErrorKind::ConfigError, ctx + ": temperature must be >= 0");
  if (cfg.requests_per_minute < 1) {
    raise(ErrorKind::ConfigError, ctx + ": requests_per_minute must be >= 1");
  }
  if (cfg.max_tokens < 1) raise(ErrorKind::ConfigError, ctx + ": max_tokens must be >= 1");
  return cfg;
}

ordered_json provider_manifest(const ProviderConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["base_url"] = cfg.base_url;
  j["model"] = cfg.model;
  j["auth_env"] = cfg.auth_env;  // the variable name, never its value
  j["max_tokens"] = cfg.max_tokens;
  j["temperature"] = cfg.temperature;
  j["requests_per_minute"] = cfg.requests_per_minute;
  return j;
}

PromptStyle parse_style(const std::string& s, const std::string& ctx) {
  if (s == "general") return PromptStyle::General;
  if (s == "structured") return PromptStyle::Structured;
  raise(ErrorKind::ConfigError, ctx + ": style must be general or structured, got " + s);
}

std::string require_string(const ordered_json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
    raise(ErrorKind::ConfigError, ctx + ": missing required \"" + key + "\"");
  }
  return j[key].get<std::string>();
}

}  // namespace

EvaluateConfig load_evaluate_config(const std::string& path) {
  const ordered_json j = parse_json_file(path);
  if (!j.is_object()) raise(ErrorKind::ConfigError, path + ": config must be an object");
  reject_unknown_keys(j,
                      {"gold_corpus", "templates_dir", "cache_file", "output_dir",
                       "fold_count", "fold_seed", "sampling_seed", "fewshot_examples",
                       "parallelism", "grid", "providers"},
                      path);

  EvaluateConfig cfg;
  cfg.config_path = path;
  cfg.gold_corpus = require_string(j, "gold_corpus", path);
  cfg.output_dir = require_string(j, "output_dir", path);
  if (j.contains("templates_dir")) cfg.templates_dir = j["templates_dir"].get<std::string>();
  cfg.cache_file = j.contains("cache_file") ? j["cache_file"].get<std::string>()
                                            : cfg.output_dir + "/cache.jsonl";
  if (j.contains("fold_count")) cfg.fold_count = j["fold_count"].get<int>();
  if (j.contains("fold_seed")) cfg.fold_seed = j["fold_seed"].get<std::uint64_t>();
  if (j.contains("sampling_seed")) cfg.sampling_seed = j["sampling_seed"].get<std::uint64_t>();
  if (j.contains("parallelism")) cfg.parallelism = j["parallelism"].get<int>();
  if (cfg.parallelism < 1) raise(ErrorKind::ConfigError, path + ": parallelism must be >= 1");

  int fewshot = 2;
  if (j.contains("fewshot_examples")) fewshot = j["fewshot_examples"].get<int>();
  if (fewshot < 1) raise(ErrorKind::ConfigError, path + ": fewshot_examples must be >= 1");

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    reject_unknown_keys(g, {"styles", "shots", "top_k"}, path + ": grid");
    if (g.contains("styles")) {
      cfg.grid.styles.clear();
      for (const auto& s : g["styles"]) {
        cfg.grid.styles.push_back(parse_style(s.get<std::string>(), path));
      }
    }
    if (g.contains("shots")) {
      cfg.grid.shots.clear();
      for (const auto& s : g["shots"]) {
        const std::string token = s.get<std::string>();
        if (token == "zero") cfg.grid.shots.push_back(0);
        else if (token == "few") cfg.grid.shots.push_back(fewshot);
        else raise(ErrorKind::ConfigError, path + ": shots must be zero or few, got " + token);
      }
    }
    if (g.contains("top_k")) {
      cfg.grid.ks.clear();
      for (const auto& s : g["top_k"]) cfg.grid.ks.push_back(s.get<int>());
    }
  } else {
    cfg.grid.shots = {0, fewshot};
  }
  for (int k : cfg.grid.ks) {
    if (k != 3 && k != 5 && k != 10) {
      raise(ErrorKind::ConfigError, path + ": top_k entries must be 3, 5 or 10");
    }
  }
  if (cfg.grid.styles.empty() || cfg.grid.shots.empty() || cfg.grid.ks.empty()) {
    raise(ErrorKind::ConfigError, path + ": grid has an empty axis");
  }
  {
    std::set<int> dedup(cfg.grid.shots.begin(), cfg.grid.shots.end());
    if (dedup.size() != cfg.grid.shots.size()) {
      raise(ErrorKind::ConfigError, path + ": duplicate shots entries");
    }
  }

  if (!j.contains("providers") || !j["providers"].is_array() || j["providers"].empty()) {
    raise(ErrorKind::ConfigError, path + ": needs at least one provider");
  }
  std::set<std::string> names;
  for (const auto& pj : j["providers"]) {
    ProviderConfig p = parse_provider(pj, path);
    if (!names.insert(p.name).second) {
      raise(ErrorKind::ConfigError, path + ": duplicate provider name " + p.name);
    }
    cfg.providers.push_back(std::move(p));
  }
  return cfg;
}

AugmentConfig load_augment_config(const std::string& path) {
  const ordered_json j = parse_json_file(path);
  if (!j.is_object()) raise(ErrorKind::ConfigError, path + ": config must be an object");
  reject_unknown_keys(j,
                      {"gold_corpus", "discharge_pool", "templates_dir", "cache_file",
                       "output_dir", "sampling_seed", "parallelism", "teacher",
                       "exemplar_ids", "sizes", "training_overrides"},
                      path);

  AugmentConfig cfg;
  cfg.config_path = path;
  cfg.gold_corpus = require_string(j, "gold_corpus", path);
  cfg.discharge_pool = require_string(j, "discharge_pool", path);
  cfg.output_dir = require_string(j, "output_dir", path);
  if (j.contains("templates_dir")) cfg.templates_dir = j["templates_dir"].get<std::string>();
  cfg.cache_file = j.contains("cache_file") ? j["cache_file"].get<std::string>()
                                            : cfg.output_dir + "/cache.jsonl";
  if (j.contains("sampling_seed")) cfg.sampling_seed = j["sampling_seed"].get<std::uint64_t>();
  if (j.contains("parallelism")) cfg.parallelism = j["parallelism"].get<int>();
  if (cfg.parallelism < 1) raise(ErrorKind::ConfigError, path + ": parallelism must be >= 1");

  if (!j.contains("teacher")) raise(ErrorKind::ConfigError, path + ": missing teacher provider");
  cfg.teacher = parse_provider(j["teacher"], path + ": teacher");

  if (!j.contains("exemplar_ids") || !j["exemplar_ids"].is_array() ||
      j["exemplar_ids"].size() != 2) {
    raise(ErrorKind::ConfigError, path + ": exemplar_ids must list exactly 2 gold note ids");
  }
  for (const auto& id : j["exemplar_ids"]) cfg.exemplar_ids.push_back(id.get<std::string>());

  if (j.contains("sizes")) {
    cfg.sizes.clear();
    for (const auto& s : j["sizes"]) {
      const long long v = s.get<long long>();
      if (v < 1) raise(ErrorKind::ConfigError, path + ": sizes must be positive");
      cfg.sizes.push_back(static_cast<std::size_t>(v));
    }
  }
  if (cfg.sizes.empty() || !std::is_sorted(cfg.sizes.begin(), cfg.sizes.end())) {
    raise(ErrorKind::ConfigError, path + ": sizes must be a non-empty ascending list");
  }

  if (j.contains("training_overrides")) {
    for (const auto& [key, value] : j["training_overrides"].items()) {
      cfg.training_overrides[key] =
          value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  return cfg;
}

namespace {

TemplateStore resolve_templates(const std::string& dir) {
  return dir.empty() ? TemplateStore::builtin() : TemplateStore::load(dir);
}

std::string digest_of_file(const std::string& path) {
  return "sha256:" + sha256_hex(read_file(path));
}

std::string digest_of_config(const std::string& path) {
  return path.empty() ? "sha256:" + sha256_hex("") : digest_of_file(path);
}

ordered_json summary_json(const MetricSummary& m) {
  ordered_json j;
  j["fold_means"] = m.fold_means;
  j["mean"] = m.mean;
  j["ci_halfwidth"] = m.ci_halfwidth;
  return j;
}

MetricSummary summary_from_json(const ordered_json& j) {
  MetricSummary m;
  for (const auto& v : j.at("fold_means")) m.fold_means.push_back(v.get<double>());
  m.mean = j.at("mean").get<double>();
  m.ci_halfwidth = j.at("ci_halfwidth").get<double>();
  return m;
}

std::string serialize_run_report(const RunReport& report) {
  ordered_json j;
  j["models"] = report.models;
  j["styles"] = ordered_json::array();
  for (PromptStyle s : report.styles) j["styles"].push_back(prompt_style_name(s));
  j["shots"] = report.shots_list;
  j["ks"] = report.ks;
  j["manifest_ref"] = report.manifest_ref;
  j["cells"] = ordered_json::array();
  for (const auto& cell : report.cells) {
    ordered_json cj;
    cj["model"] = cell.model;
    cj["style"] = prompt_style_name(cell.style);
    cj["shots"] = cell.shots;
    cj["top_k"] = cell.top_k;
    cj["precision"] = summary_json(cell.precision);
    cj["recall"] = summary_json(cell.recall);
    cj["f1"] = summary_json(cell.f1);
    cj["mrr"] = summary_json(cell.mrr);
    j["cells"].push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

RunReport parse_run_report(const ordered_json& j, const std::string& ctx) {
  RunReport report;
  try {
    for (const auto& m : j.at("models")) report.models.push_back(m.get<std::string>());
    for (const auto& s : j.at("styles")) {
      report.styles.push_back(parse_style(s.get<std::string>(), ctx));
    }
    for (const auto& s : j.at("shots")) report.shots_list.push_back(s.get<int>());
    for (const auto& k : j.at("ks")) report.ks.push_back(k.get<int>());
    report.manifest_ref = j.at("manifest_ref").get<std::string>();
    for (const auto& cj : j.at("cells")) {
      CellReport cell;
      cell.model = cj.at("model").get<std::string>();
      cell.style = parse_style(cj.at("style").get<std::string>(), ctx);
      cell.shots = cj.at("shots").get<int>();
      cell.top_k = cj.at("top_k").get<int>();
      cell.precision = summary_from_json(cj.at("precision"));
      cell.recall = summary_from_json(cj.at("recall"));
      cell.f1 = summary_from_json(cj.at("f1"));
      cell.mrr = summary_from_json(cj.at("mrr"));
      report.cells.push_back(std::move(cell));
    }
  } catch (const ordered_json::exception& e) {
    raise(ErrorKind::MalformedRecord, ctx + ": bad run report: " + e.what());
  }
  return report;
}

}  // namespace

RunReport load_run_report(const std::string& run_dir) {
  const std::string path = run_dir + "/report.json";
  if (!file_exists(path)) raise(ErrorKind::MissingFile, path);
  return parse_run_report(parse_json_file(path), path);
}

RunReport run_evaluate(const EvaluateConfig& config, std::shared_ptr<Transport> transport,
                       const Gateway::Options& gateway_options) {
  if (config.providers.empty()) raise(ErrorKind::ConfigError, "no providers configured");
  std::vector<std::string> corpus_warnings;
  const Corpus corpus = load_gold_corpus(config.gold_corpus, &corpus_warnings);
  const TemplateStore store = resolve_templates(config.templates_dir);
  const FoldSplit split = make_folds(corpus, config.fold_count, config.fold_seed);
  auto cache = std::make_shared<ResponseCache>(config.cache_file);

  std::vector<std::vector<const ClinicalNote*>> fold_notes(
      static_cast<std::size_t>(config.fold_count));
  for (const auto& note : corpus.notes) {
    fold_notes[static_cast<std::size_t>(split.assignment.at(note.id))].push_back(&note);
  }

  // One exemplar set per fold; shared across every cell evaluated on it.
  const int few_n = [&] {
    for (int s : config.grid.shots) {
      if (s > 0) return s;
    }
    return 0;
  }();
  std::vector<std::vector<ExemplarInput>> fold_exemplars(
      static_cast<std::size_t>(config.fold_count));
  if (few_n > 0) {
    for (int f = 0; f < config.fold_count; ++f) {
      for (const auto& id :
           select_fewshot(corpus, split, f, few_n, config.sampling_seed)) {
        if (split.assignment.at(id) == f) {
          throw std::logic_error("few-shot exemplar drawn from its own eval fold");
        }
        const ClinicalNote* note = corpus.find(id);
        fold_exemplars[static_cast<std::size_t>(f)].push_back({note->text, note->gold});
      }
    }
  }

  RunReport report;
  for (const auto& p : config.providers) report.models.push_back(p.name);
  report.styles = config.grid.styles;
  report.shots_list = config.grid.shots;
  report.ks = config.grid.ks;
  report.manifest_ref = "manifest.json";

  std::string scores_jsonl;

  for (const auto& provider : config.providers) {
    Gateway gateway(provider, transport, cache, gateway_options);
    for (PromptStyle style : config.grid.styles) {
      for (int shots : config.grid.shots) {
        for (int k : config.grid.ks) {
          std::vector<std::vector<NoteScore>> per_fold;
          for (int f = 0; f < config.fold_count; ++f) {
            const auto& notes = fold_notes[static_cast<std::size_t>(f)];
            const std::vector<ExemplarInput> no_exemplars;
            const auto& exemplars =
                shots > 0 ? fold_exemplars[static_cast<std::size_t>(f)] : no_exemplars;

            std::vector<std::string> prompts;
            prompts.reserve(notes.size());
            const PromptSpec spec{style, shots, k};
            for (const ClinicalNote* note : notes) {
              prompts.push_back(render_prompt(store, spec, note->text, exemplars).full_text);
            }
            const std::vector<BatchItem> items =
                gateway.run_batch(prompts, config.parallelism);

            std::vector<NoteScore> fold_scores;
            for (std::size_t i = 0; i < notes.size(); ++i) {
              const ClinicalNote* note = notes[i];
              if (!items[i].ok) {
                raise(ErrorKind::ProviderRejected,
                      fmt::format("{} {} shots={} top{} fold {} note {}: {}", provider.name,
                                  prompt_style_name(style), shots, k, f, note->id,
                                  items[i].error));
              }
              Extraction extraction;
              extraction.note_id = note->id;
              try {
                extraction = parse_ranked_list(items[i].text);
                extraction.note_id = note->id;
              } catch (const Error& e) {
                if (e.kind() != ErrorKind::ParseEmpty) throw;
                // Unparseable output scores as an empty extraction.
              }
              const Extraction truncated = truncate_top_k(extraction, k);
              std::vector<RankedEntry> gold_entries;
              for (const auto& t : note->gold.terms) {
                gold_entries.push_back({t.text, t.major, t.minor});
              }
              const std::vector<RankedEntry> gold_truncated =
                  truncate_top_k(gold_entries, k);
              const MatchAssignment assign = assign_matches(truncated, gold_truncated);
              NoteScore score = score_note(note->id, assign);

              ordered_json line;
              line["model"] = provider.name;
              line["prompt"] = prompt_style_name(style);
              line["shots"] = shots;
              line["top_k"] = k;
              line["fold"] = f;
              line["note_id"] = note->id;
              line["tp"] = score.counts.tp;
              line["fp"] = score.counts.fp;
              line["fn"] = score.counts.fn;
              line["precision"] = score.precision;
              line["recall"] = score.recall;
              line["f1"] = score.f1;
              line["reciprocal_rank"] = score.reciprocal_rank;
              line["first_match_position"] = score.first_match_position;
              scores_jsonl += line.dump();
              scores_jsonl.push_back('\n');

              fold_scores.push_back(std::move(score));
            }
            per_fold.push_back(std::move(fold_scores));
          }
          report.cells.push_back(
              summarize_cell(provider.name, style, shots, k, per_fold));
        }
      }
    }
  }

  ordered_json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["config_digest"] = digest_of_config(config.config_path);
  manifest["corpus_digest"] = digest_of_file(config.gold_corpus);
  manifest["fold_seed"] = config.fold_seed;
  manifest["fewshot_seed"] = config.sampling_seed;
  manifest["fold_count"] = config.fold_count;
  manifest["providers"] = ordered_json::array();
  for (const auto& p : config.providers) manifest["providers"].push_back(provider_manifest(p));
  manifest["cache_file"] = config.cache_file;
  manifest["timestamp"] = iso8601_utc_now();

  write_file(config.output_dir + "/report.md",
             render_report_table(report, TableFormat::Markdown));
  write_file(config.output_dir + "/report.csv",
             render_report_table(report, TableFormat::Csv));
  write_file(config.output_dir + "/scores.jsonl", scores_jsonl);
  write_file(config.output_dir + "/report.json", serialize_run_report(report));
  write_file(config.output_dir + "/manifest.json", manifest.dump(2) + "\n");
  if (!corpus_warnings.empty()) {
    std::string body;
    for (const auto& w : corpus_warnings) body += w + "\n";
    write_file(config.output_dir + "/corpus_warnings.txt", body);
  }
  return report;
}

AugmentOutcome run_augment(const AugmentConfig& config, std::shared_ptr<Transport> transport,
                           const Gateway::Options& gateway_options) {
  const Corpus corpus = load_gold_corpus(config.gold_corpus);
  const std::vector<DischargeNote> pool = load_discharge_pool(config.discharge_pool);
  const TemplateStore store = resolve_templates(config.templates_dir);
  auto cache = std::make_shared<ResponseCache>(config.cache_file);
  Gateway gateway(config.teacher, transport, cache, gateway_options);

  AugmentationJob job;
  job.pool_path = config.discharge_pool;
  job.teacher = config.teacher;
  job.exemplar_ids = config.exemplar_ids;
  job.sizes = config.sizes;
  job.seed = config.sampling_seed;
  job.parallelism = config.parallelism;

  const std::vector<AugmentedRecord> records =
      generate_records(job, corpus, pool, gateway, store);

  AugmentOutcome outcome;
  outcome.training_files = emit_training_sets(records, config.sizes, config.output_dir, store);
  outcome.config_file = config.output_dir + "/training_config.txt";
  emit_training_config(config.training_overrides, outcome.config_file);

  std::string audit;
  for (const auto& r : records) {
    ordered_json line;
    line["source_note_id"] = r.source_note_id;
    line["status"] =
        r.status == AugmentedRecord::Status::Accepted ? "accepted" : "parse_failed";
    line["teacher_response"] = r.teacher_response;
    audit += line.dump();
    audit.push_back('\n');
    if (r.status == AugmentedRecord::Status::Accepted) ++outcome.accepted;
    else ++outcome.parse_failed;
  }
  write_file(config.output_dir + "/augment_records.jsonl", audit);

  ordered_json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["config_digest"] = digest_of_config(config.config_path);
  manifest["corpus_digest"] = digest_of_file(config.gold_corpus);
  manifest["pool_digest"] = digest_of_file(config.discharge_pool);
  manifest["sampling_seed"] = config.sampling_seed;
  manifest["teacher"] = provider_manifest(config.teacher);
  manifest["exemplar_ids"] = config.exemplar_ids;
  manifest["sizes"] = config.sizes;
  manifest["cache_file"] = config.cache_file;
  manifest["timestamp"] = iso8601_utc_now();
  write_file(config.output_dir + "/manifest.json", manifest.dump(2) + "\n");
  return outcome;
}

std::string run_report(const std::string& run_dir, TableFormat format) {
  return render_report_table(load_run_report(run_dir), format);
}

void parse_cell_spec(const std::string& cell, CompareRequest& out) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = cell.find(',', start);
    parts.push_back(trim(cell.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) {
    raise(ErrorKind::ConfigError, "cell must be STYLE,SHOTS,K, got: " + cell);
  }
  out.style = parse_style(lowercase(parts[0]), "cell");
  const std::string shots = lowercase(parts[1]);
  if (shots == "zero") out.few_shot = false;
  else if (shots == "few") out.few_shot = true;
  else raise(ErrorKind::ConfigError, "cell shots must be zero or few, got: " + parts[1]);
  std::string k = lowercase(parts[2]);
  if (starts_with(k, "top")) k = k.substr(3);
  if (k == "3") out.top_k = 3;
  else if (k == "5") out.top_k = 5;
  else if (k == "10") out.top_k = 10;
  else raise(ErrorKind::ConfigError, "cell k must be 3, 5 or 10, got: " + parts[2]);
}

namespace {

const CellReport& resolve_cell(const RunReport& report, const CompareRequest& req,
                               const std::string& which) {
  std::string model = req.model;
  if (model.empty()) {
    if (report.models.size() != 1) {
      raise(ErrorKind::ConfigError,
            which + " holds several models; pass --model to pick one");
    }
    model = report.models[0];
  }
  int shots = 0;
  if (req.few_shot) {
    shots = -1;
    for (int s : report.shots_list) {
      if (s > 0) shots = s;
    }
    if (shots < 0) {
      raise(ErrorKind::UnknownCell, which + " has no few-shot cells");
    }
  }
  const CellReport* cell = find_cell(report, model, req.style, shots, req.top_k);
  if (!cell) {
    raise(ErrorKind::UnknownCell,
          fmt::format("{} has no cell {} {} shots={} top{}", which, model,
                      prompt_style_name(req.style), shots, req.top_k));
  }
  return *cell;
}

}  // namespace

CompareResult run_compare(const CompareRequest& request) {
  if (request.metric != "f1" && request.metric != "mrr") {
    raise(ErrorKind::ConfigError, "metric must be f1 or mrr, got: " + request.metric);
  }
  const RunReport report_a = load_run_report(request.run_a);
  const RunReport report_b = load_run_report(request.run_b);
  const CellReport& cell_a = resolve_cell(report_a, request, request.run_a);
  const CellReport& cell_b = resolve_cell(report_b, request, request.run_b);

  const MetricSummary& ma = request.metric == "f1" ? cell_a.f1 : cell_a.mrr;
  const MetricSummary& mb = request.metric == "f1" ? cell_b.f1 : cell_b.mrr;

  CompareResult result;
  result.mean_a = ma.mean;
  result.mean_b = mb.mean;
  result.p_value = compare_runs(ma.fold_means, mb.fold_means);
  const std::string p_text = result.p_value < 1e-12
                                 ? "p < 1e-12"
                                 : fmt::format("p = {:.6g}", result.p_value);
  result.line = fmt::format("{} {} {} top{}: a={} b={} {}", request.metric,
                            prompt_style_name(request.style),
                            request.few_shot ? "few" : "zero", request.top_k,
                            format3(result.mean_a), format3(result.mean_b), p_text);
  return result;
}

}  // namespace medjargon
