#include "medjargon/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>

#include "medjargon/errors.hpp"
#include "medjargon/util.hpp"

namespace medjargon {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& path, std::size_t line_no,
                            const std::string& why) {
  raise(ErrorKind::MalformedRecord, path + ":" + std::to_string(line_no) + ": " + why);
}

}  // namespace

const char* category_name(Category c) noexcept {
  switch (c) {
    case Category::Cancer: return "Cancer";
    case Category::COPD: return "COPD";
    case Category::Diabetes: return "Diabetes";
    case Category::Hypertension: return "Hypertension";
    case Category::LiverFailure: return "LiverFailure";
    case Category::HeartFailure: return "HeartFailure";
  }
  return "Cancer";
}

std::optional<Category> category_from_string(std::string_view s) {
  for (Category c : kAllCategories) {
    if (s == category_name(c)) return c;
  }
  return std::nullopt;
}

const ClinicalNote* Corpus::find(std::string_view id) const {
  for (const auto& n : notes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::map<Category, int> Corpus::category_counts() const {
  std::map<Category, int> counts;
  for (const auto& n : notes) counts[n.category]++;
  return counts;
}

std::vector<Violation> validate_annotation(const GoldAnnotation& a) {
  std::vector<Violation> out;
  if (a.terms.empty()) {
    out.push_back({ViolationKind::NoTerms, "annotation has no terms"});
    return out;
  }
  int min_major = 0;
  bool ranks_ok = true;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    const auto& t = a.terms[i];
    if (trim(t.text).empty()) {
      out.push_back({ViolationKind::EmptyTermText,
                     "term " + std::to_string(i) + " has empty text"});
    }
    if (t.major < 1 || (t.minor && *t.minor < 1)) {
      out.push_back({ViolationKind::NonPositiveRank,
                     "term " + std::to_string(i) + " has non-positive rank"});
      ranks_ok = false;
    }
    if (min_major == 0 || t.major < min_major) min_major = t.major;
  }
  // Interior rank gaps are tolerated (annotations may be fragments); only a
  // missing rank-1 entry is worth flagging, and only when ranks are sane.
  if (ranks_ok && min_major > 1) {
    out.push_back({ViolationKind::RankGapAtTop,
                   "lowest major rank is " + std::to_string(min_major) + ", not 1"});
  }
  return out;
}

Corpus load_gold_corpus(const std::string& path, std::vector<std::string>* warnings) {
  const std::string body = read_file(path);
  const std::vector<std::string> lines = split_lines(body);

  Corpus corpus;
  std::set<std::string> seen_ids;
  std::size_t records = 0;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    ++records;

    ordered_json j;
    try {
      j = ordered_json::parse(lines[i]);
    } catch (const std::exception& e) {
      malformed(path, line_no, std::string("invalid json: ") + e.what());
    }
    if (!j.is_object()) malformed(path, line_no, "record is not an object");

    ClinicalNote note;
    if (!j.contains("id") || !j["id"].is_string()) malformed(path, line_no, "missing id");
    note.id = j["id"].get<std::string>();
    if (note.id.empty()) malformed(path, line_no, "empty id");
    if (!seen_ids.insert(note.id).second) {
      raise(ErrorKind::DuplicateNoteId, path + ":" + std::to_string(line_no) +
                                            ": duplicate note id " + note.id);
    }

    if (!j.contains("category") || !j["category"].is_string()) {
      malformed(path, line_no, "missing category");
    }
    auto cat = category_from_string(j["category"].get<std::string>());
    if (!cat) malformed(path, line_no, "unknown category " + j["category"].dump());
    note.category = *cat;

    if (!j.contains("text") || !j["text"].is_string()) malformed(path, line_no, "missing text");
    note.text = j["text"].get<std::string>();
    if (trim(note.text).empty()) malformed(path, line_no, "empty note text");

    if (!j.contains("terms") || !j["terms"].is_array()) malformed(path, line_no, "missing terms");
    for (const auto& tj : j["terms"]) {
      if (!tj.is_object() || !tj.contains("text") || !tj["text"].is_string() ||
          !tj.contains("major") || !tj["major"].is_number_integer()) {
        malformed(path, line_no, "bad term record");
      }
      GoldTerm term;
      term.text = tj["text"].get<std::string>();
      term.major = tj["major"].get<int>();
      if (tj.contains("minor")) {
        if (!tj["minor"].is_number_integer()) malformed(path, line_no, "bad minor rank");
        term.minor = tj["minor"].get<int>();
      }
      note.gold.terms.push_back(std::move(term));
    }

    for (const auto& v : validate_annotation(note.gold)) {
      if (v.kind == ViolationKind::RankGapAtTop) {
        if (warnings) {
          warnings->push_back(path + ":" + std::to_string(line_no) + ": " + v.message);
        }
      } else {
        malformed(path, line_no, v.message);
      }
    }

    corpus.notes.push_back(std::move(note));
  }

  if (records == 0) raise(ErrorKind::MalformedRecord, path + ": no records");
  return corpus;
}

std::string serialize_gold_corpus(const Corpus& c) {
  std::string out;
  for (const auto& n : c.notes) {
    ordered_json j;
    j["id"] = n.id;
    j["category"] = category_name(n.category);
    j["text"] = n.text;
    j["terms"] = ordered_json::array();
    for (const auto& t : n.gold.terms) {
      ordered_json tj;
      tj["text"] = t.text;
      tj["major"] = t.major;
      if (t.minor) tj["minor"] = *t.minor;
      j["terms"].push_back(std::move(tj));
    }
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<DischargeNote> load_discharge_pool(const std::string& path) {
  const std::string body = read_file(path);
  const std::vector<std::string> lines = split_lines(body);

  std::vector<DischargeNote> pool;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(lines[i]);
    } catch (const std::exception& e) {
      malformed(path, line_no, std::string("invalid json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("text") || !j["text"].is_string()) {
      malformed(path, line_no, "pool record needs string id and text");
    }
    DischargeNote note{j["id"].get<std::string>(), j["text"].get<std::string>()};
    if (note.id.empty()) malformed(path, line_no, "empty id");
    if (trim(note.text).empty()) malformed(path, line_no, "empty note text");
    if (!seen_ids.insert(note.id).second) {
      raise(ErrorKind::DuplicateNoteId, path + ":" + std::to_string(line_no) +
                                            ": duplicate note id " + note.id);
    }
    pool.push_back(std::move(note));
  }
  if (pool.empty()) raise(ErrorKind::MalformedRecord, path + ": no records");
  return pool;
}

std::vector<int> FoldSplit::fold_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (const auto& [id, fold] : assignment) sizes[static_cast<std::size_t>(fold)]++;
  return sizes;
}

FoldSplit make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > corpus.notes.size()) {
    raise(ErrorKind::BadFoldCount,
          "fold count " + std::to_string(k) + " invalid for corpus of " +
              std::to_string(corpus.notes.size()) + " notes");
  }

  FoldSplit split;
  split.k = k;
  split.seed = seed;

  DeterministicRng rng(seed);
  std::vector<int> totals(static_cast<std::size_t>(k), 0);

  for (Category cat : kAllCategories) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.notes.size(); ++i) {
      if (corpus.notes[i].category == cat) members.push_back(i);
    }
    if (members.empty()) continue;
    rng.shuffle(members);

    const int base = static_cast<int>(members.size()) / k;
    const int rem = static_cast<int>(members.size()) % k;

    // Folds with the smallest running totals absorb the remainder so the
    // overall sizes stay within 1 of each other, not just per category.
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return totals[static_cast<std::size_t>(a)] < totals[static_cast<std::size_t>(b)];
    });

    std::vector<int> counts(static_cast<std::size_t>(k), base);
    for (int r = 0; r < rem; ++r) counts[static_cast<std::size_t>(order[r])]++;

    std::size_t cursor = 0;
    for (int f = 0; f < k; ++f) {
      for (int c = 0; c < counts[static_cast<std::size_t>(f)]; ++c) {
        split.assignment[corpus.notes[members[cursor++]].id] = f;
      }
      totals[static_cast<std::size_t>(f)] += counts[static_cast<std::size_t>(f)];
    }
  }
  return split;
}

std::vector<std::string> select_fewshot(const Corpus& corpus, const FoldSplit& split,
                                        int eval_fold, int n, std::uint64_t seed) {
  if (eval_fold < 0 || eval_fold >= split.k) {
    raise(ErrorKind::ConfigError, "eval fold " + std::to_string(eval_fold) +
                                      " outside [0, " + std::to_string(split.k) + ")");
  }
  std::vector<std::string> pool;
  for (const auto& note : corpus.notes) {
    auto it = split.assignment.find(note.id);
    if (it != split.assignment.end() && it->second != eval_fold) {
      pool.push_back(note.id);
    }
  }
  if (n < 1 || static_cast<std::size_t>(n) > pool.size()) {
    raise(ErrorKind::InsufficientPool,
          "need " + std::to_string(n) + " exemplars, " + std::to_string(pool.size()) +
              " notes outside fold " + std::to_string(eval_fold));
  }

  DeterministicRng rng(mix_seed(seed, static_cast<std::uint64_t>(eval_fold)));
  std::vector<std::string> out;
  for (std::size_t idx : rng.sample_indices(pool.size(), static_cast<std::size_t>(n))) {
    out.push_back(pool[idx]);
  }
  return out;
}

std::vector<DischargeNote> sample_pool(const std::vector<DischargeNote>& pool,
                                       std::size_t n, std::uint64_t seed) {
  if (n > pool.size()) {
    raise(ErrorKind::PoolTooSmall, "asked for " + std::to_string(n) + " of " +
                                       std::to_string(pool.size()) + " pool notes");
  }
  DeterministicRng rng(seed);
  std::vector<DischargeNote> out;
  out.reserve(n);
  for (std::size_t idx : rng.sample_indices(pool.size(), n)) {
    out.push_back(pool[idx]);
  }
  return out;
}

}  // namespace medjargon
