#include "medjargon/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "medjargon/errors.hpp"

namespace medjargon {

const std::vector<std::string>& stopword_list() {
  static const std::vector<std::string> words = {
      "a", "an", "the", "of", "by", "with", "for", "to",
      "in", "on", "and", "or", "requiring", "related", "history"};
  return words;
}

const std::vector<std::string>& stem_suffix_list() {
  // Tried in this order; the first suffix that leaves a stem of >= 4
  // characters is stripped, and only that one.
  static const std::vector<std::string> suffixes = {"es", "s", "ic", "ical", "ia"};
  return suffixes;
}

namespace {

bool is_stopword(const std::string& token) {
  const auto& words = stopword_list();
  return std::find(words.begin(), words.end(), token) != words.end();
}

std::string stem(const std::string& token) {
  for (const auto& suffix : stem_suffix_list()) {
    if (token.size() >= suffix.size() + 4 &&
        token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return token.substr(0, token.size() - suffix.size());
    }
  }
  return token;
}

std::set<std::string> token_set(const NormalizedTerm& t) {
  return std::set<std::string>(t.tokens.begin(), t.tokens.end());
}

struct ParsedLine {
  int major = 0;
  std::optional<int> minor;
  std::string text;
};

// Grammar: ^\s*(\d+)\.\s+(.+)$  or  ^\s*(\d+)\.(\d+)\s+(.+)$ with trailing
// periods stripped from the text. Returns nothing for non-conforming lines.
std::optional<ParsedLine> parse_line(const std::string& line) {
  std::size_t i = 0;
  const std::size_t n = line.size();
  auto is_space = [&](std::size_t p) {
    return std::isspace(static_cast<unsigned char>(line[p])) != 0;
  };
  auto is_digit = [&](std::size_t p) {
    return std::isdigit(static_cast<unsigned char>(line[p])) != 0;
  };

  while (i < n && is_space(i)) ++i;
  std::size_t major_start = i;
  while (i < n && is_digit(i)) ++i;
  if (i == major_start || i - major_start > 9) return std::nullopt;
  int major = std::stoi(line.substr(major_start, i - major_start));
  if (i >= n || line[i] != '.') return std::nullopt;
  ++i;

  std::optional<int> minor;
  if (i < n && is_digit(i)) {
    std::size_t minor_start = i;
    while (i < n && is_digit(i)) ++i;
    if (i - minor_start > 9) return std::nullopt;
    minor = std::stoi(line.substr(minor_start, i - minor_start));
  }
  if (i >= n || !is_space(i)) return std::nullopt;
  while (i < n && is_space(i)) ++i;
  if (i >= n) return std::nullopt;

  std::string text = line.substr(i);
  while (!text.empty() &&
         (std::isspace(static_cast<unsigned char>(text.back())) || text.back() == '.')) {
    text.pop_back();
  }
  if (text.empty()) return std::nullopt;
  if (major < 1) return std::nullopt;  // declared ranks are 1-based

  return ParsedLine{major, minor, std::move(text)};
}

std::vector<std::string> sorted_tokens(const NormalizedTerm& t) {
  std::vector<std::string> s = t.tokens;
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

NormalizedTerm normalize(const std::string& text) {
  NormalizedTerm out;
  out.original = text;
  std::string token;
  auto flush = [&]() {
    if (!token.empty()) {
      if (!is_stopword(token)) out.tokens.push_back(stem(token));
      token.clear();
    }
  };
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();  // punctuation and whitespace both separate tokens
    }
  }
  flush();
  return out;
}

bool relaxed_match(const NormalizedTerm& a, const NormalizedTerm& b) {
  const std::set<std::string> sa = token_set(a);
  const std::set<std::string> sb = token_set(b);
  if (!sa.empty() && !sb.empty()) {
    if (std::includes(sb.begin(), sb.end(), sa.begin(), sa.end()) ||
        std::includes(sa.begin(), sa.end(), sb.begin(), sb.end())) {
      return true;
    }
  }
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - inter;
  if (uni == 0) return false;
  return 2 * inter >= uni;  // Jaccard >= 0.5 without division
}

Extraction parse_ranked_list(const std::string& text) {
  Extraction out;
  std::vector<std::vector<std::string>> seen_keys;  // non-empty normalized multisets
  std::vector<std::string> seen_raw_empty;          // raw text of stopword-only terms

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string line = nl == std::string::npos ? text.substr(start)
                                               : text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    start = nl == std::string::npos ? text.size() + 1 : nl + 1;

    const bool blank = line.find_first_not_of(" \t\v\f\r") == std::string::npos;
    if (blank) continue;  // blank separators are not worth a warning
    auto parsed = parse_line(line);
    if (!parsed) {
      out.warnings.push_back("skipped non-conforming line: " + line);
      continue;
    }

    NormalizedTerm norm = normalize(parsed->text);
    bool duplicate = false;
    if (!norm.tokens.empty()) {
      auto key = sorted_tokens(norm);
      duplicate = std::find(seen_keys.begin(), seen_keys.end(), key) != seen_keys.end();
      if (!duplicate) seen_keys.push_back(std::move(key));
    } else {
      // Terms that normalize to nothing can't be told apart by content;
      // dedup those on the raw text only.
      duplicate = std::find(seen_raw_empty.begin(), seen_raw_empty.end(), parsed->text) !=
                  seen_raw_empty.end();
      if (!duplicate) seen_raw_empty.push_back(parsed->text);
    }
    if (duplicate) {
      out.warnings.push_back("dropped duplicate term: " + parsed->text);
      continue;
    }

    ExtractedTerm term;
    term.text = std::move(parsed->text);
    term.major = parsed->major;
    term.minor = parsed->minor;
    term.position = static_cast<int>(out.terms.size()) + 1;
    out.terms.push_back(std::move(term));
  }

  if (out.terms.empty()) {
    raise(ErrorKind::ParseEmpty, "no ranked terms recovered from response");
  }
  return out;
}

Extraction truncate_top_k(const Extraction& e, int k) {
  Extraction out;
  out.note_id = e.note_id;
  out.warnings = e.warnings;
  for (const auto& t : e.terms) {
    if (t.major <= k) {
      ExtractedTerm kept = t;
      kept.position = static_cast<int>(out.terms.size()) + 1;
      out.terms.push_back(std::move(kept));
    }
  }
  return out;
}

std::vector<RankedEntry> truncate_top_k(const std::vector<RankedEntry>& terms, int k) {
  std::vector<RankedEntry> out;
  for (const auto& t : terms) {
    if (t.major <= k) out.push_back(t);
  }
  return out;
}

MatchAssignment assign_matches(const Extraction& extracted,
                               const std::vector<RankedEntry>& gold) {
  // Gold visit order: lowest major first, bare ranks before sub-ranks,
  // then annotation order.
  std::vector<std::size_t> gold_order(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) gold_order[i] = i;
  std::stable_sort(gold_order.begin(), gold_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (gold[a].major != gold[b].major) return gold[a].major < gold[b].major;
                     const bool a_has = gold[a].minor.has_value();
                     const bool b_has = gold[b].minor.has_value();
                     if (a_has != b_has) return !a_has;
                     if (a_has && *gold[a].minor != *gold[b].minor) {
                       return *gold[a].minor < *gold[b].minor;
                     }
                     return false;
                   });

  std::vector<NormalizedTerm> gold_norm;
  gold_norm.reserve(gold.size());
  for (const auto& g : gold) gold_norm.push_back(normalize(g.text));

  MatchAssignment out;
  std::vector<bool> gold_taken(gold.size(), false);
  for (const auto& term : extracted.terms) {
    NormalizedTerm norm = normalize(term.text);
    bool paired = false;
    for (std::size_t gi : gold_order) {
      if (gold_taken[gi]) continue;
      if (relaxed_match(norm, gold_norm[gi])) {
        gold_taken[gi] = true;
        out.pairs.push_back({term.position, static_cast<int>(gi)});
        paired = true;
        break;
      }
    }
    if (!paired) out.unmatched_extracted.push_back(term.position);
  }
  for (std::size_t gi = 0; gi < gold.size(); ++gi) {
    if (!gold_taken[gi]) out.unmatched_gold.push_back(static_cast<int>(gi));
  }
  return out;
}

std::string render_ranked_block(const std::vector<RankedEntry>& terms) {
  std::vector<std::size_t> order(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (terms[a].major != terms[b].major) return terms[a].major < terms[b].major;
    const bool a_has = terms[a].minor.has_value();
    const bool b_has = terms[b].minor.has_value();
    if (a_has != b_has) return !a_has;
    if (a_has && *terms[a].minor != *terms[b].minor) return *terms[a].minor < *terms[b].minor;
    return false;
  });

  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& t = terms[order[i]];
    if (i) out.push_back('\n');
    out += std::to_string(t.major);
    out.push_back('.');
    if (t.minor) out += std::to_string(*t.minor);
    out.push_back(' ');
    out += t.text;
  }
  return out;
}

}  // namespace medjargon
