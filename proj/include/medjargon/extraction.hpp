#pragma once

#include <optional>
#include <string>
#include <vector>

namespace medjargon {

struct ExtractedTerm {
  std::string text;          // raw surface string, trailing period stripped
  int major = 0;             // declared rank, >= 1
  std::optional<int> minor;  // sub-rank, e.g. the 1 in "2.1"
  int position = 0;          // 1-based document-order index among kept terms
};

struct Extraction {
  std::string note_id;
  std::vector<ExtractedTerm> terms;     // document order, positions 1..n
  std::vector<std::string> warnings;    // skipped lines, dropped duplicates
};

/// Lowercased, punctuation-stripped, stopword-filtered, lightly stemmed
/// token list. tokens is the full multiset in original order; matching uses
/// set semantics, duplicate detection uses multiset equality.
struct NormalizedTerm {
  std::vector<std::string> tokens;
  std::string original;

  bool empty() const { return tokens.empty(); }
};

struct MatchPair {
  int extracted_position = 0;  // 1-based position in the truncated extraction
  int gold_index = 0;          // 0-based index into the truncated gold terms
};

struct MatchAssignment {
  std::vector<MatchPair> pairs;          // one-to-one
  std::vector<int> unmatched_extracted;  // positions
  std::vector<int> unmatched_gold;       // indices
};

/// Ranked line used by both gold rendering and training-set emission.
struct RankedEntry {
  std::string text;
  int major = 0;
  std::optional<int> minor;
};

/// Parses "N. text" / "N.M text" lines into terms; non-conforming lines and
/// normalized duplicates go to warnings. Raises ParseEmpty when nothing
/// conforming survives.
Extraction parse_ranked_list(const std::string& text);

NormalizedTerm normalize(const std::string& text);

/// Token-set containment in either direction (both sides non-empty), or
/// Jaccard similarity >= 0.5.
bool relaxed_match(const NormalizedTerm& a, const NormalizedTerm& b);

/// Keeps terms whose major rank <= k; sub-ranked items travel with their
/// parent rank. Extraction positions are reassigned contiguously so document
/// order over the kept terms is still 1..m.
Extraction truncate_top_k(const Extraction& e, int k);
std::vector<RankedEntry> truncate_top_k(const std::vector<RankedEntry>& terms, int k);

/// Greedy one-to-one pairing: extracted terms in position order, each taking
/// the first still-unmatched gold term (lowest major, bare rank before
/// sub-ranks, then annotation order) it relaxed-matches.
MatchAssignment assign_matches(const Extraction& extracted,
                               const std::vector<RankedEntry>& gold);

/// "{major}. {text}" / "{major}.{minor} {text}" lines, sorted by
/// (major, minor-absent-first, minor), ties in input order.
std::string render_ranked_block(const std::vector<RankedEntry>& terms);

/// Canonical normalization data; also shipped under data/ as plain-text
/// files, which the suite checks against these values.
const std::vector<std::string>& stopword_list();
const std::vector<std::string>& stem_suffix_list();

}  // namespace medjargon
