#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medjargon {

enum class Category { Cancer, COPD, Diabetes, Hypertension, LiverFailure, HeartFailure };

inline constexpr std::array<Category, 6> kAllCategories = {
    Category::Cancer,       Category::COPD,         Category::Diabetes,
    Category::Hypertension, Category::LiverFailure, Category::HeartFailure};

const char* category_name(Category c) noexcept;
std::optional<Category> category_from_string(std::string_view s);

struct GoldTerm {
  std::string text;
  int major = 0;
  std::optional<int> minor;
};

struct GoldAnnotation {
  std::vector<GoldTerm> terms;
};

struct ClinicalNote {
  std::string id;
  Category category = Category::Cancer;
  std::string text;
  GoldAnnotation gold;
};

struct Corpus {
  std::vector<ClinicalNote> notes;

  const ClinicalNote* find(std::string_view id) const;
  std::map<Category, int> category_counts() const;
};

struct DischargeNote {
  std::string id;
  std::string text;
};

enum class ViolationKind { EmptyTermText, NonPositiveRank, RankGapAtTop, NoTerms };

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Empty iff every term has non-empty text and positive ranks, and the
/// smallest major rank is 1. Violations are data, not exceptions.
std::vector<Violation> validate_annotation(const GoldAnnotation& a);

/// Line-delimited records {id, category, text, terms:[{text, major, minor?}]}.
/// Hard invariant breaches are MalformedRecord; a rank gap at the top is only
/// a warning because source annotations may be fragments.
Corpus load_gold_corpus(const std::string& path,
                        std::vector<std::string>* warnings = nullptr);

/// Inverse of load_gold_corpus; load(serialize(c)) == c.
std::string serialize_gold_corpus(const Corpus& c);

std::vector<DischargeNote> load_discharge_pool(const std::string& path);

struct FoldSplit {
  int k = 0;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignment;  // note id -> fold in [0, k)

  std::vector<int> fold_sizes() const;
};

/// Stratified by category: within each category fold counts differ by at
/// most 1; remainders go to the currently smallest folds (ties to the lowest
/// fold index), so overall sizes stay balanced too.
FoldSplit make_folds(const Corpus& corpus, int k, std::uint64_t seed);

/// n distinct exemplar ids drawn outside the evaluation fold.
std::vector<std::string> select_fewshot(const Corpus& corpus, const FoldSplit& split,
                                        int eval_fold, int n, std::uint64_t seed);

/// n distinct notes, order shuffled deterministically by seed.
std::vector<DischargeNote> sample_pool(const std::vector<DischargeNote>& pool,
                                       std::size_t n, std::uint64_t seed);

}  // namespace medjargon
