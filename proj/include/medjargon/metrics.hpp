#pragma once

#include <string>
#include <vector>

#include "medjargon/extraction.hpp"
#include "medjargon/prompting.hpp"

namespace medjargon {

struct ConfusionCounts {
  int tp = 0;  // matched pairs
  int fp = 0;  // unmatched extracted
  int fn = 0;  // unmatched gold
};

struct NoteScore {
  std::string note_id;
  ConfusionCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double reciprocal_rank = 0.0;
  // 1-based position behind reciprocal_rank, 0 when nothing matched; kept so
  // MRR can be accumulated in exact rational arithmetic.
  int first_match_position = 0;
};

ConfusionCounts confusion(const MatchAssignment& assign);

/// Zero-denominator cases are defined as 0.
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1(double p, double r);

double reciprocal_rank(const MatchAssignment& assign);

/// P, R and F1 are each computed as a single correctly-rounded division of
/// integer counts (F1 as 2tp/(2tp+fp+fn)), so results are bit-stable and
/// oracle-comparable; the two-step 2PR/(P+R) form can be off by an ulp.
NoteScore score_note(const std::string& note_id, const MatchAssignment& assign);

/// Mean of reciprocal ranks. Accumulated as an exact rational over the
/// stored match positions, falling back to plain double summation only if
/// the rational state would overflow 64 bits.
double mrr(const std::vector<NoteScore>& scores);

struct Aggregate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 * sample stddev / sqrt(n)
};

Aggregate aggregate_folds(const std::vector<double>& fold_means);

/// Two-sided paired t-test over fold-level differences. Identical vectors
/// give p = 1; zero-variance nonzero differences give p = 0 (reported as
/// < 1e-12 by callers).
double compare_runs(const std::vector<double>& a, const std::vector<double>& b);

struct MetricSummary {
  std::vector<double> fold_means;
  double mean = 0.0;
  double ci_halfwidth = 0.0;
};

struct CellReport {
  std::string model;
  PromptStyle style = PromptStyle::General;
  int shots = 0;
  int top_k = 3;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
  MetricSummary mrr;
};

struct RunReport {
  std::vector<std::string> models;  // row order
  std::vector<PromptStyle> styles;  // row order within a model
  std::vector<int> shots_list;      // column group order
  std::vector<int> ks;              // column order within a group
  std::vector<CellReport> cells;
  std::string manifest_ref;  // path or digest of the run manifest
};

CellReport summarize_cell(const std::string& model, PromptStyle style, int shots,
                          int top_k, const std::vector<std::vector<NoteScore>>& per_fold);

enum class TableFormat { Markdown, Csv };

/// Markdown holds two tables: plain 3-decimal cells ("0.433") and an
/// appendix-style variant with CI halfwidths ("0.433 ± 0.007"). CSV is one
/// row per cell with ci columns. Raises IncompleteGrid when any requested
/// (model, style, shots, k) cell is missing.
std::string render_report_table(const RunReport& report, TableFormat format);

const CellReport* find_cell(const RunReport& report, const std::string& model,
                            PromptStyle style, int shots, int top_k);

}  // namespace medjargon
