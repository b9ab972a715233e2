#include "medjargon/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "medjargon/errors.hpp"
#include "medjargon/util.hpp"

namespace medjargon {

namespace {

double ratio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

/// Exact mean over zeros and 1/rank values. Falls back to double accumulation if
/// the reduced rational would leave 64 bits (huge rank sets only).
class ReciprocalMean {
public:
  void add(int rank) {
    ++count_;
    if (rank <= 0) return;  // no match: contributes 0
    approx_ += 1.0 / static_cast<double>(rank);
    if (!exact_) return;
    __int128 num = static_cast<__int128>(num_) * rank + den_;
    __int128 den = static_cast<__int128>(den_) * rank;
    __int128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num > kLimit || den > kLimit) {
      exact_ = false;
      return;
    }
    num_ = static_cast<long long>(num);
    den_ = static_cast<long long>(den);
  }

  double value() const {
    if (count_ == 0) return 0.0;
    if (exact_) {
      // Single correctly-rounded division of exact integers.
      __int128 den = static_cast<__int128>(den_) * static_cast<long long>(count_);
      __int128 g = gcd128(num_, den);
      if (g > 1 && num_ % g == 0) {
        long long rn = static_cast<long long>(num_ / g);
        long long rd = static_cast<long long>(den / g);
        if (rd <= kLimit) return ratio(rn, rd);
      }
      if (den <= kLimit) return ratio(num_, static_cast<long long>(den));
    }
    return approx_ / static_cast<double>(count_);
  }

private:
  static constexpr long long kLimit = 1LL << 53;  // exact double range

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  bool exact_ = true;
  long long num_ = 0;
  long long den_ = 1;
  double approx_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace

ConfusionCounts confusion(const MatchAssignment& assign) {
  ConfusionCounts c;
  c.tp = static_cast<int>(assign.pairs.size());
  c.fp = static_cast<int>(assign.unmatched_extracted.size());
  c.fn = static_cast<int>(assign.unmatched_gold.size());
  return c;
}

double precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }

double recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }

double f1(double p, double r) {
  const double denom = p + r;
  return denom == 0.0 ? 0.0 : 2.0 * p * r / denom;
}

double reciprocal_rank(const MatchAssignment& assign) {
  int first = 0;
  for (const auto& pair : assign.pairs) {
    if (first == 0 || pair.extracted_position < first) first = pair.extracted_position;
  }
  return first == 0 ? 0.0 : 1.0 / static_cast<double>(first);
}

NoteScore score_note(const std::string& note_id, const MatchAssignment& assign) {
  NoteScore s;
  s.note_id = note_id;
  s.counts = confusion(assign);
  s.precision = precision(s.counts);
  s.recall = recall(s.counts);
  s.f1 = ratio(2LL * s.counts.tp, 2LL * s.counts.tp + s.counts.fp + s.counts.fn);
  int first = 0;
  for (const auto& pair : assign.pairs) {
    if (first == 0 || pair.extracted_position < first) first = pair.extracted_position;
  }
  s.first_match_position = first;
  s.reciprocal_rank = first == 0 ? 0.0 : 1.0 / static_cast<double>(first);
  return s;
}

double mrr(const std::vector<NoteScore>& scores) {
  if (scores.empty()) raise(ErrorKind::EmptySet, "mrr over zero notes");
  ReciprocalMean mean;
  for (const auto& s : scores) mean.add(s.first_match_position);
  return mean.value();
}

Aggregate aggregate_folds(const std::vector<double>& fold_means) {
  if (fold_means.size() < 2) {
    raise(ErrorKind::TooFewFolds,
          "need at least 2 fold means, got " + std::to_string(fold_means.size()));
  }
  const double n = static_cast<double>(fold_means.size());
  double sum = 0.0;
  for (double v : fold_means) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : fold_means) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

double compare_runs(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    raise(ErrorKind::FoldMismatch, "fold vectors must align and hold >= 2 folds (got " +
                                       std::to_string(a.size()) + " vs " +
                                       std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  double sum = 0.0;
  for (double d : diff) sum += d;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));

  if (sd == 0.0) {
    return mean == 0.0 ? 1.0 : 0.0;  // identical runs, or constant shift
  }
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(static_cast<double>(n) - 1.0);
  return 2.0 * boost::math::cdf(dist, -std::fabs(t));
}

CellReport summarize_cell(const std::string& model, PromptStyle style, int shots,
                          int top_k, const std::vector<std::vector<NoteScore>>& per_fold) {
  CellReport cell;
  cell.model = model;
  cell.style = style;
  cell.shots = shots;
  cell.top_k = top_k;

  auto fold_mean = [](const std::vector<NoteScore>& notes, double NoteScore::*field) {
    if (notes.empty()) raise(ErrorKind::EmptySet, "fold with zero notes");
    double sum = 0.0;
    for (const auto& s : notes) sum += s.*field;
    return sum / static_cast<double>(notes.size());
  };

  for (const auto& fold : per_fold) {
    cell.precision.fold_means.push_back(fold_mean(fold, &NoteScore::precision));
    cell.recall.fold_means.push_back(fold_mean(fold, &NoteScore::recall));
    cell.f1.fold_means.push_back(fold_mean(fold, &NoteScore::f1));
    cell.mrr.fold_means.push_back(mrr(fold));
  }
  for (MetricSummary* m : {&cell.precision, &cell.recall, &cell.f1, &cell.mrr}) {
    const Aggregate agg = aggregate_folds(m->fold_means);
    m->mean = agg.mean;
    m->ci_halfwidth = agg.ci_halfwidth;
  }
  return cell;
}

const CellReport* find_cell(const RunReport& report, const std::string& model,
                            PromptStyle style, int shots, int top_k) {
  for (const auto& c : report.cells) {
    if (c.model == model && c.style == style && c.shots == shots && c.top_k == top_k) {
      return &c;
    }
  }
  return nullptr;
}

namespace {

std::string shots_label(int shots) { return shots == 0 ? "Zero-Shot" : "Few-Shot"; }

std::string markdown_table(const RunReport& report, bool with_ci) {
  std::string out = "| Model | Prompt |";
  for (int shots : report.shots_list) {
    for (int k : report.ks) {
      out += fmt::format(" {} top{} F1 | {} top{} MRR |", shots_label(shots), k,
                         shots_label(shots), k);
    }
  }
  out += "\n|---|---|";
  for (std::size_t i = 0; i < report.shots_list.size() * report.ks.size() * 2; ++i) {
    out += "---|";
  }
  out += "\n";

  for (const auto& model : report.models) {
    for (PromptStyle style : report.styles) {
      out += fmt::format("| {} | {} |", model, prompt_style_name(style));
      for (int shots : report.shots_list) {
        for (int k : report.ks) {
          const CellReport* cell = find_cell(report, model, style, shots, k);
          if (!cell) {
            raise(ErrorKind::IncompleteGrid,
                  fmt::format("missing cell {} {} shots={} k={}", model,
                              prompt_style_name(style), shots, k));
          }
          if (with_ci) {
            out += fmt::format(" {} ± {} | {} ± {} |", format3(cell->f1.mean),
                               format3(cell->f1.ci_halfwidth), format3(cell->mrr.mean),
                               format3(cell->mrr.ci_halfwidth));
          } else {
            out += fmt::format(" {} | {} |", format3(cell->f1.mean),
                               format3(cell->mrr.mean));
          }
        }
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace

std::string render_report_table(const RunReport& report, TableFormat format) {
  if (report.cells.empty() || report.models.empty() || report.styles.empty() ||
      report.shots_list.empty() || report.ks.empty()) {
    raise(ErrorKind::IncompleteGrid, "report grid is empty");
  }

  if (format == TableFormat::Csv) {
    std::string out = "model,prompt,shots,top_k,f1,f1_ci,mrr,mrr_ci\n";
    for (const auto& model : report.models) {
      for (PromptStyle style : report.styles) {
        for (int shots : report.shots_list) {
          for (int k : report.ks) {
            const CellReport* cell = find_cell(report, model, style, shots, k);
            if (!cell) {
              raise(ErrorKind::IncompleteGrid,
                    fmt::format("missing cell {} {} shots={} k={}", model,
                                prompt_style_name(style), shots, k));
            }
            out += fmt::format("{},{},{},{},{},{},{},{}\n", model,
                               prompt_style_name(style), shots == 0 ? "zero" : "few", k,
                               format3(cell->f1.mean), format3(cell->f1.ci_halfwidth),
                               format3(cell->mrr.mean), format3(cell->mrr.ci_halfwidth));
          }
        }
      }
    }
    return out;
  }

  std::string out = "# Extraction quality\n\n";
  out += markdown_table(report, false);
  out += "\n## With 95% confidence intervals\n\n";
  out += markdown_table(report, true);
  return out;
}

}  // namespace medjargon
