#include "medjargon/prompting.hpp"

#include <algorithm>
#include <cctype>

#include "medjargon/errors.hpp"
#include "medjargon/extraction.hpp"
#include "medjargon/util.hpp"

namespace medjargon {

namespace {

// Sub-entry counts of the sample skeleton, per entry rank. The published
// top-10 variant stops at entry 6, so larger k keeps the same cap.
constexpr int kSkeletonSubCounts[6] = {2, 1, 2, 3, 1, 1};

bool is_skeleton_line(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  return i > 0 && i < line.size() && line[i] == '.';
}

std::vector<std::string> make_skeleton(PromptStyle style, int k) {
  const int entries = std::min(k, 6);
  std::vector<std::string> lines;
  for (int i = 1; i <= entries; ++i) {
    if (style == PromptStyle::General) {
      lines.push_back(std::to_string(i) + ". key term");
      lines.push_back(std::to_string(i) + ". key term");
    } else {
      lines.push_back(std::to_string(i) + ". key symptom or condition");
      for (int j = 1; j <= kSkeletonSubCounts[i - 1]; ++j) {
        lines.push_back(std::to_string(i) + "." + std::to_string(j) +
                        " medical test related to " + std::to_string(i));
      }
    }
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out.push_back('\n');
  }
  return out;
}

std::string rtrim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

}  // namespace

const char* prompt_style_name(PromptStyle s) noexcept {
  return s == PromptStyle::General ? "general" : "structured";
}

TemplateStore TemplateStore::load(const std::string& dir) {
  TemplateStore store;
  store.general_ = read_file(dir + "/general.txt");
  store.structured_ = read_file(dir + "/structured.txt");
  return store;
}

const TemplateStore& TemplateStore::builtin() {
  static const TemplateStore store = load(std::string(MEDJARGON_DATA_DIR) + "/templates");
  return store;
}

const std::string& TemplateStore::base_text(PromptStyle style) const {
  return style == PromptStyle::General ? general_ : structured_;
}

RenderedPrompt render_prompt(const TemplateStore& store, const PromptSpec& spec,
                             const std::string& note_text,
                             const std::vector<ExemplarInput>& exemplars) {
  if (spec.top_k != 3 && spec.top_k != 5 && spec.top_k != 10) {
    raise(ErrorKind::BadTopK, "top_k must be 3, 5 or 10, got " + std::to_string(spec.top_k));
  }
  if (static_cast<int>(exemplars.size()) != spec.shots) {
    raise(ErrorKind::ExemplarCountMismatch,
          "spec wants " + std::to_string(spec.shots) + " exemplars, got " +
              std::to_string(exemplars.size()));
  }

  std::vector<std::string> lines = split_lines(store.base_text(spec.style));

  // "top 3" -> "top {k}" in the extraction sentence.
  for (auto& line : lines) {
    std::size_t pos = line.find("top 3");
    if (pos != std::string::npos) {
      line.replace(pos, 5, "top " + std::to_string(spec.top_k));
      break;
    }
  }

  // Swap the sample skeleton (the single contiguous run of "N." lines) for
  // the k-entry variant.
  std::size_t skel_begin = lines.size();
  std::size_t skel_end = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_skeleton_line(lines[i])) {
      skel_begin = i;
      skel_end = i;
      while (skel_end < lines.size() && is_skeleton_line(lines[skel_end])) ++skel_end;
      break;
    }
  }
  if (skel_begin == lines.size()) {
    raise(ErrorKind::ConfigError, "template has no format skeleton");
  }
  const std::vector<std::string> skeleton = make_skeleton(spec.style, spec.top_k);
  lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(skel_begin),
              lines.begin() + static_cast<std::ptrdiff_t>(skel_end));
  lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(skel_begin),
               skeleton.begin(), skeleton.end());

  const auto ctx_it = std::find(lines.begin(), lines.end(), "### Context:");
  if (ctx_it == lines.end()) {
    raise(ErrorKind::ConfigError, "template has no context section");
  }
  const std::size_t ctx_idx = static_cast<std::size_t>(ctx_it - lines.begin());

  RenderedPrompt out;
  out.instruction_text = rtrim(join_lines(
      std::vector<std::string>(lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(ctx_idx))));
  out.context_text = note_text;

  std::vector<std::string> assembled(lines.begin(),
                                     lines.begin() + static_cast<std::ptrdiff_t>(ctx_idx));
  for (const auto& ex : exemplars) {
    std::vector<std::string> block;
    block.push_back("### Example Context:");
    block.push_back("");
    for (auto& l : split_lines(ex.note_text)) block.push_back(l);
    block.push_back("");
    block.push_back("### Example Response:");
    block.push_back("");
    for (auto& l : split_lines(render_gold_block(ex.gold))) block.push_back(l);
    block.push_back("");
    out.exemplar_blocks.push_back(rtrim(join_lines(block)));
    assembled.insert(assembled.end(), block.begin(), block.end());
  }
  assembled.insert(assembled.end(), lines.begin() + static_cast<std::ptrdiff_t>(ctx_idx),
                   lines.end());

  std::string full = join_lines(assembled);
  const std::size_t slot = full.find("{context}");
  if (slot == std::string::npos) {
    raise(ErrorKind::ConfigError, "template has no {context} slot");
  }
  full.replace(slot, 9, note_text);
  out.full_text = std::move(full);
  return out;
}

std::string render_gold_block(const GoldAnnotation& a) {
  std::vector<RankedEntry> entries;
  entries.reserve(a.terms.size());
  for (const auto& t : a.terms) entries.push_back({t.text, t.major, t.minor});
  return render_ranked_block(entries);
}

RenderedPrompt render_augmentation_prompt(const TemplateStore& store,
                                          const std::vector<ExemplarInput>& exemplars,
                                          const DischargeNote& note) {
  if (exemplars.size() != 2) {
    raise(ErrorKind::ExemplarCountMismatch,
          "augmentation teacher prompt takes exactly 2 exemplars, got " +
              std::to_string(exemplars.size()));
  }
  PromptSpec spec{PromptStyle::Structured, 2, 10};
  return render_prompt(store, spec, note.text, exemplars);
}

}  // namespace medjargon
