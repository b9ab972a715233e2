#pragma once

#include <string>
#include <vector>

#include "medjargon/corpus.hpp"

namespace medjargon {

enum class PromptStyle { General, Structured };

const char* prompt_style_name(PromptStyle s) noexcept;

/// shots == 0 is zero-shot; shots >= 1 means that many in-context exemplars.
struct PromptSpec {
  PromptStyle style = PromptStyle::General;
  int shots = 0;
  int top_k = 3;  // must be one of {3, 5, 10}
};

struct ExemplarInput {
  std::string note_text;
  GoldAnnotation gold;
};

struct RenderedPrompt {
  std::string instruction_text;               // header through format skeleton
  std::vector<std::string> exemplar_blocks;   // one block per exemplar
  std::string context_text;                   // the note body
  std::string full_text;
};

/// Loads the two base templates (k=3 form, `{context}` slot) from a
/// directory holding general.txt and structured.txt.
class TemplateStore {
public:
  static TemplateStore load(const std::string& dir);
  /// Templates shipped with the source tree.
  static const TemplateStore& builtin();

  const std::string& base_text(PromptStyle style) const;

private:
  std::string general_;
  std::string structured_;
};

/// Instruction text follows the base template with the top-k number
/// substituted and the format skeleton extended or shortened to k entries
/// (capped at the 6-entry sample shape). Exemplars render as
/// `### Example Context:` / `### Example Response:` paired sections placed
/// before the final context section.
RenderedPrompt render_prompt(const TemplateStore& store, const PromptSpec& spec,
                             const std::string& note_text,
                             const std::vector<ExemplarInput>& exemplars);

/// `{major}. {text}` / `{major}.{minor} {text}` lines in rank order.
std::string render_gold_block(const GoldAnnotation& a);

/// Teacher prompt for augmentation: structured style, top 10, exactly two
/// exemplars, discharge note as context.
RenderedPrompt render_augmentation_prompt(const TemplateStore& store,
                                          const std::vector<ExemplarInput>& exemplars,
                                          const DischargeNote& note);

}  // namespace medjargon
