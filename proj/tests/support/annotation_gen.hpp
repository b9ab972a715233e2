#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "medjargon/extraction.hpp"

namespace medjargon::testing {

/// Random ranked-term annotations with distinct normalized content, for
/// render/parse round-trips. Raw mt19937_64 draws keep it reproducible.
class AnnotationGen {
public:
  explicit AnnotationGen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t pick(std::uint64_t bound) { return rng_() % bound; }

  std::string word() {
    static const std::vector<std::string> vocab = {
        "angina",    "bypass",    "stent",     "murmur",   "edema",    "dyspnea",
        "fibrosis",  "nodule",    "lesion",    "embolism", "thrombus", "stenosis",
        "sepsis",    "dialysis",  "catheter",  "fracture", "delirium", "vertigo",
        "syncope",   "pallor",    "icterus",   "melena",   "ascites",  "pruritus",
        "myalgia",   "arthritis", "gastritis", "colitis",  "aneurysm", "ischemia"};
    return vocab[pick(vocab.size())];
  }

  /// 1 to 3 vocabulary words joined by spaces or hyphens.
  std::string term_text() {
    const int words = 1 + static_cast<int>(pick(3));
    std::string out;
    for (int i = 0; i < words; ++i) {
      if (i) out += pick(4) == 0 ? "-" : " ";
      out += word();
    }
    return out;
  }

  /// Entries with majors 1..n (each possibly repeated via sub-ranks), all
  /// normalizing to distinct token sets so parsing keeps every line.
  std::vector<RankedEntry> annotation(int max_entries) {
    std::vector<RankedEntry> entries;
    std::set<std::vector<std::string>> seen;
    const int majors = 1 + static_cast<int>(pick(static_cast<std::uint64_t>(max_entries)));
    for (int major = 1; major <= majors; ++major) {
      const int subs = static_cast<int>(pick(3));  // 0..2 sub-ranked extras
      for (int minor = 0; minor <= subs; ++minor) {
        for (int attempt = 0; attempt < 50; ++attempt) {
          std::string text = term_text();
          NormalizedTerm norm = normalize(text);
          std::vector<std::string> key = norm.tokens;
          std::sort(key.begin(), key.end());
          if (seen.insert(key).second) {
            RankedEntry e;
            e.text = std::move(text);
            e.major = major;
            if (minor > 0) e.minor = minor;
            entries.push_back(std::move(e));
            break;
          }
        }
      }
    }
    return entries;
  }

  /// Arbitrary bytes (newline-rich) for crash-safety fuzzing.
  std::string noise(std::size_t max_len) {
    const std::size_t len = pick(max_len + 1);
    std::string out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      const int roll = static_cast<int>(pick(10));
      if (roll == 0) {
        out.push_back('\n');
      } else if (roll == 1) {
        out.push_back(static_cast<char>('0' + pick(10)));
      } else if (roll == 2) {
        out.push_back('.');
      } else {
        out.push_back(static_cast<char>(pick(256)));
      }
    }
    return out;
  }

private:
  std::mt19937_64 rng_;
};

}  // namespace medjargon::testing
