#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace medjargon {

/// Portable deterministic randomness. Raw mt19937_64 draws are pinned by the
/// standard; the bounded draw and shuffle are hand-rolled here because
/// std::uniform_int_distribution and std::shuffle are implementation-defined
/// and would break cross-toolchain reproducibility of fold splits.
class DeterministicRng {
public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Unbiased integer in [0, bound) via rejection sampling. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates, consuming one bounded draw per step from the back.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// n distinct indices drawn from [0, pool) by partial Fisher-Yates;
  /// order of the result is part of the deterministic contract.
  std::vector<std::size_t> sample_indices(std::size_t pool, std::size_t n);

private:
  std::mt19937_64 engine_;
};

/// splitmix64-style combiner for deriving per-stream seeds (e.g. per fold)
/// from one named seed without correlating the streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

std::string sha256_hex(std::string_view bytes);

std::string trim(std::string_view s);
std::string lowercase(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

std::vector<std::string> split_lines(std::string_view text);

/// Whole-file read; raises MissingFile / IoFailure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);
bool file_exists(const std::string& path);
void ensure_parent_dir(const std::string& path);

std::string iso8601_utc_now();

/// "0.433" style fixed 3-decimal rendering used in report tables.
std::string format3(double v);

}  // namespace medjargon
