#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace curriculum {

struct ErrorRateResult {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_length = 0;
  // (S+I+D)/reference_length; +infinity for an empty reference with a
  // non-empty hypothesis, 0 when both are empty. May exceed 1.
  double rate = 0.0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
};

// Unit-cost Levenshtein alignment over arbitrary tokens. Among minimal
// alignments the backtrace prefers substitution, then insertion, then
// deletion.
template <typename Token>
ErrorRateResult align_tokens(const std::vector<Token>& reference,
                             const std::vector<Token>& hypothesis);

// Whitespace-run tokenization, no normalization.
std::vector<std::string> split_words(std::string_view text);
// UTF-8 to Unicode scalar values. Throws ParseError on malformed input.
std::u32string decode_utf8(std::string_view text);

ErrorRateResult wer(std::string_view reference, std::string_view hypothesis);
ErrorRateResult cer(std::string_view reference, std::string_view hypothesis);

ErrorRateResult wer(const std::vector<std::string>& reference,
                    const std::vector<std::string>& hypothesis);
ErrorRateResult cer(const std::u32string& reference,
                    const std::u32string& hypothesis);

// Sums the counts of several results and recomputes the rate.
ErrorRateResult aggregate(const std::vector<ErrorRateResult>& results);

}  // namespace curriculum
