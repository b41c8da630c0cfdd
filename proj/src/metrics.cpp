#include "curriculum/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "curriculum/error.hpp"

namespace curriculum {

template <typename Token>
ErrorRateResult align_tokens(const std::vector<Token>& reference,
                             const std::vector<Token>& hypothesis) {
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  // dist[i][j]: edit distance between reference[0..i) and hypothesis[0..j).
  std::vector<std::size_t> dist((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return dist[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  ErrorRateResult r;
  r.reference_length = n;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++r.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++r.insertions;
      --j;
    } else {
      ++r.deletions;
      --i;
    }
  }

  if (n > 0) {
    r.rate = static_cast<double>(r.errors()) / static_cast<double>(n);
  } else {
    r.rate = m == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

template ErrorRateResult align_tokens(const std::vector<std::string>&,
                                      const std::vector<std::string>&);
template ErrorRateResult align_tokens(const std::vector<char32_t>&, const std::vector<char32_t>&);

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto bad = [&](const char* why) {
    throw ParseError("invalid UTF-8 at byte " + std::to_string(i) + ": " + why);
  };
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      bad("bad lead byte");
    }
    if (i + len > text.size()) bad("truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) bad("bad continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[len]) bad("overlong encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) bad("not a scalar value");
    out.push_back(cp);
    i += len;
  }
  return out;
}

ErrorRateResult wer(const std::vector<std::string>& reference,
                    const std::vector<std::string>& hypothesis) {
  return align_tokens(reference, hypothesis);
}

ErrorRateResult cer(const std::u32string& reference, const std::u32string& hypothesis) {
  return align_tokens(std::vector<char32_t>(reference.begin(), reference.end()),
                      std::vector<char32_t>(hypothesis.begin(), hypothesis.end()));
}

ErrorRateResult wer(std::string_view reference, std::string_view hypothesis) {
  return wer(split_words(reference), split_words(hypothesis));
}

ErrorRateResult cer(std::string_view reference, std::string_view hypothesis) {
  return cer(decode_utf8(reference), decode_utf8(hypothesis));
}

ErrorRateResult aggregate(const std::vector<ErrorRateResult>& results) {
  ErrorRateResult total;
  for (const auto& r : results) {
    total.substitutions += r.substitutions;
    total.insertions += r.insertions;
    total.deletions += r.deletions;
    total.reference_length += r.reference_length;
  }
  if (total.reference_length > 0) {
    total.rate = static_cast<double>(total.errors()) / static_cast<double>(total.reference_length);
  } else {
    total.rate = total.errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return total;
}

}  // namespace curriculum
