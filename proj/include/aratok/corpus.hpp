// Copyright 2026 The aratok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARATOK_CORPUS_HPP_
#define ARATOK_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aratok/errors.hpp"
#include "aratok/normalizer.hpp"
#include "aratok/utf8.hpp"

namespace aratok {

// U+2581, the word-boundary prefix of Unigram/BPE vocabularies.
inline constexpr char32_t kBoundaryMarker = 0x2581;
inline constexpr std::string_view kBoundaryMarkerUtf8 = "\xE2\x96\x81";

// Splits on Unicode whitespace. U+2581 is also treated as a separator
// because it is reserved as the word-boundary marker inside vocabularies.
inline std::vector<std::string> pre_tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::size_t word_start = std::string_view::npos;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t start = pos;
    const char32_t cp = utf8::next(text, pos);
    const bool sep = utf8::is_space(cp) || cp == kBoundaryMarker;
    if (sep) {
      if (word_start != std::string_view::npos) {
        words.emplace_back(text.substr(word_start, start - word_start));
        word_start = std::string_view::npos;
      }
    } else if (word_start == std::string_view::npos) {
      word_start = start;
    }
  }
  if (word_start != std::string_view::npos) {
    words.emplace_back(text.substr(word_start));
  }
  return words;
}

// Word frequency table plus character totals. Keys are kept sorted so
// every consumer iterates in the same order.
struct CorpusStats {
  std::map<std::string, std::uint64_t, std::less<>> word_counts;
  std::uint64_t total_words = 0;
  std::uint64_t total_chars = 0;  // non-whitespace scalar values

  bool empty() const { return total_words == 0; }

  void add_word(std::string_view word, std::uint64_t count = 1) {
    if (word.empty() || count == 0) return;
    auto it = word_counts.find(word);
    if (it == word_counts.end()) {
      it = word_counts.emplace(std::string(word), 0).first;
    }
    it->second += count;
    total_words += count;
    total_chars += count * utf8::length(word);
  }

  // Associative and commutative.
  void merge(const CorpusStats& other) {
    for (const auto& [word, count] : other.word_counts) {
      word_counts[word] += count;
    }
    total_words += other.total_words;
    total_chars += other.total_chars;
  }

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

inline CorpusStats merge(CorpusStats a, const CorpusStats& b) {
  a.merge(b);
  return a;
}

struct IngestOptions {
  std::optional<std::size_t> max_lines;
};

inline void ingest_line(CorpusStats& stats, std::string_view line,
                        const Normalizer& normalizer) {
  for (const auto& word : pre_tokenize(normalizer.normalize(line))) {
    stats.add_word(word);
  }
}

inline CorpusStats ingest(std::span<const std::string> lines,
                          const Normalizer& normalizer,
                          const IngestOptions& options = {}) {
  CorpusStats stats;
  std::size_t n = 0;
  for (const auto& line : lines) {
    if (options.max_lines && n >= *options.max_lines) break;
    ingest_line(stats, line, normalizer);
    ++n;
  }
  return stats;
}

// Streams one document per line. A stream that goes bad mid-read aborts
// with the number of the line that could not be read.
inline CorpusStats ingest(std::istream& in, const Normalizer& normalizer,
                          const IngestOptions& options = {}) {
  CorpusStats stats;
  std::string line;
  std::size_t n = 0;
  while (!(options.max_lines && n >= *options.max_lines)) {
    if (!std::getline(in, line)) break;
    ingest_line(stats, line, normalizer);
    ++n;
  }
  if (in.bad()) {
    throw DataError("read error at line " + std::to_string(n + 1));
  }
  return stats;
}

inline CorpusStats ingest(std::span<const std::string> lines,
                          const NormalizationConfig& config) {
  return ingest(lines, Normalizer(config));
}

}  // namespace aratok

#endif  // ARATOK_CORPUS_HPP_
