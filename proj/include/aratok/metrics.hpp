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

#ifndef ARATOK_METRICS_HPP_
#define ARATOK_METRICS_HPP_

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

#include "aratok/codec.hpp"
#include "aratok/corpus.hpp"
#include "aratok/errors.hpp"
#include "aratok/model.hpp"

namespace aratok {

struct MetricsReport {
  double fertility = 0.0;          // tokens per word
  double compression_ratio = 0.0;  // characters per token
  double oov_rate = 0.0;           // share of words with at least one <unk>
  std::uint64_t total_words = 0;
  std::uint64_t total_tokens = 0;
  std::uint64_t total_chars = 0;
  std::uint64_t oov_words = 0;
};

// Word counts are occurrence-weighted. Characters come from the corpus
// statistics, so whitespace and boundary markers never count.
inline MetricsReport evaluate(const Codec& codec, const CorpusStats& stats) {
  if (stats.empty()) throw DataError("cannot evaluate on an empty corpus");
  MetricsReport r;
  for (const auto& [word, count] : stats.word_counts) {
    const auto seg = codec.segment_word(word);
    r.total_tokens += count * seg.size();
    for (const auto& p : seg) {
      if (p.id == kUnkId) {
        r.oov_words += count;
        break;
      }
    }
  }
  r.total_words = stats.total_words;
  r.total_chars = stats.total_chars;
  const auto words = static_cast<double>(r.total_words);
  const auto tokens = static_cast<double>(r.total_tokens);
  r.fertility = tokens / words;
  r.compression_ratio = static_cast<double>(r.total_chars) / tokens;
  r.oov_rate = static_cast<double>(r.oov_words) / words;
  return r;
}

inline MetricsReport evaluate(const TokenizerModel& model, const CorpusStats& stats) {
  return evaluate(Codec(model), stats);
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["fertility"] = r.fertility;
  j["compression_ratio"] = r.compression_ratio;
  j["oov_rate"] = r.oov_rate;
  j["total_words"] = r.total_words;
  j["total_tokens"] = r.total_tokens;
  j["total_chars"] = r.total_chars;
  j["oov_words"] = r.oov_words;
  return j;
}

inline std::string table_header() {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-18s %9s %7s %7s", "tokenizer", "fertility", "comp.",
                "oov%");
  return buf;
}

inline std::string table_row(std::string_view name, const MetricsReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-18.*s %9.3f %7.2f %7.2f", static_cast<int>(name.size()),
                name.data(), r.fertility, r.compression_ratio, 100.0 * r.oov_rate);
  return buf;
}

}  // namespace aratok

#endif  // ARATOK_METRICS_HPP_
