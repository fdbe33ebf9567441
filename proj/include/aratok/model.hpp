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

#ifndef ARATOK_MODEL_HPP_
#define ARATOK_MODEL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aratok/corpus.hpp"
#include "aratok/errors.hpp"
#include "aratok/normalizer.hpp"
#include "aratok/utf8.hpp"

namespace aratok {

enum class Algorithm { Unigram, Bpe, WordPiece };

using TokenId = std::int32_t;
using Merge = std::pair<std::string, std::string>;

inline constexpr std::array<std::string_view, 4> kSpecialTokens = {
    "<unk>", "<s>", "</s>", "<pad>"};
inline constexpr TokenId kUnkId = 0;
inline constexpr TokenId kNumSpecials = 4;
inline constexpr std::string_view kContinuationPrefix = "##";
// What an unknown token decodes to (U+2047).
inline constexpr std::string_view kUnkSurface = "\xE2\x81\x87";

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Unigram: return "unigram";
    case Algorithm::Bpe: return "bpe";
    case Algorithm::WordPiece: return "wordpiece";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "unigram") return Algorithm::Unigram;
  if (s == "bpe") return Algorithm::Bpe;
  if (s == "wordpiece") return Algorithm::WordPiece;
  throw ConfigError("unknown algorithm '" + std::string(s) +
                    "' (expected unigram, bpe or wordpiece)");
}

// Unigram and BPE prefix word-initial pieces with U+2581; WordPiece prefixes
// word-internal pieces with "##".
inline bool uses_boundary_marker(Algorithm a) {
  return a != Algorithm::WordPiece;
}

// Immutable trained tokenizer. Ids are dense and the four special tokens
// occupy ids 0..3.
class TokenizerModel {
 public:
  TokenizerModel() = default;

  TokenizerModel(Algorithm algorithm, std::vector<std::string> vocab,
                 std::vector<double> logprobs, std::vector<Merge> merges,
                 NormalizationConfig normalization)
      : algorithm_(algorithm),
        vocab_(std::move(vocab)),
        logprobs_(std::move(logprobs)),
        merges_(std::move(merges)),
        normalization_(normalization) {
    validate_and_index();
  }

  Algorithm algorithm() const { return algorithm_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<double>& logprobs() const { return logprobs_; }
  const std::vector<Merge>& merges() const { return merges_; }
  const NormalizationConfig& normalization() const { return normalization_; }
  TokenId unk_id() const { return kUnkId; }
  std::size_t size() const { return vocab_.size(); }

  const std::string& piece(TokenId id) const {
    return vocab_.at(static_cast<std::size_t>(id));
  }

  std::optional<TokenId> id_of(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view token) const { return id_of(token).has_value(); }

  static bool is_special(TokenId id) { return id >= 0 && id < kNumSpecials; }

  double logprob(TokenId id) const {
    return logprobs_.at(static_cast<std::size_t>(id));
  }

  // Log-probability assigned to an unknown character during Viterbi search:
  // ten nats below the least likely piece.
  double unk_penalty() const { return unk_penalty_; }

  bool is_word_initial(TokenId id) const {
    const auto& p = piece(id);
    if (uses_boundary_marker(algorithm_)) {
      return p.starts_with(kBoundaryMarkerUtf8);
    }
    return !p.starts_with(kContinuationPrefix);
  }

  // Token text without the boundary marker or continuation prefix.
  std::string_view surface(TokenId id) const {
    std::string_view p = piece(id);
    if (is_special(id)) return p;
    if (uses_boundary_marker(algorithm_)) {
      if (p.starts_with(kBoundaryMarkerUtf8)) {
        p.remove_prefix(kBoundaryMarkerUtf8.size());
      }
    } else if (p.starts_with(kContinuationPrefix)) {
      p.remove_prefix(kContinuationPrefix.size());
    }
    return p;
  }

  bool is_single_char(TokenId id) const {
    return !is_special(id) && utf8::length(surface(id)) == 1;
  }

  friend bool operator==(const TokenizerModel& a, const TokenizerModel& b) {
    return a.algorithm_ == b.algorithm_ && a.vocab_ == b.vocab_ &&
           a.logprobs_ == b.logprobs_ && a.merges_ == b.merges_ &&
           a.normalization_ == b.normalization_;
  }

 private:
  void validate_and_index() {
    if (vocab_.size() < static_cast<std::size_t>(kNumSpecials)) {
      throw DataError("vocabulary is missing the special tokens");
    }
    for (TokenId i = 0; i < kNumSpecials; ++i) {
      if (vocab_[i] != kSpecialTokens[i]) {
        throw DataError("id " + std::to_string(i) + " must be " +
                        std::string(kSpecialTokens[i]));
      }
    }
    index_.reserve(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      if (vocab_[i].empty()) throw DataError("empty token at id " + std::to_string(i));
      if (!index_.emplace(vocab_[i], static_cast<TokenId>(i)).second) {
        throw DataError("duplicate token '" + vocab_[i] + "'");
      }
    }
    for (std::size_t i = kNumSpecials; i < vocab_.size(); ++i) {
      if (surface(static_cast<TokenId>(i)).empty()) {
        throw DataError("token '" + vocab_[i] + "' has no surface text");
      }
    }
    if (algorithm_ == Algorithm::Unigram) {
      if (logprobs_.size() != vocab_.size()) {
        throw DataError("unigram model needs one logprob per token");
      }
      double min_lp = 0.0;
      for (std::size_t i = kNumSpecials; i < logprobs_.size(); ++i) {
        if (!std::isfinite(logprobs_[i])) {
          throw DataError("non-finite logprob for '" + vocab_[i] + "'");
        }
        min_lp = std::min(min_lp, logprobs_[i]);
      }
      unk_penalty_ = min_lp - 10.0;
    } else if (!logprobs_.empty()) {
      throw DataError("logprobs are only valid for unigram models");
    }
    if (algorithm_ != Algorithm::Bpe && !merges_.empty()) {
      throw DataError("merges are only valid for bpe models");
    }
    if (algorithm_ == Algorithm::Bpe) validate_merges();
  }

  // Every multi-character token must be produced by exactly one merge whose
  // operands are already reachable.
  void validate_merges() const {
    std::unordered_set<std::string> reachable;
    for (std::size_t i = kNumSpecials; i < vocab_.size(); ++i) {
      if (is_single_char(static_cast<TokenId>(i))) reachable.insert(vocab_[i]);
    }
    for (const auto& [left, right] : merges_) {
      if (!reachable.count(left) || !reachable.count(right)) {
        throw DataError("merge (" + left + ", " + right +
                        ") uses an unreachable operand");
      }
      const std::string product = left + right;
      if (!index_.count(product)) {
        throw DataError("merge product '" + product + "' is not in vocab");
      }
      if (!reachable.insert(product).second) {
        throw DataError("token '" + product + "' is produced twice");
      }
    }
    if (reachable.size() + kNumSpecials != vocab_.size()) {
      throw DataError("bpe vocab contains tokens no merge produces");
    }
  }

  Algorithm algorithm_ = Algorithm::Unigram;
  std::vector<std::string> vocab_;
  std::vector<double> logprobs_;
  std::vector<Merge> merges_;
  NormalizationConfig normalization_;
  std::unordered_map<std::string, TokenId> index_;
  double unk_penalty_ = 0.0;
};

// ---------------------------------------------------------------------------
// JSON serialization. Field names are documented in docs/model_format.md.

inline nlohmann::ordered_json normalization_to_json(const NormalizationConfig& c) {
  nlohmann::ordered_json j;
  j["alif_mode"] = to_string(c.alif_mode);
  j["diacritics"] = to_string(c.diacritics);
  j["map_numerals"] = c.map_numerals;
  j["map_punctuation"] = c.map_punctuation;
  j["remove_tatweel"] = c.remove_tatweel;
  j["apply_nfkc"] = c.apply_nfkc;
  return j;
}

inline NormalizationConfig normalization_from_json(const nlohmann::ordered_json& j) {
  NormalizationConfig c;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      set_config_value(c, key, value.get<bool>() ? "true" : "false");
    } else {
      set_config_value(c, key, value.get<std::string>());
    }
  }
  return c;
}

inline nlohmann::ordered_json model_to_json(const TokenizerModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "aratok.tokenizer";
  j["version"] = 1;
  j["algorithm"] = to_string(model.algorithm());
  if (uses_boundary_marker(model.algorithm())) {
    j["marker_scheme"] = {{"kind", "word_boundary"},
                          {"marker", kBoundaryMarkerUtf8}};
  } else {
    j["marker_scheme"] = {{"kind", "continuation"},
                          {"prefix", kContinuationPrefix}};
  }
  j["unk_id"] = model.unk_id();
  j["special_tokens"] = kSpecialTokens;
  j["normalization"] = normalization_to_json(model.normalization());
  j["vocab"] = model.vocab();
  if (model.algorithm() == Algorithm::Unigram) j["logprobs"] = model.logprobs();
  if (model.algorithm() == Algorithm::Bpe) {
    auto merges = nlohmann::ordered_json::array();
    for (const auto& [l, r] : model.merges()) merges.push_back({l, r});
    j["merges"] = std::move(merges);
  }
  return j;
}

inline TokenizerModel model_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("format") != "aratok.tokenizer") {
      throw DataError("not an aratok tokenizer document");
    }
    if (j.at("version") != 1) throw DataError("unsupported model version");
    const Algorithm algo = parse_algorithm(j.at("algorithm").get<std::string>());
    std::vector<double> logprobs;
    if (j.contains("logprobs")) {
      logprobs = j.at("logprobs").get<std::vector<double>>();
    }
    std::vector<Merge> merges;
    if (j.contains("merges")) {
      for (const auto& m : j.at("merges")) {
        merges.emplace_back(m.at(0).get<std::string>(),
                            m.at(1).get<std::string>());
      }
    }
    return TokenizerModel(algo, j.at("vocab").get<std::vector<std::string>>(),
                          std::move(logprobs), std::move(merges),
                          normalization_from_json(j.at("normalization")));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

inline void save_model(std::ostream& out, const TokenizerModel& model) {
  out << model_to_json(model).dump(1) << '\n';
}

inline std::string model_to_string(const TokenizerModel& model) {
  return model_to_json(model).dump(1) + '\n';
}

inline TokenizerModel load_model(std::istream& in) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline TokenizerModel load_model(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace aratok

#endif  // ARATOK_MODEL_HPP_
