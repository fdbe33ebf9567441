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

#ifndef ARATOK_VOCAB_HPP_
#define ARATOK_VOCAB_HPP_

// Coverage-based vocabulary pruning.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "aratok/codec.hpp"
#include "aratok/corpus.hpp"
#include "aratok/errors.hpp"
#include "aratok/model.hpp"

namespace aratok {

// Tokens covering less than this share of all occurrences are always
// pruned, whatever the coverage target.
inline constexpr double kMinTokenShare = 0.0001;

struct TokenUsage {
  std::vector<std::uint64_t> counts;  // indexed by token id
  std::uint64_t total = 0;

  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

// Exact token counts: each distinct word is segmented once and its pieces
// weighted by the word's frequency.
inline TokenUsage token_frequencies(const Codec& codec, const CorpusStats& stats) {
  TokenUsage usage;
  usage.counts.assign(codec.model().size(), 0);
  for (const auto& [word, count] : stats.word_counts) {
    for (const auto& piece : codec.segment_word(word)) {
      usage.counts[static_cast<std::size_t>(piece.id)] += count;
      usage.total += count;
    }
  }
  return usage;
}

inline TokenUsage token_frequencies(const TokenizerModel& model, const CorpusStats& stats) {
  return token_frequencies(Codec(model), stats);
}

// Ids kept at the given coverage, ascending. Specials and single-character
// tokens are always kept and their usage counts toward coverage first; the
// remaining tokens are added by descending count until coverage is reached.
inline std::vector<TokenId> retained_tokens(const TokenizerModel& model,
                                            const TokenUsage& usage, double coverage) {
  if (!(coverage > 0.0 && coverage <= 1.0)) {
    throw ConfigError("coverage must be in (0, 1], got " + std::to_string(coverage));
  }
  if (usage.counts.size() != model.size()) {
    throw DataError("token usage does not match the model's vocabulary size");
  }
  std::vector<bool> keep(model.size(), false);
  std::vector<TokenId> candidates;
  std::uint64_t covered = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (TokenizerModel::is_special(id) || model.is_single_char(id)) {
      keep[i] = true;
      covered += usage.counts[i];
    } else {
      candidates.push_back(id);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](TokenId a, TokenId b) {
    if (usage.counts[a] != usage.counts[b]) return usage.counts[a] > usage.counts[b];
    return model.piece(a) < model.piece(b);
  });
  const double target = coverage * static_cast<double>(usage.total);
  for (TokenId id : candidates) {
    if (static_cast<double>(covered) >= target) break;
    covered += usage.counts[id];
    const double share = usage.total == 0 ? 0.0
                                          : static_cast<double>(usage.counts[id]) /
                                                static_cast<double>(usage.total);
    if (share >= kMinTokenShare) keep[id] = true;
  }
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) out.push_back(static_cast<TokenId>(i));
  }
  return out;
}

// Returns a model with only the retained tokens, ids recompacted in their
// original order. Unigram probabilities are renormalized over survivors; BPE
// keeps a merge only if its product survived and both operands are still
// reachable, and drops tokens no kept merge produces.
inline TokenizerModel prune_vocab(const TokenizerModel& model, const TokenUsage& usage,
                                  double coverage) {
  const auto retained = retained_tokens(model, usage, coverage);
  std::unordered_set<std::string> survivors;
  for (TokenId id : retained) survivors.insert(model.piece(id));

  std::vector<Merge> merges;
  if (model.algorithm() == Algorithm::Bpe) {
    std::unordered_set<std::string> reachable;
    for (std::size_t i = kNumSpecials; i < model.size(); ++i) {
      if (model.is_single_char(static_cast<TokenId>(i))) reachable.insert(model.vocab()[i]);
    }
    for (const auto& [l, r] : model.merges()) {
      std::string product = l + r;
      if (survivors.count(product) && reachable.count(l) && reachable.count(r)) {
        merges.emplace_back(l, r);
        reachable.insert(std::move(product));
      }
    }
    survivors = std::move(reachable);
    for (std::size_t i = 0; i < static_cast<std::size_t>(kNumSpecials); ++i) {
      survivors.insert(model.vocab()[i]);
    }
  }

  std::vector<std::string> vocab;
  std::vector<double> logprobs;
  double mass = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (!survivors.count(model.vocab()[i])) continue;
    vocab.push_back(model.vocab()[i]);
    if (model.algorithm() == Algorithm::Unigram) {
      logprobs.push_back(model.logprobs()[i]);
      if (i >= static_cast<std::size_t>(kNumSpecials)) mass += std::exp(model.logprobs()[i]);
    }
  }
  if (model.algorithm() == Algorithm::Unigram && mass > 0.0) {
    const double log_mass = std::log(mass);
    for (std::size_t i = kNumSpecials; i < logprobs.size(); ++i) logprobs[i] -= log_mass;
  }
  return TokenizerModel(model.algorithm(), std::move(vocab), std::move(logprobs),
                        std::move(merges), model.normalization());
}

}  // namespace aratok

#endif  // ARATOK_VOCAB_HPP_
