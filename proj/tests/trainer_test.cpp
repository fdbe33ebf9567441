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


#include "aratok/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "aratok/codec.hpp"
#include "aratok/experiment.hpp"
#include "test_util.hpp"

namespace aratok {
namespace {

using testing::marked;
using testing::uniform;

CorpusStats stats_of(std::initializer_list<std::pair<const char*, std::uint64_t>> words) {
  CorpusStats s;
  for (const auto& [w, c] : words) s.add_word(w, c);
  return s;
}

const CorpusStats& bundled_slice() {
  static const CorpusStats stats = [] {
    auto lines = read_lines_file(testing::data_path("corpus/quran_imlaei.txt"));
    lines.resize(600);
    return ingest(lines, NormalizationConfig{});
  }();
  return stats;
}

std::vector<std::string> vocab_tail(const TokenizerModel& m) {
  return {m.vocab().begin() + kNumSpecials, m.vocab().end()};
}

// Best total log-probability over every segmentation of `word`, found by
// plain recursion. Unknown characters are allowed only where no
// single-character piece exists, mirroring the encoder.
double brute_best(const TokenizerModel& m, const std::u32string& w, std::size_t at) {
  if (at == w.size()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  bool single = false;
  for (std::size_t len = 1; at + len <= w.size(); ++len) {
    std::string piece = utf8::encode(std::u32string_view(w).substr(at, len));
    if (at == 0 && uses_boundary_marker(m.algorithm())) piece = marked(piece);
    if (const auto id = m.id_of(piece)) {
      single |= len == 1;
      best = std::max(best, m.logprob(*id) + brute_best(m, w, at + len));
    }
  }
  if (!single) best = std::max(best, m.unk_penalty() + brute_best(m, w, at + 1));
  return best;
}

TEST(TrainUnigram, RepeatedWordPrefersLongPieces) {
  const auto stats = stats_of({{"abab", 10}});
  const auto m = train_unigram(stats, 12);
  const Codec codec(m);
  const auto seg = codec.segment_word("abab");
  EXPECT_LE(seg.size(), 2u);
  EXPECT_DOUBLE_EQ(codec.score(seg), brute_best(m, U"abab", 0));
  const double single_chars = m.logprob(*m.id_of(marked("a"))) + m.logprob(*m.id_of("b")) +
                              m.logprob(*m.id_of("a")) + m.logprob(*m.id_of("b"));
  EXPECT_GT(codec.score(seg), single_chars);
}

TEST(TrainUnigram, SingleWordCorpus) {
  const auto m = train_unigram(stats_of({{"a", 5}}), kNumSpecials + 1);
  EXPECT_EQ(vocab_tail(m), std::vector<std::string>{marked("a")});
  EXPECT_NEAR(std::exp(m.logprob(kNumSpecials)), 1.0, 1e-12);
}

TEST(TrainUnigram, DistinctSingleCharsGetUniformProbabilities) {
  const auto m = train_unigram(stats_of({{"a", 1}, {"b", 1}, {"c", 1}}), 7);
  ASSERT_EQ(m.size(), 7u);
  for (std::size_t i = kNumSpecials; i < m.size(); ++i) {
    EXPECT_NEAR(m.logprobs()[i], std::log(1.0 / 3.0), 1e-12);
  }
}

TEST(TrainUnigram, RejectsTinyVocabAndEmptyCorpus) {
  EXPECT_THROW(train_unigram(stats_of({{"ab", 1}}), kNumSpecials + 1), ConfigError);
  EXPECT_THROW(train_unigram(CorpusStats{}, 100), DataError);
  UnigramOptions bad;
  bad.shrink_factor = 1.0;
  EXPECT_THROW(train_unigram(stats_of({{"ab", 1}}), 100, bad), ConfigError);
}

TEST(TrainUnigram, ProbabilitiesSumToOneAndSizeIsBounded) {
  for (std::size_t v : {100u, 300u, 1000u}) {
    const auto m = train_unigram(bundled_slice(), v);
    EXPECT_LE(m.size(), v);
    double mass = 0.0;
    for (std::size_t i = kNumSpecials; i < m.size(); ++i) mass += std::exp(m.logprobs()[i]);
    EXPECT_NEAR(mass, 1.0, 1e-3);
  }
}

TEST(TrainUnigram, LikelihoodNeverDropsWithinARound) {
  UnigramOptions opts;
  opts.em_iters = 6;
  UnigramTrace trace;
  train_unigram(bundled_slice(), 400, opts, {}, &trace);
  ASSERT_GE(trace.round_likelihoods.size(), 2u);
  for (const auto& round : trace.round_likelihoods) {
    for (std::size_t i = 1; i < round.size(); ++i) {
      EXPECT_GE(round[i], round[i - 1] - 1e-9 * std::fabs(round[i - 1]));
    }
  }
  for (std::size_t r = 1; r < trace.round_sizes.size(); ++r) {
    EXPECT_LT(trace.round_sizes[r], trace.round_sizes[r - 1]);
  }
}

TEST(TrainUnigram, ThreadCountDoesNotChangeTheModel) {
  UnigramOptions one, many;
  many.threads = 4;
  const auto a = train_unigram(bundled_slice(), 500, one);
  const auto b = train_unigram(bundled_slice(), 500, many);
  EXPECT_EQ(model_to_string(a), model_to_string(b));
  EXPECT_EQ(model_to_string(a), model_to_string(train_unigram(bundled_slice(), 500, one)));
}

TEST(TrainUnigram, CharacterCoverageDropsRareCharacters) {
  auto stats = stats_of({{"aaaa", 100}, {"bq", 1}});
  UnigramOptions opts;
  opts.character_coverage = 0.99;
  const auto m = train_unigram(stats, 20, opts);
  for (const auto& p : m.vocab()) EXPECT_EQ(p.find('q'), std::string::npos) << p;
  EXPECT_TRUE(train_unigram(stats, 20).contains("q"));
}

TEST(TrainUnigram, ViterbiMatchesBruteForceOnTrainedModel) {
  const auto m = train_unigram(bundled_slice(), 300);
  const Codec codec(m);
  std::size_t checked = 0;
  for (const auto& [word, count] : bundled_slice().word_counts) {
    const auto chars = utf8::decode(word);
    if (chars.size() > 10) continue;
    // The recursion adds in a different order, so allow rounding.
    ASSERT_NEAR(codec.score(codec.segment_word(word)), brute_best(m, chars, 0), 1e-9) << word;
    if (++checked == 300) break;
  }
}

// -------------------------------------------------------------------------
// Merge trainers against a naive reference that recounts everything after
// every merge.

struct NaiveMerge {
  std::vector<std::string> vocab;  // without specials
  std::vector<Merge> merges;
};

NaiveMerge naive_merge_train(const CorpusStats& stats, std::size_t vocab_size, Algorithm algo,
                             std::uint64_t min_freq) {
  const bool wp = algo == Algorithm::WordPiece;
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> words;
  std::set<std::string> alphabet;
  for (const auto& [word, count] : stats.word_counts) {
    std::vector<std::string> syms;
    const auto chars = utf8::decode(word);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      std::string c = utf8::encode(chars[i]);
      if (!wp && i == 0) c = marked(c);
      if (wp && i > 0) c = "##" + c;
      syms.push_back(c);
      alphabet.insert(c);
    }
    words.emplace_back(std::move(syms), count);
  }
  NaiveMerge out;
  out.vocab.assign(alphabet.begin(), alphabet.end());
  std::set<std::string> known(alphabet.begin(), alphabet.end());
  std::set<std::pair<std::string, std::string>> blocked;
  const auto join = [&](const std::string& l, const std::string& r) {
    return wp ? l + r.substr(2) : l + r;
  };
  while (kNumSpecials + out.vocab.size() < vocab_size) {
    std::map<std::pair<std::string, std::string>, std::uint64_t> pairs;
    std::map<std::string, std::uint64_t> sym;
    for (const auto& [syms, f] : words) {
      for (const auto& s : syms) sym[s] += f;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) pairs[{syms[i], syms[i + 1]}] += f;
    }
    const std::pair<std::string, std::string>* best = nullptr;
    double best_score = 0.0;
    for (const auto& [p, c] : pairs) {
      if (c < min_freq || blocked.count(p)) continue;
      const double s = wp ? static_cast<double>(c) /
                                (static_cast<double>(sym[p.first]) * static_cast<double>(sym[p.second]))
                          : static_cast<double>(c);
      if (!best || s > best_score) {  // map order already gives the lexicographic tie-break
        best = &p;
        best_score = s;
      }
    }
    if (!best) break;
    const auto [l, r] = *best;
    const auto product = join(l, r);
    if (known.count(product) || (wp && !l.starts_with("##") && product.starts_with("##"))) {
      blocked.insert({l, r});
      continue;
    }
    known.insert(product);
    out.vocab.push_back(product);
    out.merges.emplace_back(l, r);
    for (auto& [syms, f] : words) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
          next.push_back(product);
          ++i;
        } else {
          next.push_back(syms[i]);
        }
      }
      syms = std::move(next);
    }
  }
  return out;
}

CorpusStats random_corpus(std::mt19937_64& rng) {
  static const std::u32string alphabet = U"abc#ءب";
  CorpusStats s;
  const auto n = uniform(rng, 1, 12);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::u32string w;
    const auto len = uniform(rng, 1, 7);
    const auto k = uniform(rng, 2, alphabet.size());
    for (std::uint64_t j = 0; j < len; ++j) w.push_back(alphabet[uniform(rng, 0, k - 1)]);
    s.add_word(utf8::encode(w), uniform(rng, 1, 9));
  }
  return s;
}

TEST(TrainBpe, FirstMergeIsTheMostFrequentPair) {
  const auto m = train_bpe(stats_of({{"aa", 3}, {"ab", 1}}), kNumSpecials + 4);
  ASSERT_EQ(m.merges().size(), 1u);
  EXPECT_EQ(m.merges()[0], (Merge{marked("a"), "a"}));
}

TEST(TrainBpe, NoBudgetMeansAlphabetOnly) {
  const auto m = train_bpe(stats_of({{"a", 1}, {"b", 1}, {"c", 1}}), kNumSpecials + 3);
  EXPECT_EQ(vocab_tail(m), (std::vector<std::string>{marked("a"), marked("b"), marked("c")}));
  EXPECT_TRUE(m.merges().empty());
}

TEST(TrainBpe, TiesGoToTheLexicographicallySmallerPair) {
  MergeOptions opts;
  opts.min_pair_freq = 1;
  const auto m = train_bpe(stats_of({{"cd", 1}, {"ab", 1}}), kNumSpecials + 5, opts);
  ASSERT_EQ(m.merges().size(), 1u);
  EXPECT_EQ(m.merges()[0], (Merge{marked("a"), "b"}));
}

TEST(TrainBpe, StopsBelowMinPairFrequency) {
  const auto m = train_bpe(stats_of({{"ab", 1}, {"cd", 1}}), 100);
  EXPECT_TRUE(m.merges().empty());
  EXPECT_THROW(train_bpe(stats_of({{"abc", 1}}), kNumSpecials + 2), ConfigError);
}

TEST(TrainBpe, MatchesNaiveReference) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto stats = random_corpus(rng);
    const auto alphabet = naive_merge_train(stats, 0, Algorithm::Bpe, 1).vocab.size();
    const auto v = kNumSpecials + alphabet + uniform(rng, 0, 25);
    const auto min_freq = uniform(rng, 1, 3);
    MergeOptions opts;
    opts.min_pair_freq = min_freq;
    opts.verify_counts = true;
    const auto m = train_bpe(stats, v, opts);
    const auto ref = naive_merge_train(stats, v, Algorithm::Bpe, min_freq);
    ASSERT_EQ(vocab_tail(m), ref.vocab) << "trial " << trial;
    ASSERT_EQ(m.merges(), ref.merges) << "trial " << trial;
  }
}

TEST(TrainWordPiece, ScoreNormalizesByOperandCounts) {
  const auto stats = stats_of({{"ab", 5}, {"a", 100}, {"b", 100}, {"cd", 4}, {"c", 4}, {"d", 4}});
  const auto m = train_wordpiece(stats, kNumSpecials + 7);
  // Alphabet: ##b ##d a b c d, then the single product.
  EXPECT_EQ(vocab_tail(m),
            (std::vector<std::string>{"##b", "##d", "a", "b", "c", "d", "cd"}));
  EXPECT_TRUE(m.merges().empty());
}

TEST(TrainWordPiece, SymmetricTieGoesLexicographic) {
  MergeOptions opts;
  opts.min_pair_freq = 1;
  const auto m = train_wordpiece(stats_of({{"ab", 1}, {"ba", 1}}), kNumSpecials + 5, opts);
  EXPECT_EQ(m.vocab().back(), "ab");
}

TEST(TrainWordPiece, MatchesNaiveReference) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const auto stats = random_corpus(rng);
    const auto alphabet = naive_merge_train(stats, 0, Algorithm::WordPiece, 1).vocab.size();
    const auto v = kNumSpecials + alphabet + uniform(rng, 0, 25);
    const auto min_freq = uniform(rng, 1, 3);
    MergeOptions opts;
    opts.min_pair_freq = min_freq;
    opts.verify_counts = true;
    const auto m = train_wordpiece(stats, v, opts);
    const auto ref = naive_merge_train(stats, v, Algorithm::WordPiece, min_freq);
    ASSERT_EQ(vocab_tail(m), ref.vocab) << "trial " << trial;
  }
}

TEST(TrainMerge, IncrementalCountsSurviveVerificationOnBundledSlice) {
  MergeOptions opts;
  opts.verify_counts = true;
  auto lines = read_lines_file(testing::data_path("corpus/quran_uthmani.txt"));
  lines.resize(30);
  const auto stats = ingest(lines, NormalizationConfig{});
  EXPECT_NO_THROW(train_bpe(stats, 250, opts));
  EXPECT_NO_THROW(train_wordpiece(stats, 250, opts));
}

TEST(TrainAll, AlphabetCoveredAndDeterministic) {
  const auto& stats = bundled_slice();
  std::set<char32_t> chars;
  for (const auto& [w, c] : stats.word_counts) {
    for (char32_t ch : utf8::decode(w)) chars.insert(ch);
  }
  for (auto algo : {Algorithm::Unigram, Algorithm::Bpe, Algorithm::WordPiece}) {
    const auto m = train(algo, stats, 800, {}, {});
    const auto again = train(algo, stats, 800, {}, {});
    EXPECT_EQ(model_to_string(m), model_to_string(again));
    EXPECT_LE(m.size(), 800u);
    std::set<char32_t> covered;
    for (std::size_t i = kNumSpecials; i < m.size(); ++i) {
      if (m.is_single_char(static_cast<TokenId>(i))) {
        covered.insert(utf8::decode(m.surface(static_cast<TokenId>(i))).front());
      }
    }
    EXPECT_EQ(covered, chars) << to_string(algo);
  }
}

}  // namespace
}  // namespace aratok
