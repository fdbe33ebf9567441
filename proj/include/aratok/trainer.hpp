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

#ifndef ARATOK_TRAINER_HPP_
#define ARATOK_TRAINER_HPP_

// Tokenizer trainers over word-frequency statistics:
//   train_unigram    EM over segmentation lattices with likelihood pruning
//   train_bpe        greedy merges of the most frequent adjacent pair
//   train_wordpiece  merges scored by count(l,r) / (count(l) * count(r))
//
// All three are deterministic: words are visited in sorted order and every
// ranking breaks ties by token string.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "aratok/corpus.hpp"
#include "aratok/detail/piece_trie.hpp"
#include "aratok/errors.hpp"
#include "aratok/model.hpp"
#include "aratok/utf8.hpp"

namespace aratok {

struct UnigramOptions {
  std::size_t seed_size = 0;  // 0: min(1'000'000, 10 * vocab_size)
  std::size_t max_piece_length = 16;
  int em_iters = 2;
  double shrink_factor = 0.75;
  double character_coverage = 1.0;
  std::size_t max_word_length = 256;
  unsigned threads = 1;
};

// Per pruning round, the corpus log-likelihood seen by each E-step. The
// last entry holds the final re-estimation after the size target is met.
struct UnigramTrace {
  std::vector<std::vector<double>> round_likelihoods;
  std::vector<std::size_t> round_sizes;
};

struct MergeOptions {
  std::uint64_t min_pair_freq = 2;
  // Recount every pair from scratch after each merge and compare against
  // the incremental tables. Quadratic; meant for tests on small corpora.
  bool verify_counts = false;
};

namespace detail {

inline double log_add(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

// Runs fn(shard) for shard in [0, shards) on up to `threads` workers.
template <class Fn>
void for_each_shard(std::size_t shards, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), shards);
  if (workers <= 1) {
    for (std::size_t s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t s; (s = next.fetch_add(1)) < shards;) fn(s);
    });
  }
}

inline std::string piece_string(std::u32string_view chars, bool initial) {
  std::string out;
  if (initial) out.append(kBoundaryMarkerUtf8);
  out += utf8::encode(chars);
  return out;
}

// ---------------------------------------------------------------------------
// Unigram

class UnigramTrainer {
 public:
  UnigramTrainer(const CorpusStats& stats, std::size_t vocab_size,
                 const UnigramOptions& opts)
      : vocab_size_(vocab_size), opts_(opts) {
    if (stats.empty()) throw DataError("cannot train on an empty corpus");
    if (opts_.max_piece_length == 0 || opts_.em_iters < 1 ||
        !(opts_.shrink_factor > 0.0 && opts_.shrink_factor < 1.0) ||
        !(opts_.character_coverage > 0.0 && opts_.character_coverage <= 1.0) ||
        opts_.max_word_length == 0) {
      throw ConfigError("invalid unigram options");
    }
    if (opts_.seed_size == 0) {
      opts_.seed_size = std::min<std::size_t>(1'000'000, 10 * vocab_size);
    }
    build_chunks(stats);
  }

  TokenizerModel train(const NormalizationConfig& normalization,
                       UnigramTrace* trace) {
    seed_pieces();
    const std::size_t specials = kNumSpecials;
    while (specials + pieces_.size() > vocab_size_) {
      std::vector<double> history;
      for (int i = 0; i < opts_.em_iters; ++i) history.push_back(em_step());
      if (trace) {
        trace->round_likelihoods.push_back(std::move(history));
        trace->round_sizes.push_back(specials + pieces_.size());
      }
      prune();
    }
    std::vector<double> history;
    for (int i = 0; i < opts_.em_iters; ++i) history.push_back(em_step());
    if (trace) {
      trace->round_likelihoods.push_back(std::move(history));
      trace->round_sizes.push_back(specials + pieces_.size());
    }
    return finish(normalization);
  }

 private:
  struct Chunk {
    std::u32string text;
    bool initial = false;
    std::uint64_t freq = 0;
  };

  struct Piece {
    std::u32string chars;
    bool initial = false;
    bool required = false;
    double logprob = 0.0;
  };

  struct PieceKey {
    std::u32string chars;
    bool initial;
    friend bool operator<(const PieceKey& a, const PieceKey& b) {
      // Same order as the UTF-8 vocab strings: marked pieces sort by the
      // marker codepoint, which is above every Arabic letter.
      return std::tie(a.initial, a.chars) < std::tie(b.initial, b.chars);
    }
  };

  void build_chunks(const CorpusStats& stats) {
    // Character coverage: keep the most frequent characters that together
    // account for the requested share of all character occurrences.
    std::map<char32_t, std::uint64_t> char_freq;
    std::vector<std::pair<std::u32string, std::uint64_t>> words;
    words.reserve(stats.word_counts.size());
    for (const auto& [word, count] : stats.word_counts) {
      auto cps = utf8::decode(word);
      for (char32_t c : cps) char_freq[c] += count;
      words.emplace_back(std::move(cps), count);
    }
    std::vector<std::pair<char32_t, std::uint64_t>> ranked(char_freq.begin(),
                                                           char_freq.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::uint64_t total = 0;
    for (const auto& r : ranked) total += r.second;
    const double needed = opts_.character_coverage * static_cast<double>(total);
    std::uint64_t covered = 0;
    for (const auto& [c, f] : ranked) {
      if (opts_.character_coverage < 1.0 && static_cast<double>(covered) >= needed) break;
      alphabet_.insert(c);
      covered += f;
    }

    for (auto& [cps, count] : words) {
      std::size_t start = 0;
      for (std::size_t i = 0; i <= cps.size(); ++i) {
        if (i < cps.size() && alphabet_.count(cps[i])) continue;
        add_chunk(std::u32string_view(cps).substr(start, i - start), start == 0, count);
        start = i + 1;
      }
    }
  }

  void add_chunk(std::u32string_view text, bool initial, std::uint64_t freq) {
    for (std::size_t off = 0; off < text.size(); off += opts_.max_word_length) {
      chunks_.push_back({std::u32string(text.substr(off, opts_.max_word_length)),
                         initial && off == 0, freq});
    }
  }

  void seed_pieces() {
    std::map<PieceKey, std::uint64_t> required;
    struct Hash {
      std::size_t operator()(const std::u32string& s) const {
        return std::hash<std::u32string>{}(s);
      }
    };
    // Substring counts keyed by marker-prefixed chars.
    std::unordered_map<std::u32string, std::uint64_t, Hash> counts;
    for (const auto& ch : chunks_) {
      const std::size_t n = ch.text.size();
      for (std::size_t i = 0; i < n; ++i) {
        const bool initial = ch.initial && i == 0;
        required[{ch.text.substr(i, 1), initial}] += ch.freq;
        std::u32string key;
        if (initial) key.push_back(kBoundaryMarker);
        for (std::size_t len = 1; len <= opts_.max_piece_length && i + len <= n; ++len) {
          key.push_back(ch.text[i + len - 1]);
          if (len >= 2) counts[key] += ch.freq;
        }
      }
    }
    if (kNumSpecials + required.size() > vocab_size_) {
      throw ConfigError("vocab size " + std::to_string(vocab_size_) +
                        " is below the alphabet size " +
                        std::to_string(required.size()) + " plus " +
                        std::to_string(kNumSpecials) + " special tokens");
    }

    struct Candidate {
      std::u32string key;
      std::uint64_t count;
      std::uint64_t score;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(counts.size());
    for (auto& [key, count] : counts) {
      const std::size_t len = key.size() - (key.front() == kBoundaryMarker ? 1 : 0);
      candidates.push_back({key, count, count * len});
    }
    counts.clear();
    const std::size_t slots =
        opts_.seed_size > required.size() ? opts_.seed_size - required.size() : 0;
    const auto better = [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.key < b.key;
    };
    if (candidates.size() > slots) {
      std::nth_element(candidates.begin(), candidates.begin() + slots,
                       candidates.end(), better);
      candidates.resize(slots);
    }
    std::sort(candidates.begin(), candidates.end(), better);

    std::vector<std::pair<Piece, std::uint64_t>> seeded;
    for (const auto& [key, count] : required) {
      seeded.push_back({Piece{key.chars, key.initial, true, 0.0}, count});
    }
    for (const auto& c : candidates) {
      const bool initial = c.key.front() == kBoundaryMarker;
      seeded.push_back({Piece{initial ? c.key.substr(1) : c.key, initial, false, 0.0},
                        c.count});
    }
    double total = 0.0;
    for (const auto& s : seeded) total += static_cast<double>(s.second);
    const double log_total = std::log(total);
    pieces_.clear();
    for (auto& [piece, count] : seeded) {
      piece.logprob = std::log(static_cast<double>(count)) - log_total;
      pieces_.push_back(std::move(piece));
    }
    rebuild_trie();
  }

  void rebuild_trie() {
    trie_ = PieceTrie();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      trie_.insert(pieces_[i].chars, pieces_[i].initial, static_cast<std::int32_t>(i));
    }
  }

  static constexpr std::size_t kShards = 16;

  std::pair<std::size_t, std::size_t> shard_range(std::size_t s) const {
    const std::size_t n = chunks_.size();
    return {n * s / kShards, n * (s + 1) / kShards};
  }

  // One EM iteration; returns the log-likelihood under the parameters the
  // E-step used.
  double em_step() {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> shard_counts(kShards);
    std::vector<double> shard_ll(kShards, 0.0);
    for_each_shard(kShards, opts_.threads, [&](std::size_t s) {
      auto& expected = shard_counts[s];
      expected.assign(pieces_.size(), 0.0);
      struct Edge {
        std::size_t begin, end;
        std::int32_t piece;
      };
      std::vector<Edge> edges;
      std::vector<double> alpha, beta;
      const auto [lo, hi] = shard_range(s);
      for (std::size_t w = lo; w < hi; ++w) {
        const Chunk& ch = chunks_[w];
        const std::size_t n = ch.text.size();
        edges.clear();
        alpha.assign(n + 1, kNegInf);
        beta.assign(n + 1, kNegInf);
        alpha[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (alpha[i] == kNegInf) continue;
          trie_.match(std::u32string_view(ch.text).substr(i), ch.initial && i == 0,
                      opts_.max_piece_length, [&](std::size_t len, std::int32_t p) {
                        edges.push_back({i, i + len, p});
                        alpha[i + len] = log_add(alpha[i + len], alpha[i] + pieces_[p].logprob);
                      });
        }
        const double z = alpha[n];
        if (z == kNegInf) continue;
        beta[n] = 0.0;
        for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
          beta[it->begin] =
              log_add(beta[it->begin], pieces_[it->piece].logprob + beta[it->end]);
        }
        const double f = static_cast<double>(ch.freq);
        for (const auto& e : edges) {
          const double post =
              std::exp(alpha[e.begin] + pieces_[e.piece].logprob + beta[e.end] - z);
          expected[e.piece] += f * post;
        }
        shard_ll[s] += f * z;
      }
    });
    std::vector<double> expected(pieces_.size(), 0.0);
    double likelihood = 0.0;
    for (std::size_t s = 0; s < kShards; ++s) {
      for (std::size_t i = 0; i < pieces_.size(); ++i) expected[i] += shard_counts[s][i];
      likelihood += shard_ll[s];
    }
    // M-step. The floor keeps every piece finite; it is far below any
    // count a real occurrence produces.
    double total = 0.0;
    for (auto& e : expected) {
      e = std::max(e, 1e-300);
      total += e;
    }
    const double log_total = std::log(total);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      pieces_[i].logprob = std::log(expected[i]) - log_total;
    }
    return likelihood;
  }

  // Best segmentation of text, skipping piece `excluded`. Returns piece
  // indices; empty if no segmentation exists.
  std::vector<std::int32_t> viterbi(std::u32string_view text, bool initial,
                                    std::int32_t excluded) const {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const std::size_t n = text.size();
    std::vector<double> best(n + 1, kNegInf);
    std::vector<std::pair<std::size_t, std::int32_t>> back(n + 1, {0, -1});
    best[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (best[i] == kNegInf) continue;
      trie_.match(text.substr(i), initial && i == 0, opts_.max_piece_length,
                  [&](std::size_t len, std::int32_t p) {
                    if (p == excluded) return;
                    const double s = best[i] + pieces_[p].logprob;
                    if (s > best[i + len]) {
                      best[i + len] = s;
                      back[i + len] = {i, p};
                    }
                  });
    }
    std::vector<std::int32_t> out;
    if (best[n] == kNegInf) return out;
    for (std::size_t pos = n; pos > 0; pos = back[pos].first) {
      out.push_back(back[pos].second);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Drops the pieces whose removal costs the least likelihood, estimated
  // from Viterbi usage and the best alternative segmentation of each piece.
  void prune() {
    std::vector<double> freq(pieces_.size(), 0.0);
    for (const auto& ch : chunks_) {
      for (std::int32_t p : viterbi(ch.text, ch.initial, -1)) {
        freq[p] += static_cast<double>(ch.freq);
      }
    }
    double sum = 0.0;
    for (double f : freq) sum += f;
    const double log_sum = std::log(sum);

    struct Scored {
      double loss;
      std::int32_t piece;
    };
    std::vector<Scored> candidates;
    std::size_t required = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const Piece& piece = pieces_[i];
      if (piece.required) {
        ++required;
        continue;
      }
      double loss = 0.0;
      if (freq[i] > 0.0) {
        const auto alts = viterbi(piece.chars, piece.initial, static_cast<std::int32_t>(i));
        if (alts.empty()) {
          loss = std::numeric_limits<double>::infinity();
        } else {
          const double log_sum_alt =
              std::log(sum + freq[i] * (static_cast<double>(alts.size()) - 1.0));
          const double lp = std::log(freq[i]) - log_sum;
          double lp_alt = 0.0;
          for (std::int32_t a : alts) lp_alt += std::log(freq[a] + freq[i]) - log_sum_alt;
          loss = freq[i] * (lp - lp_alt);
        }
      }
      candidates.push_back({loss, static_cast<std::int32_t>(i)});
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Scored& a, const Scored& b) {
      if (a.loss != b.loss) return a.loss > b.loss;
      return PieceKey{pieces_[a.piece].chars, pieces_[a.piece].initial} <
             PieceKey{pieces_[b.piece].chars, pieces_[b.piece].initial};
    });
    const std::size_t current = kNumSpecials + pieces_.size();
    const auto shrunk = static_cast<std::size_t>(
        std::ceil(opts_.shrink_factor * static_cast<double>(current)));
    const std::size_t target = std::max(vocab_size_, shrunk);
    const std::size_t fixed = kNumSpecials + required;
    const std::size_t keep = target > fixed ? std::min(target - fixed, candidates.size()) : 0;

    std::vector<bool> kept(pieces_.size(), false);
    for (std::size_t i = 0; i < pieces_.size(); ++i) kept[i] = pieces_[i].required;
    for (std::size_t k = 0; k < keep; ++k) kept[candidates[k].piece] = true;
    std::vector<Piece> next;
    next.reserve(fixed + keep);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (kept[i]) next.push_back(std::move(pieces_[i]));
    }
    pieces_ = std::move(next);
    rebuild_trie();
  }

  TokenizerModel finish(const NormalizationConfig& normalization) const {
    std::vector<std::size_t> order(pieces_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::string> strings(pieces_.size());
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      strings[i] = piece_string(pieces_[i].chars, pieces_[i].initial);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (pieces_[a].logprob != pieces_[b].logprob) {
        return pieces_[a].logprob > pieces_[b].logprob;
      }
      return strings[a] < strings[b];
    });
    std::vector<std::string> vocab(kSpecialTokens.begin(), kSpecialTokens.end());
    std::vector<double> logprobs(kNumSpecials, 0.0);
    for (std::size_t i : order) {
      vocab.push_back(strings[i]);
      logprobs.push_back(pieces_[i].logprob);
    }
    return TokenizerModel(Algorithm::Unigram, std::move(vocab), std::move(logprobs), {},
                          normalization);
  }

  std::size_t vocab_size_;
  UnigramOptions opts_;
  std::set<char32_t> alphabet_;
  std::vector<Chunk> chunks_;
  std::vector<Piece> pieces_;
  PieceTrie trie_;
};

// ---------------------------------------------------------------------------
// BPE and WordPiece share one merge loop; they differ in how symbols are
// marked and how a candidate pair is scored.

class MergeTrainer {
 public:
  MergeTrainer(const CorpusStats& stats, Algorithm algorithm, const MergeOptions& opts)
      : algorithm_(algorithm), opts_(opts) {
    if (stats.empty()) throw DataError("cannot train on an empty corpus");
    if (opts_.min_pair_freq == 0) throw ConfigError("min_pair_freq must be positive");
    std::set<std::string> alphabet;
    for (const auto& [word, count] : stats.word_counts) {
      Word w;
      w.freq = count;
      std::size_t pos = 0;
      bool first = true;
      while (pos < word.size()) {
        const std::size_t start = pos;
        utf8::next(word, pos);
        std::string sym = initial_symbol(word.substr(start, pos - start), first);
        alphabet.insert(sym);
        w.syms.push_back(intern(sym));
        first = false;
      }
      words_.push_back(std::move(w));
    }
    alphabet_.assign(alphabet.begin(), alphabet.end());
  }

  TokenizerModel train(std::size_t vocab_size, const NormalizationConfig& normalization) {
    if (kNumSpecials + alphabet_.size() > vocab_size) {
      throw ConfigError("vocab size " + std::to_string(vocab_size) +
                        " is below the alphabet size " + std::to_string(alphabet_.size()) +
                        " plus " + std::to_string(kNumSpecials) + " special tokens");
    }
    count_all();
    for (const auto& [key, count] : pair_count_) push(key);

    std::size_t size = kNumSpecials + alphabet_.size();
    std::vector<Merge> merges;
    while (size < vocab_size) {
      const auto best = pop_best();
      if (!best) break;
      const auto [left, right] = split(*best);
      std::string product = join(left, right);
      if (sym_id_.count(product) || !valid_product(left, product)) {
        blocked_.insert(*best);
        continue;
      }
      apply_merge(*best, intern(product));
      merges.emplace_back(sym_str_[left], sym_str_[right]);
      ++size;
      if (opts_.verify_counts) verify();
    }

    std::vector<std::string> vocab(kSpecialTokens.begin(), kSpecialTokens.end());
    vocab.insert(vocab.end(), alphabet_.begin(), alphabet_.end());
    for (const auto& [l, r] : merges) vocab.push_back(join(sym_id_.at(l), sym_id_.at(r)));
    if (algorithm_ != Algorithm::Bpe) merges.clear();
    return TokenizerModel(algorithm_, std::move(vocab), {}, std::move(merges), normalization);
  }

 private:
  using Sym = std::int32_t;
  using PairKey = std::uint64_t;

  struct Word {
    std::vector<Sym> syms;
    std::uint64_t freq = 0;
  };

  struct Entry {
    double score;
    PairKey key;
  };

  static PairKey make_key(Sym l, Sym r) {
    return (static_cast<PairKey>(static_cast<std::uint32_t>(l)) << 32) |
           static_cast<std::uint32_t>(r);
  }
  static std::pair<Sym, Sym> split(PairKey k) {
    return {static_cast<Sym>(k >> 32), static_cast<Sym>(k & 0xFFFFFFFFu)};
  }

  std::string initial_symbol(std::string_view ch, bool first) const {
    if (algorithm_ == Algorithm::Bpe) {
      return first ? std::string(kBoundaryMarkerUtf8) + std::string(ch) : std::string(ch);
    }
    return first ? std::string(ch) : std::string(kContinuationPrefix) + std::string(ch);
  }

  std::string join(Sym l, Sym r) const {
    std::string_view rs = sym_str_[r];
    if (algorithm_ == Algorithm::WordPiece) rs.remove_prefix(kContinuationPrefix.size());
    return sym_str_[l] + std::string(rs);
  }

  // A word-initial WordPiece token may not look like a continuation.
  bool valid_product(Sym left, std::string_view product) const {
    if (algorithm_ != Algorithm::WordPiece) return true;
    return sym_str_[left].starts_with(kContinuationPrefix) ||
           !product.starts_with(kContinuationPrefix);
  }

  Sym intern(const std::string& s) {
    const auto [it, inserted] = sym_id_.try_emplace(s, static_cast<Sym>(sym_str_.size()));
    if (inserted) {
      sym_str_.push_back(s);
      sym_count_.push_back(0);
      sym_pairs_.emplace_back();
    }
    return it->second;
  }

  double score(PairKey key) const {
    const auto it = pair_count_.find(key);
    if (it == pair_count_.end()) return 0.0;
    const auto c = static_cast<double>(it->second);
    if (algorithm_ == Algorithm::Bpe) return c;
    const auto [l, r] = split(key);
    return c / (static_cast<double>(sym_count_[l]) * static_cast<double>(sym_count_[r]));
  }

  std::int64_t count_of(PairKey key) const {
    const auto it = pair_count_.find(key);
    return it == pair_count_.end() ? 0 : it->second;
  }

  void push(PairKey key) {
    if (static_cast<std::uint64_t>(count_of(key)) < opts_.min_pair_freq) return;
    if (blocked_.count(key)) return;
    queue_.push({score(key), key});
  }

  // Higher score first, then the lexicographically smaller (left, right).
  struct Lower {
    const MergeTrainer* self;
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.score != b.score) return a.score < b.score;
      const auto [al, ar] = split(a.key);
      const auto [bl, br] = split(b.key);
      const auto& s = self->sym_str_;
      if (s[al] != s[bl]) return s[al] > s[bl];
      return s[ar] > s[br];
    }
  };

  std::optional<PairKey> pop_best() {
    while (!queue_.empty()) {
      const Entry e = queue_.top();
      queue_.pop();
      if (blocked_.count(e.key)) continue;
      if (static_cast<std::uint64_t>(count_of(e.key)) < opts_.min_pair_freq) continue;
      if (score(e.key) != e.score) continue;  // a fresher entry exists
      return e.key;
    }
    return std::nullopt;
  }

  void add_pairs(std::size_t w, std::int64_t sign, std::unordered_set<PairKey>& touched,
                 bool index_words) {
    const Word& word = words_[w];
    const auto f = static_cast<std::int64_t>(word.freq) * sign;
    for (Sym s : word.syms) sym_count_[s] += f;
    for (std::size_t i = 0; i + 1 < word.syms.size(); ++i) {
      const PairKey key = make_key(word.syms[i], word.syms[i + 1]);
      auto& c = pair_count_[key];
      if (c == 0 && sign > 0) {
        sym_pairs_[word.syms[i]].push_back(key);
        sym_pairs_[word.syms[i + 1]].push_back(key);
      }
      c += f;
      if (c == 0) pair_count_.erase(key);
      touched.insert(key);
      if (index_words) pair_words_[key].push_back(static_cast<std::int32_t>(w));
    }
  }

  void count_all() {
    std::unordered_set<PairKey> touched;
    for (std::size_t w = 0; w < words_.size(); ++w) add_pairs(w, +1, touched, true);
  }

  void apply_merge(PairKey key, Sym product) {
    const auto [l, r] = split(key);
    std::vector<std::int32_t> affected;
    if (const auto it = pair_words_.find(key); it != pair_words_.end()) {
      affected = std::move(it->second);
      pair_words_.erase(it);
    }
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    std::unordered_set<PairKey> touched;
    for (std::int32_t w : affected) {
      auto& syms = words_[w].syms;
      bool present = false;
      for (std::size_t i = 0; i + 1 < syms.size() && !present; ++i) {
        present = syms[i] == l && syms[i + 1] == r;
      }
      if (!present) continue;
      add_pairs(w, -1, touched, false);
      std::vector<Sym> merged;
      merged.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
          merged.push_back(product);
          ++i;
        } else {
          merged.push_back(syms[i]);
        }
      }
      syms = std::move(merged);
      add_pairs(w, +1, touched, false);
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] == product || syms[i + 1] == product) {
          pair_words_[make_key(syms[i], syms[i + 1])].push_back(w);
        }
      }
    }
    if (algorithm_ == Algorithm::WordPiece) {
      // Symbol counts of l and r changed, so every pair touching them has a
      // new score.
      for (Sym s : {l, r}) {
        auto& list = sym_pairs_[s];
        std::vector<PairKey> live;
        for (PairKey k : list) {
          if (pair_count_.count(k)) live.push_back(k);
        }
        std::sort(live.begin(), live.end());
        live.erase(std::unique(live.begin(), live.end()), live.end());
        list = live;
        touched.insert(live.begin(), live.end());
      }
    }
    for (PairKey k : touched) push(k);
  }

  void verify() const {
    std::unordered_map<PairKey, std::int64_t> pairs;
    std::vector<std::int64_t> syms(sym_str_.size(), 0);
    for (const auto& w : words_) {
      const auto f = static_cast<std::int64_t>(w.freq);
      for (Sym s : w.syms) syms[s] += f;
      for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
        pairs[make_key(w.syms[i], w.syms[i + 1])] += f;
      }
    }
    if (pairs != pair_count_ || syms != sym_count_) {
      throw std::logic_error("incremental pair counts diverged from a full recount");
    }
  }

  Algorithm algorithm_;
  MergeOptions opts_;
  std::vector<std::string> alphabet_;
  std::vector<Word> words_;
  std::vector<std::string> sym_str_;
  std::unordered_map<std::string, Sym> sym_id_;
  std::vector<std::int64_t> sym_count_;
  std::vector<std::vector<PairKey>> sym_pairs_;
  std::unordered_map<PairKey, std::int64_t> pair_count_;
  std::unordered_map<PairKey, std::vector<std::int32_t>> pair_words_;
  std::unordered_set<PairKey> blocked_;
  std::priority_queue<Entry, std::vector<Entry>, Lower> queue_{Lower{this}};
};

}  // namespace detail

inline TokenizerModel train_unigram(const CorpusStats& stats, std::size_t vocab_size,
                                    const UnigramOptions& opts = {},
                                    const NormalizationConfig& normalization = {},
                                    UnigramTrace* trace = nullptr) {
  return detail::UnigramTrainer(stats, vocab_size, opts).train(normalization, trace);
}

inline TokenizerModel train_bpe(const CorpusStats& stats, std::size_t vocab_size,
                                const MergeOptions& opts = {},
                                const NormalizationConfig& normalization = {}) {
  return detail::MergeTrainer(stats, Algorithm::Bpe, opts).train(vocab_size, normalization);
}

inline TokenizerModel train_wordpiece(const CorpusStats& stats, std::size_t vocab_size,
                                      const MergeOptions& opts = {},
                                      const NormalizationConfig& normalization = {}) {
  return detail::MergeTrainer(stats, Algorithm::WordPiece, opts)
      .train(vocab_size, normalization);
}

}  // namespace aratok

#endif  // ARATOK_TRAINER_HPP_
