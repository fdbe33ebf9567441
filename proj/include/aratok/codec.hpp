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

#ifndef ARATOK_CODEC_HPP_
#define ARATOK_CODEC_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aratok/corpus.hpp"
#include "aratok/detail/piece_trie.hpp"
#include "aratok/errors.hpp"
#include "aratok/model.hpp"
#include "aratok/normalizer.hpp"
#include "aratok/utf8.hpp"

namespace aratok {

// One token of a word's segmentation. `surface` is the slice of the word
// the token covers (no marker), so surfaces concatenate back to the word.
struct Piece {
  TokenId id = kUnkId;
  std::string surface;

  friend bool operator==(const Piece&, const Piece&) = default;
};

using Segmentation = std::vector<Piece>;

struct EncodeOptions {
  // Off for text that is already normalized with the model's config.
  bool normalize = true;
};

// A model prepared for encoding. Immutable after construction, so one
// instance may be shared by concurrent callers.
class Codec {
 public:
  explicit Codec(TokenizerModel model)
      : model_(std::move(model)), normalizer_(model_.normalization()) {
    switch (model_.algorithm()) {
      case Algorithm::Unigram: build_trie(); break;
      case Algorithm::Bpe: build_ranks(); break;
      case Algorithm::WordPiece: build_max_len(); break;
    }
  }

  const TokenizerModel& model() const { return model_; }
  const Normalizer& normalizer() const { return normalizer_; }

  // Segments one pre-normalized, whitespace-free word.
  Segmentation segment_word(std::string_view word) const {
    if (word.empty()) return {};
    switch (model_.algorithm()) {
      case Algorithm::Unigram: return viterbi(word);
      case Algorithm::Bpe: return bpe(word);
      case Algorithm::WordPiece: return wordpiece(word);
    }
    return {};
  }

  std::vector<Piece> encode_pieces(std::string_view text,
                                   const EncodeOptions& opts = {}) const {
    const std::string normalized =
        opts.normalize ? normalizer_.normalize(text) : std::string(text);
    std::vector<Piece> out;
    for (const auto& word : pre_tokenize(normalized)) {
      auto seg = segment_word(word);
      out.insert(out.end(), std::make_move_iterator(seg.begin()),
                 std::make_move_iterator(seg.end()));
    }
    return out;
  }

  std::vector<TokenId> encode(std::string_view text, const EncodeOptions& opts = {}) const {
    std::vector<TokenId> ids;
    for (const auto& p : encode_pieces(text, opts)) ids.push_back(p.id);
    return ids;
  }

  // Word-boundary markers become spaces and "##" continuations are glued to
  // the previous token. <unk> decodes to U+2047; the other specials to "".
  std::string decode(std::span<const TokenId> ids) const {
    std::string out;
    const bool marker = uses_boundary_marker(model_.algorithm());
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
      const TokenId id = ids[pos];
      if (id < 0 || static_cast<std::size_t>(id) >= model_.size()) {
        throw DataError("token id " + std::to_string(id) + " at position " +
                        std::to_string(pos) + " is out of range");
      }
      if (id == kUnkId) {
        if (!marker && !out.empty()) out.push_back(' ');
        out.append(kUnkSurface);
        continue;
      }
      if (TokenizerModel::is_special(id)) continue;
      if (marker) {
        if (model_.is_word_initial(id)) out.push_back(' ');
        out.append(model_.surface(id));
      } else {
        if (model_.is_word_initial(id) && !out.empty()) out.push_back(' ');
        out.append(model_.surface(id));
      }
    }
    if (marker && !out.empty() && out.front() == ' ') out.erase(0, 1);
    return out;
  }

  // Sum of piece log-probabilities, unknown pieces scored at unk_penalty.
  double score(const Segmentation& seg) const {
    double total = 0.0;
    for (const auto& p : seg) {
      total += p.id == kUnkId ? model_.unk_penalty() : model_.logprob(p.id);
    }
    return total;
  }

 private:
  void build_trie() {
    for (std::size_t i = kNumSpecials; i < model_.size(); ++i) {
      const auto id = static_cast<TokenId>(i);
      const auto chars = utf8::decode(model_.surface(id));
      max_len_ = std::max(max_len_, chars.size());
      trie_.insert(chars, model_.is_word_initial(id), id);
    }
  }

  void build_ranks() {
    const auto& merges = model_.merges();
    for (std::size_t r = 0; r < merges.size(); ++r) {
      const auto l = *model_.id_of(merges[r].first);
      const auto rt = *model_.id_of(merges[r].second);
      const auto product = *model_.id_of(merges[r].first + merges[r].second);
      ranks_.emplace(pair_key(l, rt), std::make_pair(static_cast<std::int32_t>(r), product));
    }
  }

  void build_max_len() {
    for (std::size_t i = kNumSpecials; i < model_.size(); ++i) {
      max_len_ = std::max(max_len_, utf8::length(model_.surface(static_cast<TokenId>(i))));
    }
  }

  static std::uint64_t pair_key(TokenId l, TokenId r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l)) << 32) |
           static_cast<std::uint32_t>(r);
  }

  // Byte offsets of each codepoint boundary in word.
  static std::vector<std::size_t> boundaries(std::string_view word) {
    std::vector<std::size_t> b{0};
    for (std::size_t pos = 0; pos < word.size();) {
      utf8::next(word, pos);
      b.push_back(pos);
    }
    return b;
  }

  // Maximum-likelihood segmentation. Ties on score go to fewer pieces, then
  // to the lexicographically smaller token sequence. Ties are settled where
  // two paths meet, so a tie that only appears after later additions round
  // two different partial sums to the same total is not revisited.
  Segmentation viterbi(std::string_view word) const {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const auto chars = utf8::decode(word);
    const auto bytes = boundaries(word);
    const std::size_t n = chars.size();
    std::vector<double> best(n + 1, kNegInf);
    std::vector<std::size_t> count(n + 1, 0);
    std::vector<std::pair<std::size_t, TokenId>> back(n + 1, {0, kUnkId});
    best[0] = 0.0;

    const auto path = [&](std::size_t end) {
      std::vector<TokenId> ids;
      for (std::size_t pos = end; pos > 0; pos = back[pos].first) ids.push_back(back[pos].second);
      std::reverse(ids.begin(), ids.end());
      return ids;
    };
    const auto lex_less = [&](std::vector<TokenId> a, std::vector<TokenId> b) {
      return std::lexicographical_compare(
          a.begin(), a.end(), b.begin(), b.end(),
          [&](TokenId x, TokenId y) { return model_.piece(x) < model_.piece(y); });
    };
    const auto relax = [&](std::size_t from, std::size_t to, TokenId id, double lp) {
      const double s = best[from] + lp;
      const std::size_t c = count[from] + 1;
      bool take = s > best[to];
      if (!take && s == best[to]) {
        if (c != count[to]) {
          take = c < count[to];
        } else {
          auto candidate = path(from);
          candidate.push_back(id);
          take = lex_less(std::move(candidate), path(to));
        }
      }
      if (take) {
        best[to] = s;
        count[to] = c;
        back[to] = {from, id};
      }
    };

    for (std::size_t i = 0; i < n; ++i) {
      if (best[i] == kNegInf) continue;
      bool single = false;
      trie_.match(std::u32string_view(chars).substr(i), i == 0, max_len_,
                  [&](std::size_t len, std::int32_t id) {
                    single |= len == 1;
                    relax(i, i + len, id, model_.logprob(id));
                  });
      if (!single) relax(i, i + 1, kUnkId, model_.unk_penalty());
    }

    Segmentation seg;
    std::vector<std::size_t> starts;
    for (std::size_t pos = n; pos > 0; pos = back[pos].first) starts.push_back(pos);
    std::reverse(starts.begin(), starts.end());
    std::size_t from = 0;
    for (std::size_t to : starts) {
      seg.push_back({back[to].second, std::string(word.substr(bytes[from], bytes[to] - bytes[from]))});
      from = to;
    }
    return seg;
  }

  // Replays merges lowest rank first, each one over the whole word left to
  // right; this is the same as applying the merge list in order.
  Segmentation bpe(std::string_view word) const {
    const auto bytes = boundaries(word);
    struct Sym {
      TokenId id;
      std::size_t begin, end;  // byte range
    };
    std::vector<Sym> syms;
    for (std::size_t i = 0; i + 1 < bytes.size(); ++i) {
      std::string s;
      if (i == 0) s.append(kBoundaryMarkerUtf8);
      s.append(word.substr(bytes[i], bytes[i + 1] - bytes[i]));
      const auto id = model_.id_of(s);
      syms.push_back({id ? *id : -1, bytes[i], bytes[i + 1]});
    }
    for (;;) {
      std::int32_t best_rank = std::numeric_limits<std::int32_t>::max();
      std::uint64_t best_key = 0;
      TokenId product = -1;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i].id < 0 || syms[i + 1].id < 0) continue;
        const auto key = pair_key(syms[i].id, syms[i + 1].id);
        const auto it = ranks_.find(key);
        if (it != ranks_.end() && it->second.first < best_rank) {
          best_rank = it->second.first;
          best_key = key;
          product = it->second.second;
        }
      }
      if (product < 0) break;
      std::vector<Sym> merged;
      merged.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i].id >= 0 && syms[i + 1].id >= 0 &&
            pair_key(syms[i].id, syms[i + 1].id) == best_key) {
          merged.push_back({product, syms[i].begin, syms[i + 1].end});
          ++i;
        } else {
          merged.push_back(syms[i]);
        }
      }
      syms = std::move(merged);
    }
    Segmentation seg;
    for (const auto& s : syms) {
      seg.push_back({s.id < 0 ? kUnkId : s.id, std::string(word.substr(s.begin, s.end - s.begin))});
    }
    return seg;
  }

  // Greedy longest match from the left; any unmatched position turns the
  // whole word into a single <unk>.
  Segmentation wordpiece(std::string_view word) const {
    const auto bytes = boundaries(word);
    const std::size_t n = bytes.size() - 1;
    Segmentation seg;
    std::string candidate;
    for (std::size_t pos = 0; pos < n;) {
      bool found = false;
      for (std::size_t end = std::min(n, pos + max_len_); end > pos; --end) {
        const auto sub = word.substr(bytes[pos], bytes[end] - bytes[pos]);
        candidate.clear();
        if (pos == 0) {
          if (sub.starts_with(kContinuationPrefix)) continue;
        } else {
          candidate.append(kContinuationPrefix);
        }
        candidate.append(sub);
        if (const auto id = model_.id_of(candidate)) {
          seg.push_back({*id, std::string(sub)});
          pos = end;
          found = true;
          break;
        }
      }
      if (!found) return {{kUnkId, std::string(word)}};
    }
    return seg;
  }

  TokenizerModel model_;
  Normalizer normalizer_;
  detail::PieceTrie trie_;
  std::size_t max_len_ = 0;
  std::unordered_map<std::uint64_t, std::pair<std::int32_t, TokenId>> ranks_;
};

inline Segmentation viterbi_segment(const TokenizerModel& model, std::string_view word) {
  if (model.algorithm() != Algorithm::Unigram) {
    throw ConfigError("viterbi_segment needs a unigram model");
  }
  return Codec(model).segment_word(word);
}

inline std::vector<TokenId> encode(const TokenizerModel& model, std::string_view text,
                                   const EncodeOptions& opts = {}) {
  return Codec(model).encode(text, opts);
}

inline std::string decode(const TokenizerModel& model, std::span<const TokenId> ids) {
  return Codec(model).decode(ids);
}

}  // namespace aratok

#endif  // ARATOK_CODEC_HPP_
