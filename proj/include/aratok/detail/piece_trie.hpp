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

#ifndef ARATOK_DETAIL_PIECE_TRIE_HPP_
#define ARATOK_DETAIL_PIECE_TRIE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aratok::detail {

// Prefix tree over codepoints with two roots: one for word-initial pieces
// and one for word-internal pieces. Payloads are caller-defined indices.
class PieceTrie {
 public:
  PieceTrie() : payload_(2, -1) {}

  void insert(std::u32string_view chars, bool word_initial, std::int32_t value) {
    std::int32_t node = word_initial ? kInitialRoot : kInnerRoot;
    for (char32_t c : chars) {
      const auto [it, inserted] =
          edges_.try_emplace(key(node, c), static_cast<std::int32_t>(payload_.size()));
      if (inserted) payload_.push_back(-1);
      node = it->second;
    }
    payload_[node] = value;
  }

  // Calls f(length, value) for every stored piece that is a prefix of
  // text[0, max_len), shortest first.
  template <class F>
  void match(std::u32string_view text, bool word_initial, std::size_t max_len,
             F&& f) const {
    std::int32_t node = word_initial ? kInitialRoot : kInnerRoot;
    const std::size_t n = std::min(text.size(), max_len);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = edges_.find(key(node, text[i]));
      if (it == edges_.end()) return;
      node = it->second;
      if (payload_[node] >= 0) f(i + 1, payload_[node]);
    }
  }

 private:
  static constexpr std::int32_t kInnerRoot = 0;
  static constexpr std::int32_t kInitialRoot = 1;

  static std::uint64_t key(std::int32_t node, char32_t c) {
    return (static_cast<std::uint64_t>(node) << 32) | c;
  }

  std::vector<std::int32_t> payload_;
  std::unordered_map<std::uint64_t, std::int32_t> edges_;
};

}  // namespace aratok::detail

#endif  // ARATOK_DETAIL_PIECE_TRIE_HPP_
