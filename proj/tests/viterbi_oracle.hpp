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


#ifndef ARATOK_TESTS_VITERBI_ORACLE_HPP_
#define ARATOK_TESTS_VITERBI_ORACLE_HPP_

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "aratok/model.hpp"
#include "aratok/utf8.hpp"
#include "test_util.hpp"

namespace aratok::testing {

struct Best {
  double score = -std::numeric_limits<double>::infinity();
  std::vector<TokenId> ids;
};

// Every segmentation, scored left to right in the same order the encoder
// accumulates. Keeps the best by score, then fewer pieces, then token text.
inline void enumerate(const TokenizerModel& m, const std::u32string& w, std::size_t at, double score,
                      std::vector<TokenId>& ids, Best& best) {
  if (at == w.size()) {
    const auto lex_less = [&] {
      return std::lexicographical_compare(
          ids.begin(), ids.end(), best.ids.begin(), best.ids.end(),
          [&](TokenId x, TokenId y) { return m.piece(x) < m.piece(y); });
    };
    if (score > best.score ||
        (score == best.score &&
         (ids.size() < best.ids.size() || (ids.size() == best.ids.size() && lex_less())))) {
      best.score = score;
      best.ids = ids;
    }
    return;
  }
  bool single = false;
  for (std::size_t len = 1; at + len <= w.size(); ++len) {
    std::string piece = utf8::encode(std::u32string_view(w).substr(at, len));
    if (at == 0) piece = marked(piece);
    if (const auto id = m.id_of(piece)) {
      single |= len == 1;
      ids.push_back(*id);
      enumerate(m, w, at + len, score + m.logprob(*id), ids, best);
      ids.pop_back();
    }
  }
  if (!single) {
    ids.push_back(kUnkId);
    enumerate(m, w, at + 1, score + m.unk_penalty(), ids, best);
    ids.pop_back();
  }
}

}  // namespace aratok::testing

#endif  // ARATOK_TESTS_VITERBI_ORACLE_HPP_
