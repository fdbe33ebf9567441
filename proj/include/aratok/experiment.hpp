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

#ifndef ARATOK_EXPERIMENT_HPP_
#define ARATOK_EXPERIMENT_HPP_

// Train/held-out splitting and the algorithm x normalization x diacritics
// comparison grid.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aratok/corpus.hpp"
#include "aratok/errors.hpp"
#include "aratok/metrics.hpp"
#include "aratok/model.hpp"
#include "aratok/normalizer.hpp"
#include "aratok/trainer.hpp"

namespace aratok {

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  if (in.bad()) throw DataError("read error at line " + std::to_string(lines.size() + 1));
  return lines;
}

inline std::vector<std::string> read_lines_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_lines(in);
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> heldout;
};

// Seeded permutation of [0, n); the first round(n * heldout_fraction) indices
// are held out. Both halves come back sorted. The permutation uses its own
// Fisher-Yates over mt19937_64 so results do not depend on the standard
// library's distribution implementations.
inline Split split_indices(std::size_t n, double heldout_fraction, std::uint64_t seed) {
  if (!(heldout_fraction >= 0.0 && heldout_fraction <= 1.0)) {
    throw ConfigError("held-out fraction must be in [0, 1]");
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do r = rng(); while (r >= limit);
    std::swap(perm[i - 1], perm[r % bound]);
  }
  const auto cut = static_cast<std::size_t>(std::llround(heldout_fraction * static_cast<double>(n)));
  Split s;
  s.heldout.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cut));
  s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(cut), perm.end());
  std::sort(s.heldout.begin(), s.heldout.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

inline std::vector<std::string> select_lines(std::span<const std::string> lines,
                                             std::span<const std::size_t> idx) {
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(lines[i]);
  return out;
}

struct TrainOptions {
  UnigramOptions unigram;
  MergeOptions merge;
};

inline TokenizerModel train(Algorithm algorithm, const CorpusStats& stats, std::size_t vocab_size,
                            const TrainOptions& opts, const NormalizationConfig& normalization) {
  switch (algorithm) {
    case Algorithm::Unigram: return train_unigram(stats, vocab_size, opts.unigram, normalization);
    case Algorithm::Bpe: return train_bpe(stats, vocab_size, opts.merge, normalization);
    case Algorithm::WordPiece: return train_wordpiece(stats, vocab_size, opts.merge, normalization);
  }
  throw ConfigError("unknown algorithm");
}

// Normalized runs use the default pipeline; unnormalized runs apply nothing
// but the diacritics choice.
inline NormalizationConfig grid_config(bool normalized, DiacriticsMode diacritics) {
  if (!normalized) return NormalizationConfig::unnormalized(diacritics);
  NormalizationConfig c;
  c.diacritics = diacritics;
  return c;
}

inline std::string grid_name(Algorithm algorithm, bool normalized, DiacriticsMode diacritics) {
  std::string name;
  switch (algorithm) {
    case Algorithm::Unigram: name = "sp"; break;
    case Algorithm::Bpe: name = "bpe"; break;
    case Algorithm::WordPiece: name = "wp"; break;
  }
  name += diacritics == DiacriticsMode::Drop ? "_drop" : "_keep";
  if (normalized) name += "_norm";
  return name;
}

struct GridCell {
  std::string name;
  Algorithm algorithm;
  bool normalized;
  DiacriticsMode diacritics;
  std::size_t vocab_size;
  MetricsReport metrics;
  double train_seconds;
};

// Table order: diacritics block, then algorithm, then unnormalized before
// normalized.
inline std::vector<GridCell> run_grid(std::span<const std::string> train_lines,
                                      std::span<const std::string> eval_lines,
                                      std::size_t vocab_size, const TrainOptions& opts = {}) {
  std::vector<GridCell> cells;
  for (auto diacritics : {DiacriticsMode::Drop, DiacriticsMode::Keep}) {
    for (auto algorithm : {Algorithm::Bpe, Algorithm::Unigram, Algorithm::WordPiece}) {
      for (bool normalized : {false, true}) {
        const auto config = grid_config(normalized, diacritics);
        const auto stats = ingest(train_lines, config);
        const auto t0 = std::chrono::steady_clock::now();
        const auto model = train(algorithm, stats, vocab_size, opts, config);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        cells.push_back({grid_name(algorithm, normalized, diacritics), algorithm, normalized,
                         diacritics, model.size(), evaluate(model, ingest(eval_lines, config)),
                         dt.count()});
      }
    }
  }
  return cells;
}

}  // namespace aratok

#endif  // ARATOK_EXPERIMENT_HPP_
