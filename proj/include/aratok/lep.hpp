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

#ifndef ARATOK_LEP_HPP_
#define ARATOK_LEP_HPP_

// Vocabulary extension for a pretrained base model: pick new tokens from an
// Arabic tokenizer, initialize their embeddings from base subtokens, and
// describe which gradients to keep during fine-tuning.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aratok/corpus.hpp"
#include "aratok/embedding.hpp"
#include "aratok/errors.hpp"
#include "aratok/model.hpp"
#include "aratok/normalizer.hpp"
#include "aratok/utf8.hpp"

namespace aratok {

// Codepoint ranges whose presence disqualifies a candidate token.
class TokenFilter {
 public:
  struct Range {
    char32_t lo;
    char32_t hi;
    friend bool operator==(const Range&, const Range&) = default;
  };

  TokenFilter() = default;
  explicit TokenFilter(std::vector<Range> ranges) : ranges_(std::move(ranges)) {
    for (const auto& r : ranges_) {
      if (r.lo > r.hi) throw ConfigError("filter range has lo > hi");
    }
  }

  // Latin letters, ASCII digits, Cyrillic and ASCII punctuation.
  static TokenFilter defaults() {
    std::vector<Range> r = {{U'A', U'Z'}, {U'a', U'z'}, {U'0', U'9'}, {0x0400, 0x04FF}};
    for (char c : std::string_view("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")) {
      r.push_back({static_cast<char32_t>(c), static_cast<char32_t>(c)});
    }
    return TokenFilter(std::move(r));
  }

  // One "U+XXXX" or "U+XXXX..U+YYYY" per line; '#' starts a comment.
  static TokenFilter read(std::istream& in) {
    std::vector<Range> ranges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view s = line;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = detail::trim(s);
      if (s.empty()) continue;
      const auto dots = s.find("..");
      const auto lo = parse_codepoint(s.substr(0, dots), lineno);
      const auto hi = dots == std::string_view::npos
                          ? lo
                          : parse_codepoint(detail::trim(s.substr(dots + 2)), lineno);
      if (lo > hi) throw ConfigError("filter line " + std::to_string(lineno) + ": lo > hi");
      ranges.push_back({lo, hi});
    }
    if (in.bad()) throw DataError("read error in filter file at line " + std::to_string(lineno));
    return TokenFilter(std::move(ranges));
  }

  bool rejects(char32_t cp) const {
    return std::any_of(ranges_.begin(), ranges_.end(),
                       [cp](const Range& r) { return cp >= r.lo && cp <= r.hi; });
  }

  bool rejects(std::string_view text) const {
    std::size_t pos = 0;
    while (pos < text.size()) {
      if (rejects(utf8::next(text, pos))) return true;
    }
    return false;
  }

  const std::vector<Range>& ranges() const { return ranges_; }

 private:
  static char32_t parse_codepoint(std::string_view s, std::size_t lineno) {
    s = detail::trim(s);
    if (!(s.starts_with("U+") || s.starts_with("u+"))) {
      throw ConfigError("filter line " + std::to_string(lineno) + ": expected U+XXXX");
    }
    s.remove_prefix(2);
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || v > 0x10FFFF) {
      throw ConfigError("filter line " + std::to_string(lineno) + ": bad codepoint");
    }
    return static_cast<char32_t>(v);
  }

  std::vector<Range> ranges_;
};

struct ExtensionToken {
  std::string text;
  bool lstrip = false;  // token starts a word; the host tokenizer eats the space

  friend bool operator==(const ExtensionToken&, const ExtensionToken&) = default;
};

using BaseVocab = std::unordered_set<std::string>;

// One token per line, taken verbatim (no trimming besides the newline).
inline BaseVocab read_base_vocab(std::istream& in) {
  BaseVocab vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) vocab.insert(line);
  }
  if (in.bad()) throw DataError("read error in base vocabulary");
  return vocab;
}

// Walks the model vocabulary in id order. Word-initial tokens lose their
// marker and get lstrip; WordPiece continuations lose "##". A stripped string
// seen twice keeps its first occurrence.
inline std::vector<ExtensionToken> select_extension_tokens(
    const TokenizerModel& model, const BaseVocab& base_vocab,
    const TokenFilter& filter = TokenFilter::defaults()) {
  std::vector<ExtensionToken> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = kNumSpecials; i < model.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    ExtensionToken tok{std::string(model.surface(id)), model.is_word_initial(id)};
    if (tok.text.empty() || filter.rejects(tok.text)) continue;
    if (base_vocab.count(tok.text) || seen.count(tok.text)) continue;
    seen.insert(tok.text);
    out.push_back(std::move(tok));
  }
  return out;
}

// Candidate token -> base-model ids it encodes to.
using SubtokenMap = std::map<std::string, std::vector<std::uint64_t>, std::less<>>;

// Lines of "token<TAB>id,id,...".
inline SubtokenMap read_submap(std::istream& in) {
  SubtokenMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = [&] { return "subtoken map line " + std::to_string(lineno); };
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw DataError(where() + ": expected token<TAB>ids");
    std::vector<std::uint64_t> ids;
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (true) {
      const auto comma = rest.find(',');
      const auto field = detail::trim(rest.substr(0, comma));
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw DataError(where() + ": bad id '" + std::string(field) + "'");
      }
      ids.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!map.emplace(line.substr(0, tab), std::move(ids)).second) {
      throw DataError(where() + ": duplicate token '" + line.substr(0, tab) + "'");
    }
  }
  if (in.bad()) throw DataError("read error in subtoken map at line " + std::to_string(lineno));
  return map;
}

inline void write_submap(std::ostream& out, const SubtokenMap& map) {
  for (const auto& [token, ids] : map) {
    out << token << '\t';
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
    out << '\n';
  }
}

// Row k is the mean of the base rows listed for tokens[k].
inline EmbeddingMatrix mean_subtoken_init(const EmbeddingMatrix& base, const SubtokenMap& submap,
                                          std::span<const ExtensionToken> tokens) {
  EmbeddingMatrix out(tokens.size(), base.dim());
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto it = submap.find(tokens[k].text);
    if (it == submap.end()) {
      throw DataError("no subtokens listed for '" + tokens[k].text + "'");
    }
    const auto& ids = it->second;
    if (ids.empty()) throw DataError("empty subtoken list for '" + tokens[k].text + "'");
    auto row = out.row(k);
    std::vector<double> lo(row.size(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(row.size(), -std::numeric_limits<double>::infinity());
    for (auto id : ids) {
      if (id >= base.rows()) {
        throw DataError("subtoken id " + std::to_string(id) + " for '" + tokens[k].text +
                        "' exceeds base rows " + std::to_string(base.rows()));
      }
      const auto src = base.row(id);
      for (std::size_t c = 0; c < row.size(); ++c) {
        row[c] += src[c];
        lo[c] = std::min(lo[c], src[c]);
        hi[c] = std::max(hi[c], src[c]);
      }
    }
    // Rounding in the running sum can leave the quotient an ulp or two
    // outside the source rows' range.
    const auto n = static_cast<double>(ids.size());
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = std::clamp(row[c] / n, lo[c], hi[c]);
  }
  return out;
}

// Zeroes rows [0, threshold) of a row-major gradient buffer in place. Call it
// on the embedding gradient after backward and before the optimizer step.
template <typename T>
void mask_gradients_inplace(std::span<T> grad, std::size_t rows, std::size_t dim,
                            std::size_t threshold) {
  if (grad.size() != rows * dim) throw ConfigError("gradient buffer size mismatch");
  if (threshold > rows) {
    throw ConfigError("threshold " + std::to_string(threshold) + " exceeds " +
                      std::to_string(rows) + " rows");
  }
  std::fill(grad.begin(), grad.begin() + static_cast<std::ptrdiff_t>(threshold * dim), T{});
}

inline EmbeddingMatrix mask_gradients(EmbeddingMatrix grad, std::size_t threshold) {
  mask_gradients_inplace(grad.data(), grad.rows(), grad.dim(), threshold);
  return grad;
}

inline const std::vector<int> kDefaultUnfrozenLayers = {24, 25, 26, 27};

struct ExtensionPlan {
  std::vector<ExtensionToken> new_tokens;
  std::uint64_t freeze_threshold = 0;
  std::vector<int> unfrozen_layers;
  EmbeddingMatrix initialized_rows;

  friend bool operator==(const ExtensionPlan&, const ExtensionPlan&) = default;
};

inline ExtensionPlan build_extension_plan(const TokenizerModel& arabic_model,
                                          const BaseVocab& base_vocab,
                                          const EmbeddingMatrix& base,
                                          const SubtokenMap& submap,
                                          std::vector<int> unfrozen_layers = kDefaultUnfrozenLayers,
                                          const TokenFilter& filter = TokenFilter::defaults()) {
  ExtensionPlan plan;
  plan.new_tokens = select_extension_tokens(arabic_model, base_vocab, filter);
  plan.initialized_rows = mean_subtoken_init(base, submap, plan.new_tokens);
  plan.freeze_threshold = base.rows();
  plan.unfrozen_layers = std::move(unfrozen_layers);
  return plan;
}

inline constexpr std::string_view kPlanFile = "plan.json";
inline constexpr std::string_view kPlanRowsFile = "initialized_rows.arte";

inline nlohmann::ordered_json plan_to_json(const ExtensionPlan& plan) {
  nlohmann::ordered_json j;
  j["format"] = "aratok.extension_plan";
  j["version"] = 1;
  j["freeze_threshold"] = plan.freeze_threshold;
  j["unfrozen_layers"] = plan.unfrozen_layers;
  j["embedding_dim"] = plan.initialized_rows.dim();
  j["initialized_rows"] = kPlanRowsFile;
  auto tokens = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < plan.new_tokens.size(); ++k) {
    nlohmann::ordered_json t;
    t["id"] = plan.freeze_threshold + k;
    t["text"] = plan.new_tokens[k].text;
    t["lstrip"] = plan.new_tokens[k].lstrip;
    tokens.push_back(std::move(t));
  }
  j["new_tokens"] = std::move(tokens);
  return j;
}

// Writes dir/plan.json and dir/initialized_rows.arte, creating dir.
inline void save_plan(const std::filesystem::path& dir, const ExtensionPlan& plan) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  std::ofstream out(dir / kPlanFile, std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / kPlanFile).string());
  out << plan_to_json(plan).dump(1) << '\n';
  if (!out) throw DataError("failed writing " + (dir / kPlanFile).string());
  write_arte_file((dir / kPlanRowsFile).string(), plan.initialized_rows);
}

inline ExtensionPlan load_plan(const std::filesystem::path& dir) {
  std::ifstream in(dir / kPlanFile, std::ios::binary);
  if (!in) throw DataError("cannot open " + (dir / kPlanFile).string());
  ExtensionPlan plan;
  try {
    const auto j = nlohmann::ordered_json::parse(in);
    if (j.at("format") != "aratok.extension_plan" || j.at("version") != 1) {
      throw DataError("unsupported plan format");
    }
    plan.freeze_threshold = j.at("freeze_threshold").get<std::uint64_t>();
    plan.unfrozen_layers = j.at("unfrozen_layers").get<std::vector<int>>();
    for (const auto& t : j.at("new_tokens")) {
      plan.new_tokens.push_back({t.at("text").get<std::string>(), t.at("lstrip").get<bool>()});
    }
    plan.initialized_rows =
        read_arte_file((dir / j.at("initialized_rows").get<std::string>()).string());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed plan: ") + e.what());
  }
  if (plan.initialized_rows.rows() != plan.new_tokens.size()) {
    throw DataError("plan lists " + std::to_string(plan.new_tokens.size()) +
                    " tokens but has " + std::to_string(plan.initialized_rows.rows()) + " rows");
  }
  return plan;
}

}  // namespace aratok

#endif  // ARATOK_LEP_HPP_
