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

#ifndef ARATOK_NORMALIZER_HPP_
#define ARATOK_NORMALIZER_HPP_

// Character-level Arabic normalization: optional NFKC followed by a single
// left-to-right pass over a codepoint replacement table.

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aratok/errors.hpp"
#include "aratok/utf8.hpp"

namespace aratok {

enum class AlifMode { Unify, Preserve4 };
enum class DiacriticsMode { Drop, Keep };

struct NormalizationConfig {
  AlifMode alif_mode = AlifMode::Unify;
  DiacriticsMode diacritics = DiacriticsMode::Drop;
  bool map_numerals = true;
  bool map_punctuation = true;
  bool remove_tatweel = true;
  bool apply_nfkc = true;

  // The "raw" baseline: no NFKC, no character rules apart from the chosen
  // diacritics handling, Alif variants preserved.
  static NormalizationConfig unnormalized(DiacriticsMode diacritics) {
    return {AlifMode::Preserve4, diacritics, false, false, false, false};
  }

  friend bool operator==(const NormalizationConfig&,
                         const NormalizationConfig&) = default;
};

namespace codepoints {
inline constexpr char32_t kAlif = 0x0627;
inline constexpr char32_t kAlifMadda = 0x0622;
inline constexpr char32_t kAlifHamzaAbove = 0x0623;
inline constexpr char32_t kAlifHamzaBelow = 0x0625;
inline constexpr char32_t kAlifWasla = 0x0671;
inline constexpr char32_t kTatweel = 0x0640;
inline constexpr char32_t kArabicIndicZero = 0x0660;
inline constexpr char32_t kDecimalSeparator = 0x066B;
inline constexpr char32_t kThousandsSeparator = 0x066C;
inline constexpr char32_t kQuestionMark = 0x061F;
inline constexpr char32_t kSemicolon = 0x061B;
inline constexpr char32_t kComma = 0x060C;
inline constexpr char32_t kFathatan = 0x064B;
inline constexpr char32_t kSukun = 0x0652;
inline constexpr char32_t kSuperscriptAlef = 0x0670;
}  // namespace codepoints

struct Rule {
  char32_t source = 0;
  std::u32string replacement;  // empty means delete

  friend bool operator==(const Rule&, const Rule&) = default;
};

// Ordered replacement rules with unique sources.
class RuleTable {
 public:
  RuleTable() = default;

  explicit RuleTable(std::vector<Rule> rules) : rules_(std::move(rules)) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (!index_.emplace(rules_[i].source, i).second) {
        throw ConfigError("duplicate rule source U+" + hex(rules_[i].source));
      }
    }
  }

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  const std::u32string* find(char32_t cp) const {
    const auto it = index_.find(cp);
    return it == index_.end() ? nullptr : &rules_[it->second].replacement;
  }

  bool contains(char32_t cp) const { return index_.count(cp) != 0; }

  // One pass: replacement text is never re-matched.
  std::string apply(std::string_view text) const {
    std::string out;
    out.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
      const std::size_t start = pos;
      const char32_t cp = utf8::next(text, pos);
      if (const auto* repl = find(cp)) {
        for (char32_t r : *repl) utf8::append(out, r);
      } else if (cp == utf8::kReplacementChar) {
        utf8::append(out, cp);
      } else {
        out.append(text.substr(start, pos - start));
      }
    }
    return out;
  }

 private:
  static std::string hex(char32_t cp) {
    std::ostringstream os;
    os << std::hex << std::uppercase << static_cast<unsigned long>(cp);
    return os.str();
  }

  std::vector<Rule> rules_;
  std::unordered_map<char32_t, std::size_t> index_;
};

// Families are emitted in a fixed order: Alif, numerals, punctuation,
// tatweel, diacritics.
inline RuleTable build_rule_table(const NormalizationConfig& config) {
  namespace cp = codepoints;
  std::vector<Rule> rules;
  const auto add = [&](char32_t from, std::u32string to) {
    rules.push_back({from, std::move(to)});
  };
  if (config.alif_mode == AlifMode::Unify) {
    for (char32_t v : {cp::kAlifHamzaAbove, cp::kAlifHamzaBelow,
                       cp::kAlifMadda, cp::kAlifWasla}) {
      add(v, std::u32string(1, cp::kAlif));
    }
  }
  if (config.map_numerals) {
    for (char32_t d = 0; d < 10; ++d) {
      add(cp::kArabicIndicZero + d, std::u32string(1, U'0' + d));
    }
    add(cp::kDecimalSeparator, U".");
    add(cp::kThousandsSeparator, U",");
  }
  if (config.map_punctuation) {
    add(cp::kQuestionMark, U"?");
    add(cp::kSemicolon, U";");
    add(cp::kComma, U",");
  }
  if (config.remove_tatweel) add(cp::kTatweel, U"");
  if (config.diacritics == DiacriticsMode::Drop) {
    for (char32_t d = cp::kFathatan; d <= cp::kSukun; ++d) add(d, U"");
    add(cp::kSuperscriptAlef, U"");
  }
  return RuleTable(std::move(rules));
}

// Holds a prebuilt table; normalize() is const and safe to share.
class Normalizer {
 public:
  Normalizer() : Normalizer(NormalizationConfig{}) {}

  explicit Normalizer(const NormalizationConfig& config)
      : config_(config), table_(build_rule_table(config)) {
    if (config_.apply_nfkc) {
      UErrorCode status = U_ZERO_ERROR;
      nfkc_ = icu::Normalizer2::getNFKCInstance(status);
      if (U_FAILURE(status)) {
        throw DataError(std::string("ICU NFKC unavailable: ") +
                        u_errorName(status));
      }
    }
  }

  const NormalizationConfig& config() const { return config_; }
  const RuleTable& table() const { return table_; }

  // Deleting a mark or tatweel can leave a sequence that NFKC would compose
  // further, so NFKC and the rule pass alternate until the text is stable.
  // Every round after the first only shortens the text or leaves it
  // unchanged, so this terminates.
  std::string normalize(std::string_view text) const {
    if (nfkc_ == nullptr) return table_.apply(text);
    std::string current = table_.apply(nfkc(text));
    while (!is_nfkc(current)) {
      std::string next = table_.apply(nfkc(current));
      if (next == current) break;
      current = std::move(next);
    }
    return current;
  }

 private:
  std::string nfkc(std::string_view text) const {
    UErrorCode status = U_ZERO_ERROR;
    const auto src = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    const icu::UnicodeString dst = nfkc_->normalize(src, status);
    if (U_FAILURE(status)) {
      throw DataError(std::string("NFKC failed: ") + u_errorName(status));
    }
    std::string out;
    dst.toUTF8String(out);
    return out;
  }

  bool is_nfkc(std::string_view text) const {
    UErrorCode status = U_ZERO_ERROR;
    const auto src = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    const bool ok = nfkc_->isNormalized(src, status);
    return U_SUCCESS(status) && ok;
  }

  NormalizationConfig config_;
  RuleTable table_;
  const icu::Normalizer2* nfkc_ = nullptr;  // owned by ICU
};

inline std::string normalize(std::string_view text,
                             const NormalizationConfig& config) {
  return Normalizer(config).normalize(text);
}

// ---------------------------------------------------------------------------
// Flat `key = value` config files.

inline std::string_view to_string(AlifMode mode) {
  return mode == AlifMode::Unify ? "unify" : "preserve4";
}

inline std::string_view to_string(DiacriticsMode mode) {
  return mode == DiacriticsMode::Drop ? "drop" : "keep";
}

inline AlifMode parse_alif_mode(std::string_view s) {
  if (s == "unify") return AlifMode::Unify;
  if (s == "preserve4") return AlifMode::Preserve4;
  throw ConfigError("alif_mode must be 'unify' or 'preserve4', got '" +
                    std::string(s) + "'");
}

inline DiacriticsMode parse_diacritics_mode(std::string_view s) {
  if (s == "drop") return DiacriticsMode::Drop;
  if (s == "keep") return DiacriticsMode::Keep;
  throw ConfigError("diacritics must be 'drop' or 'keep', got '" +
                    std::string(s) + "'");
}

inline bool parse_bool(std::string_view key, std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("'" + std::string(key) + "' expects a boolean, got '" +
                    std::string(s) + "'");
}

// Applies one key to config. Unknown keys are rejected.
inline void set_config_value(NormalizationConfig& config, std::string_view key,
                             std::string_view value) {
  if (key == "alif_mode") {
    config.alif_mode = parse_alif_mode(value);
  } else if (key == "diacritics") {
    config.diacritics = parse_diacritics_mode(value);
  } else if (key == "map_numerals") {
    config.map_numerals = parse_bool(key, value);
  } else if (key == "map_punctuation") {
    config.map_punctuation = parse_bool(key, value);
  } else if (key == "remove_tatweel") {
    config.remove_tatweel = parse_bool(key, value);
  } else if (key == "apply_nfkc") {
    config.apply_nfkc = parse_bool(key, value);
  } else {
    throw ConfigError("unknown normalization key '" + std::string(key) + "'");
  }
}

inline constexpr std::string_view kConfigKeys[] = {
    "alif_mode",      "diacritics",     "map_numerals",
    "map_punctuation", "remove_tatweel", "apply_nfkc"};

namespace detail {
inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}
}  // namespace detail

// Reads `key = value` lines on top of `base`. Blank lines and lines whose
// first non-blank character is '#' are ignored.
inline NormalizationConfig read_config(std::istream& in,
                                       NormalizationConfig base = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    try {
      set_config_value(base, detail::trim(body.substr(0, eq)),
                       detail::trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return base;
}

inline void write_config(std::ostream& out, const NormalizationConfig& c) {
  const auto b = [](bool v) { return v ? "true" : "false"; };
  out << "alif_mode = " << to_string(c.alif_mode) << '\n'
      << "diacritics = " << to_string(c.diacritics) << '\n'
      << "map_numerals = " << b(c.map_numerals) << '\n'
      << "map_punctuation = " << b(c.map_punctuation) << '\n'
      << "remove_tatweel = " << b(c.remove_tatweel) << '\n'
      << "apply_nfkc = " << b(c.apply_nfkc) << '\n';
}

}  // namespace aratok

#endif  // ARATOK_NORMALIZER_HPP_
