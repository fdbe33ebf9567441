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


#include "aratok/model.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

namespace aratok {
namespace {

using testing::make_unigram;
using testing::marked;

std::vector<std::string> with_specials(std::vector<std::string> rest) {
  std::vector<std::string> v(kSpecialTokens.begin(), kSpecialTokens.end());
  v.insert(v.end(), rest.begin(), rest.end());
  return v;
}

TokenizerModel small_bpe() {
  return TokenizerModel(Algorithm::Bpe, with_specials({marked("a"), "a", "b", marked("ab"), "ab"}),
                        {}, {{marked("a"), "b"}, {"a", "b"}}, {});
}

TEST(TokenizerModel, SpecialsOccupyTheFirstIds) {
  const auto m = make_unigram({{"a", 1.0}});
  EXPECT_EQ(m.piece(0), "<unk>");
  EXPECT_EQ(m.piece(1), "<s>");
  EXPECT_EQ(m.piece(2), "</s>");
  EXPECT_EQ(m.piece(3), "<pad>");
  EXPECT_EQ(m.unk_id(), 0);
  EXPECT_EQ(m.id_of("a"), 4);
  EXPECT_FALSE(m.id_of("b").has_value());
}

TEST(TokenizerModel, RejectsBrokenVocabularies) {
  EXPECT_THROW(TokenizerModel(Algorithm::WordPiece, {"a", "b"}, {}, {}, {}), DataError);
  EXPECT_THROW(TokenizerModel(Algorithm::WordPiece, with_specials({"a", "a"}), {}, {}, {}),
               DataError);
  EXPECT_THROW(TokenizerModel(Algorithm::WordPiece, with_specials({""}), {}, {}, {}), DataError);
  EXPECT_THROW(TokenizerModel(Algorithm::WordPiece, with_specials({"##"}), {}, {}, {}), DataError);
  EXPECT_THROW(TokenizerModel(Algorithm::Unigram, with_specials({marked("")}),
                              {0, 0, 0, 0, -1}, {}, {}),
               DataError);
}

TEST(TokenizerModel, UnigramNeedsFiniteAlignedLogprobs) {
  EXPECT_THROW(TokenizerModel(Algorithm::Unigram, with_specials({"a"}), {0, 0, 0, 0}, {}, {}),
               DataError);
  EXPECT_THROW(TokenizerModel(Algorithm::Unigram, with_specials({"a"}),
                              {0, 0, 0, 0, -std::numeric_limits<double>::infinity()}, {}, {}),
               DataError);
  EXPECT_THROW(TokenizerModel(Algorithm::Bpe, with_specials({"a"}), {0, 0, 0, 0, 0}, {}, {}),
               DataError);
}

TEST(TokenizerModel, UnkPenaltyIsTenBelowTheWorstPiece) {
  const auto m = make_unigram({{"a", 0.5}, {"b", 0.25}});
  EXPECT_DOUBLE_EQ(m.unk_penalty(), std::log(0.25) - 10.0);
}

TEST(TokenizerModel, BpeMergesMustReplay) {
  EXPECT_NO_THROW(small_bpe());
  // Operand not yet reachable.
  EXPECT_THROW(TokenizerModel(Algorithm::Bpe, with_specials({"a", "b", "ab", "abb"}), {},
                              {{"ab", "b"}, {"a", "b"}}, {}),
               DataError);
  // Token nobody produces.
  EXPECT_THROW(TokenizerModel(Algorithm::Bpe, with_specials({"a", "b", "ab"}), {}, {}, {}),
               DataError);
  // Product produced twice.
  EXPECT_THROW(TokenizerModel(Algorithm::Bpe, with_specials({"a", "aa", "aaa", "aaaa"}), {},
                              {{"a", "a"}, {"aa", "a"}, {"aa", "aa"}, {"aaa", "a"}}, {}),
               DataError);
  EXPECT_THROW(TokenizerModel(Algorithm::Unigram, with_specials({"a"}), {0, 0, 0, 0, 0},
                              {{"a", "a"}}, {}),
               DataError);
}

TEST(TokenizerModel, MarkerSchemes) {
  const auto bpe = small_bpe();
  EXPECT_TRUE(bpe.is_word_initial(*bpe.id_of(marked("ab"))));
  EXPECT_FALSE(bpe.is_word_initial(*bpe.id_of("ab")));
  EXPECT_EQ(bpe.surface(*bpe.id_of(marked("ab"))), "ab");
  EXPECT_TRUE(bpe.is_single_char(*bpe.id_of(marked("a"))));

  const TokenizerModel wp(Algorithm::WordPiece, with_specials({"a", "##a", "ab"}), {}, {}, {});
  EXPECT_TRUE(wp.is_word_initial(*wp.id_of("ab")));
  EXPECT_FALSE(wp.is_word_initial(*wp.id_of("##a")));
  EXPECT_EQ(wp.surface(*wp.id_of("##a")), "a");
  EXPECT_FALSE(wp.is_single_char(0));
}

TEST(ModelJson, RoundTripsBitExactly) {
  NormalizationConfig norm;
  norm.alif_mode = AlifMode::Preserve4;
  norm.apply_nfkc = false;
  const std::vector<TokenizerModel> models = {
      make_unigram({{marked("ab"), 0.1}, {"a", 1.0 / 3.0}, {"b", 0.1234567890123456789}}, norm),
      small_bpe(),
      TokenizerModel(Algorithm::WordPiece, with_specials({"a", "##b", "ab"}), {}, {}, norm)};
  for (const auto& m : models) {
    const auto text = model_to_string(m);
    const auto back = load_model(text);
    EXPECT_EQ(back, m);
    EXPECT_EQ(model_to_string(back), text);
    std::istringstream in(text);
    EXPECT_EQ(load_model(in), m);
  }
}

TEST(ModelJson, DocumentLayout) {
  const auto j = model_to_json(small_bpe());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"format", "version", "algorithm", "marker_scheme",
                                             "unk_id", "special_tokens", "normalization",
                                             "vocab", "merges"}));
  EXPECT_EQ(j["marker_scheme"]["kind"], "word_boundary");
  EXPECT_EQ(j["algorithm"], "bpe");
}

TEST(ModelJson, MalformedDocumentsAreDataErrors) {
  EXPECT_THROW(load_model("{"), DataError);
  EXPECT_THROW(load_model("{}"), DataError);
  auto j = model_to_json(small_bpe());
  j["algorithm"] = "lstm";
  EXPECT_THROW(model_from_json(j), DataError);
  j = model_to_json(small_bpe());
  j["normalization"]["alif_mode"] = "sometimes";
  EXPECT_THROW(model_from_json(j), DataError);
  j = model_to_json(small_bpe());
  j["merges"].erase(0);
  EXPECT_THROW(model_from_json(j), DataError);
}

}  // namespace
}  // namespace aratok
