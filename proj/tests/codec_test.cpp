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


#include "aratok/codec.hpp"

#include <gtest/gtest.h>

#include <random>

#include "aratok/experiment.hpp"
#include "test_util.hpp"
#include "viterbi_oracle.hpp"

namespace aratok {
namespace {

using testing::make_unigram;
using testing::marked;
using testing::uniform;
using testing::Best;
using testing::enumerate;

std::vector<std::string> pieces_of(const TokenizerModel& m, const Segmentation& seg) {
  std::vector<std::string> out;
  for (const auto& p : seg) out.push_back(m.piece(p.id));
  return out;
}

std::vector<std::string> specials_plus(std::vector<std::string> rest) {
  std::vector<std::string> v(kSpecialTokens.begin(), kSpecialTokens.end());
  v.insert(v.end(), rest.begin(), rest.end());
  return v;
}

TEST(Viterbi, PrefersTheLikelierSegmentation) {
  const auto m = make_unigram({{marked("a"), 0.4}, {"b", 0.4}, {marked("ab"), 0.2}});
  EXPECT_EQ(pieces_of(m, viterbi_segment(m, "ab")), std::vector<std::string>{marked("ab")});
  const auto ids = encode(m, "ab ab");
  EXPECT_EQ(ids, (std::vector<TokenId>{*m.id_of(marked("ab")), *m.id_of(marked("ab"))}));
}

TEST(Viterbi, SingleCharacterAndUnknowns) {
  const auto m = make_unigram({{marked("a"), 0.5}, {"b", 0.5}});
  EXPECT_EQ(pieces_of(m, viterbi_segment(m, "a")), std::vector<std::string>{marked("a")});
  const auto seg = viterbi_segment(m, "axb");
  ASSERT_EQ(seg.size(), 3u);
  EXPECT_EQ(seg[1].id, kUnkId);
  EXPECT_EQ(seg[1].surface, "x");
  EXPECT_DOUBLE_EQ(Codec(m).score(seg), std::log(0.5) * 2 + m.unk_penalty());
}

TEST(Viterbi, RejectsOtherAlgorithms) {
  const TokenizerModel wp(Algorithm::WordPiece, specials_plus({"a"}), {}, {}, {});
  EXPECT_THROW(viterbi_segment(wp, "a"), ConfigError);
}

TEST(Viterbi, MatchesExhaustiveEnumerationIncludingTieBreaks) {
  std::mt19937_64 rng(31);
  const std::u32string alphabet = U"abcdef";
  for (int trial = 0; trial < 1500; ++trial) {
    const auto k = uniform(rng, 1, alphabet.size());
    std::set<std::string> pieces;
    const auto n_pieces = uniform(rng, 1, 14);
    for (std::uint64_t i = 0; i < n_pieces; ++i) {
      std::u32string p;
      const auto len = uniform(rng, 1, 4);
      for (std::uint64_t j = 0; j < len; ++j) p.push_back(alphabet[uniform(rng, 0, k - 1)]);
      pieces.insert(uniform(rng, 0, 1) ? marked(utf8::encode(p)) : utf8::encode(p));
    }
    // Small integer log-probabilities: sums are exact, so ties are real
    // ties and the tie-break order is checked too.
    std::vector<std::pair<std::string, double>> spec;
    for (const auto& p : pieces) spec.emplace_back(p, -static_cast<double>(uniform(rng, 1, 4)));
    const auto m = testing::make_unigram_lp(spec);
    const Codec codec(m);
    std::u32string w;
    const auto len = uniform(rng, 1, 9);
    for (std::uint64_t j = 0; j < len; ++j) w.push_back(alphabet[uniform(rng, 0, k - 1)]);
    std::vector<TokenId> scratch;
    Best best;
    enumerate(m, w, 0, 0.0, scratch, best);
    const auto seg = codec.segment_word(utf8::encode(w));
    ASSERT_EQ(codec.score(seg), best.score) << "trial " << trial;
    std::vector<TokenId> got;
    for (const auto& p : seg) got.push_back(p.id);
    ASSERT_EQ(got, best.ids) << "trial " << trial;
  }
}

TEST(BpeEncode, ReplaysMergesLeftToRight) {
  const TokenizerModel m(Algorithm::Bpe, specials_plus({marked("a"), "a", marked("aa")}), {},
                         {{marked("a"), "a"}}, {});
  EXPECT_EQ(pieces_of(m, Codec(m).segment_word("aaa")),
            (std::vector<std::string>{marked("aa"), "a"}));
  const TokenizerModel inner(Algorithm::Bpe, specials_plus({marked("a"), "a", "aa"}), {},
                             {{"a", "a"}}, {});
  EXPECT_EQ(pieces_of(inner, Codec(inner).segment_word("aaaa")),
            (std::vector<std::string>{marked("a"), "aa", "a"}));
}

TEST(BpeEncode, MergeOrderFollowsRankNotPosition) {
  const TokenizerModel m(
      Algorithm::Bpe, specials_plus({marked("a"), "b", "c", "bc", marked("ab")}), {},
      {{"b", "c"}, {marked("a"), "b"}}, {});
  EXPECT_EQ(pieces_of(m, Codec(m).segment_word("abc")),
            (std::vector<std::string>{marked("a"), "bc"}));
}

TEST(BpeEncode, UnknownCharactersBecomeUnk) {
  const TokenizerModel m(Algorithm::Bpe, specials_plus({marked("a"), "b"}), {}, {}, {});
  const auto seg = Codec(m).segment_word("abz");
  ASSERT_EQ(seg.size(), 3u);
  EXPECT_EQ(seg[2].id, kUnkId);
  EXPECT_EQ(seg[2].surface, "z");
}

TEST(WordPieceEncode, GreedyLongestMatch) {
  const TokenizerModel m(Algorithm::WordPiece,
                         specials_plus({"a", "ab", "abc", "##b", "##c", "##cd", "##d"}), {}, {}, {});
  const Codec codec(m);
  EXPECT_EQ(pieces_of(m, codec.segment_word("abcd")), (std::vector<std::string>{"abc", "##d"}));
  EXPECT_EQ(pieces_of(m, codec.segment_word("abd")), (std::vector<std::string>{"ab", "##d"}));
  const auto unk = codec.segment_word("abx");
  ASSERT_EQ(unk.size(), 1u);
  EXPECT_EQ(unk[0].id, kUnkId);
  EXPECT_EQ(unk[0].surface, "abx");
}

TEST(Decode, Basics) {
  const auto m = make_unigram({{marked("a"), 0.5}, {"b", 0.5}});
  EXPECT_EQ(decode(m, std::vector<TokenId>{}), "");
  EXPECT_EQ(decode(m, std::vector<TokenId>{kUnkId}), "⁇");
  EXPECT_EQ(decode(m, std::vector<TokenId>{1, 4, 5, 3, 4, 2}), "ab a");
  try {
    decode(m, std::vector<TokenId>{4, 99});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("position 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(decode(m, std::vector<TokenId>{-1}), DataError);
}

TEST(Decode, WordPieceGluesContinuations) {
  const TokenizerModel m(Algorithm::WordPiece, specials_plus({"ab", "##c", "d"}), {}, {}, {});
  const Codec codec(m);
  EXPECT_EQ(codec.decode(codec.encode("abc d")), "abc d");
  EXPECT_EQ(codec.decode(codec.encode("zz abc")), "⁇ abc");
}

TEST(Encode, EmptyTextAndNormalizationSwitch) {
  const auto m = make_unigram({{marked("ا"), 0.5}, {marked("أ"), 0.5}});
  const Codec codec(m);
  EXPECT_TRUE(codec.encode("").empty());
  EXPECT_EQ(codec.encode("أ"), std::vector<TokenId>{*m.id_of(marked("ا"))});
  EXPECT_EQ(codec.encode("أ", {false}), std::vector<TokenId>{*m.id_of(marked("أ"))});
}

class RoundTrip : public ::testing::TestWithParam<Algorithm> {};

TEST_P(RoundTrip, DecodeInvertsEncodeOnCorpusLines) {
  auto lines = read_lines_file(testing::data_path("corpus/quran_uthmani.txt"));
  lines.resize(400);
  const NormalizationConfig norm;
  const auto model = train(GetParam(), ingest(lines, norm), 600, {}, norm);
  const Codec codec(model);
  const Normalizer n(norm);
  for (const auto& line : lines) {
    const auto ids = codec.encode(line);
    std::string expected;
    for (const auto& w : pre_tokenize(n.normalize(line))) expected += (expected.empty() ? "" : " ") + w;
    ASSERT_EQ(codec.decode(ids), expected);
  }
}

TEST_P(RoundTrip, EncodingIsIndependentOfContext) {
  auto lines = read_lines_file(testing::data_path("corpus/quran_imlaei.txt"));
  lines.resize(200);
  const NormalizationConfig norm;
  const auto model = train(GetParam(), ingest(lines, norm), 500, {}, norm);
  const Codec codec(model);
  for (std::size_t i = 0; i < 50; ++i) {
    std::vector<TokenId> pieced;
    const auto words = pre_tokenize(codec.normalizer().normalize(lines[i]));
    for (const auto& w : words) {
      const auto ids = codec.encode(w);
      ASSERT_GE(ids.size(), 1u);
      pieced.insert(pieced.end(), ids.begin(), ids.end());
    }
    ASSERT_EQ(codec.encode(lines[i]), pieced);
  }
}

INSTANTIATE_TEST_SUITE_P(AllAlgorithms, RoundTrip,
                         ::testing::Values(Algorithm::Unigram, Algorithm::Bpe,
                                           Algorithm::WordPiece),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
}  // namespace aratok
