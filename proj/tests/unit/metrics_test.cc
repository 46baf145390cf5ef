// Copyright 2026 The corpusalign Authors
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

#include "corpusalign/metrics.h"

#include <gtest/gtest.h>

#include "corpusalign/errors.h"
#include "support/oracles.h"

namespace corpusalign {
namespace {

using testing::OracleDistance;
using testing::RandomString;

TEST(LevenshteinTest, NamedExamples) {
  EXPECT_EQ(Levenshtein(U"", U""), 0u);
  EXPECT_EQ(Levenshtein(U"abc", U"abc"), 0u);
  EXPECT_EQ(Levenshtein(U"kitten", U"sitting"), 3u);
  EXPECT_EQ(OracleDistance(U"kitten", U"sitting"), 3u);
  EXPECT_EQ(Levenshtein(U"", U"abc"), 3u);
}

TEST(LevenshteinTest, CountsScalarValuesNotBytes) {
  // Each Arabic letter is one edit, not two UTF-8 bytes.
  EXPECT_EQ(Levenshtein(U"كتب", U"كتاب"), 1u);
  EXPECT_EQ(Levenshtein(U"\U0001F600", U"a"), 1u);
}

TEST(LevenshteinTest, RandomTriplesAgreeWithOracleAndAreMetric) {
  uint64_t state = 42;
  for (int i = 0; i < 1000; ++i) {
    const auto a = RandomString(state, state % 21, U"abcd");
    const auto b = RandomString(state, (state >> 7) % 21, U"abcd");
    const auto c = RandomString(state, (state >> 13) % 21, U"abcd");
    const std::size_t ab = Levenshtein(a, b);
    ASSERT_EQ(ab, OracleDistance(a, b)) << i;
    ASSERT_EQ(ab, Levenshtein(b, a));
    ASSERT_EQ(ab == 0, a == b);
    ASSERT_LE(Levenshtein(a, c), ab + Levenshtein(b, c));
  }
}

TEST(CerTest, Examples) {
  EXPECT_EQ(Cer(U"abc", U"abc").value(), 0.0);
  const CerValue one_third = Cer(U"abd", U"abc");
  EXPECT_EQ(one_third.edit_distance, 1u);
  EXPECT_EQ(one_third.ref_len, 3u);
  EXPECT_DOUBLE_EQ(one_third.value(), 1.0 / 3.0);
  EXPECT_EQ(Cer(U"", U"abc").value(), 1.0);
}

TEST(CerTest, MayExceedOne) {
  EXPECT_EQ(Cer(U"abcdef", U"x").value(), 6.0);
}

TEST(CerTest, EmptyReferenceIsRejected) {
  EXPECT_THROW(Cer(U"abc", U""), ValidationError);
}

TEST(CerTest, RetentionIsStrict) {
  EXPECT_FALSE(IsRetained(CerValue{3, 10}, 0.3));
  EXPECT_TRUE(IsRetained(CerValue{2, 10}, 0.3));
  EXPECT_FALSE(IsRetained(CerValue{30, 100}, 0.3));
  EXPECT_TRUE(IsRetained(CerValue{299, 1000}, 0.3));
}

TEST(CerTest, CompareRateIsExact) {
  EXPECT_TRUE(CompareRate(CerValue{1, 3}, CerValue{2, 6}) == 0);
  EXPECT_TRUE(CompareRate(CerValue{1, 4}, CerValue{1, 3}) < 0);
  EXPECT_TRUE(CompareRate(CerValue{3, 10}, CerValue{299, 1000}) > 0);
}

TEST(BandedLevenshteinTest, Examples) {
  EXPECT_EQ(BandedLevenshtein(U"abc", U"abc", 1), 0u);
  EXPECT_EQ(BandedLevenshtein(U"kitten", U"sitting", 3), 3u);
  EXPECT_EQ(BandedLevenshtein(U"kitten", U"sitting", 2), std::nullopt);
}

TEST(BandedLevenshteinTest, ExactWithinBandOtherwiseExceeds) {
  uint64_t state = 9;
  for (int i = 0; i < 1000; ++i) {
    const auto a = RandomString(state, state % 21, U"abcd");
    const auto b = RandomString(state, (state >> 9) % 21, U"abcd");
    const std::size_t d = OracleDistance(a, b);
    for (std::size_t band = 1; band <= 21; ++band) {
      const auto got = BandedLevenshtein(a, b, band);
      if (d <= band) {
        ASSERT_EQ(got, d) << i << " band " << band;
      } else {
        ASSERT_EQ(got, std::nullopt) << i << " band " << band;
      }
    }
  }
}

}  // namespace
}  // namespace corpusalign
