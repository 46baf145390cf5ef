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

#include "corpusalign/sim_transcriber.h"

#include <gtest/gtest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "corpusalign/errors.h"
#include "corpusalign/metrics.h"
#include "corpusalign/rng.h"
#include "corpusalign/synth.h"

namespace corpusalign {
namespace {

std::u32string RandomText(uint64_t seed, std::size_t chars) {
  static const WordSource words(17);
  Rng rng(seed);
  return words.Text(rng, chars);
}

double ChannelCer(const NoiseParams& p, std::size_t chars) {
  std::size_t edits = 0, total = 0;
  for (uint64_t pos = 0; total < chars; ++pos) {
    const auto truth = RandomText(pos, 500);
    edits += Levenshtein(truth, Transcribe(truth, p, pos));
    total += truth.size();
  }
  return static_cast<double>(edits) / static_cast<double>(total);
}

TEST(TranscribeTest, NoiselessChannelIsIdentity) {
  const auto text = RandomText(1, 1000);
  EXPECT_EQ(Transcribe(text, NoiseParams{}, 0), text);
  EXPECT_EQ(Transcribe(U"", NoiseParams{}, 0), U"");
}

TEST(TranscribeTest, SubstitutionRateCalibrated) {
  NoiseParams p;
  p.sub_rate = 0.1;
  p.seed = 3;
  EXPECT_NEAR(ChannelCer(p, 10'000), 0.1, 0.02);
}

TEST(TranscribeTest, MixedRatesCalibrated) {
  for (double total : {0.05, 0.1, 0.2}) {
    EXPECT_NEAR(ChannelCer(MixedNoise(total, 4), 100'000), total, 0.02)
        << total;
  }
}

TEST(TranscribeTest, NearCertainDeletionEmptiesText) {
  NoiseParams p;
  p.del_rate = 0.999999;
  int empty = 0;
  for (uint64_t pos = 0; pos < 1000; ++pos) {
    empty += Transcribe(U"ab", p, pos).empty();
  }
  EXPECT_GE(empty, 995);
  EXPECT_EQ(Cer(U"", U"ab").value(), 1.0);
}

TEST(TranscribeTest, KeyedBySeedAndStreamPosition) {
  const auto text = RandomText(2, 400);
  const NoiseParams p = MixedNoise(0.2, 11);
  const auto a = Transcribe(text, p, 5);
  EXPECT_EQ(Transcribe(text, p, 5), a);
  EXPECT_NE(Transcribe(text, p, 6), a);
  NoiseParams q = p;
  q.seed = 12;
  EXPECT_NE(Transcribe(text, q, 5), a);
}

TEST(TranscribeTest, IndependentOfEvaluationOrderAndThreads) {
  const NoiseParams p = MixedNoise(0.3, 1);
  std::vector<std::u32string> texts;
  for (int i = 0; i < 64; ++i) texts.push_back(RandomText(i, 200));
  std::vector<std::u32string> forward(texts.size()), backward(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    forward[i] = Transcribe(texts[i], p, i);
  }
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = texts.size(); i-- > 0;) {
        if (i % 4 == static_cast<std::size_t>(t)) {
          backward[i] = Transcribe(texts[i], p, i);
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(forward, backward);
}

TEST(NoiseParamsTest, Validation) {
  NoiseParams p;
  p.sub_rate = 0.6;
  p.del_rate = 0.5;
  EXPECT_THROW(p.Validate(), ConfigError);
  p = {};
  p.ins_rate = -0.1;
  EXPECT_THROW(p.Validate(), ConfigError);
  p = {};
  p.sub_rate = 0.1;
  p.alphabet.clear();
  EXPECT_THROW(p.Validate(), ConfigError);
  EXPECT_THROW(Transcribe(U"abc", p, 0), ConfigError);
}

TEST(NoiseParamsTest, ScaledKeepsProportionsAndStaysBelowOne) {
  const NoiseParams p = MixedNoise(0.4, 0);
  const NoiseParams half = p.Scaled(0.5);
  EXPECT_DOUBLE_EQ(half.sub_rate, 0.1);
  EXPECT_DOUBLE_EQ(half.ins_rate, 0.05);
  const NoiseParams big = p.Scaled(10.0);
  EXPECT_LT(big.total_rate(), 1.0);
  EXPECT_NO_THROW(big.Validate());
}

LearningCurve Curve(double initial, double floor, double halving) {
  LearningCurve c;
  c.initial = MixedNoise(initial, 0);
  c.floor_rate = floor;
  c.halving_hours = halving;
  return c;
}

TEST(LearningCurveTest, ZeroHoursGivesInitialRates) {
  const auto c = Curve(0.3, 0.05, 10);
  EXPECT_EQ(ImprovedParams(c, 0.0), c.initial);
}

TEST(LearningCurveTest, OneHalfLifeHalvesRatesWithZeroFloor) {
  const auto c = Curve(0.3, 0.0, 10);
  const auto p = ImprovedParams(c, 10.0);
  EXPECT_DOUBLE_EQ(p.sub_rate, c.initial.sub_rate / 2);
  EXPECT_DOUBLE_EQ(p.ins_rate, c.initial.ins_rate / 2);
  EXPECT_DOUBLE_EQ(p.del_rate, c.initial.del_rate / 2);
}

TEST(LearningCurveTest, ApproachesFloor) {
  const auto c = Curve(0.3, 0.05, 10);
  EXPECT_NEAR(ImprovedParams(c, 1e4).total_rate(), 0.05, 1e-6);
}

TEST(LearningCurveTest, MonotoneNonIncreasingAndBoundedByFloor) {
  const auto c = Curve(0.45, 0.05, 20);
  double previous = 1.0;
  for (double h = 0; h <= 500; h += 2.5) {
    const double rate = ImprovedParams(c, h).total_rate();
    EXPECT_LE(rate, previous + 1e-15) << h;
    EXPECT_GE(rate, 0.05 - 1e-12) << h;
    previous = rate;
  }
  EXPECT_THROW(ImprovedParams(c, -1.0), ValidationError);
}

TEST(SimTranscriberTest, DifficultyScalesErrorRate) {
  const SimTrainer trainer(Curve(0.1, 0.0, 10));
  const auto t = trainer.Train(0.0);
  std::size_t easy_edits = 0, hard_edits = 0, chars = 0;
  for (uint64_t i = 0; i < 200; ++i) {
    PoolItem item;
    item.true_text = RandomText(i, 300);
    item.id = i;
    item.difficulty = 1.0;
    easy_edits += Levenshtein(item.true_text, t->Transcribe(item, i));
    item.difficulty = 2.0;
    hard_edits += Levenshtein(item.true_text, t->Transcribe(item, i));
    chars += item.true_text.size();
  }
  EXPECT_NEAR(static_cast<double>(easy_edits) / chars, 0.1, 0.02);
  EXPECT_NEAR(static_cast<double>(hard_edits) / chars, 0.2, 0.03);
}

}  // namespace
}  // namespace corpusalign
