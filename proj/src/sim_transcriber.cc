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

#include <algorithm>
#include <cmath>

#include "corpusalign/errors.h"
#include "corpusalign/rng.h"

namespace corpusalign {
namespace {

char32_t DrawOther(Rng& rng, const std::u32string& alphabet, char32_t avoid) {
  const bool present = alphabet.find(avoid) != std::u32string::npos;
  const std::size_t choices = alphabet.size() - (present ? 1 : 0);
  if (choices == 0) return avoid;
  std::size_t k = rng.Below(choices);
  for (char32_t c : alphabet) {
    if (c == avoid) continue;
    if (k-- == 0) return c;
  }
  return avoid;
}

}  // namespace

void NoiseParams::Validate() const {
  for (double r : {sub_rate, ins_rate, del_rate}) {
    if (!(r >= 0.0 && r < 1.0)) {
      throw ConfigError("noise rates must lie in [0, 1)");
    }
  }
  if (!(total_rate() < 1.0)) {
    throw ConfigError("noise rates must sum to less than 1");
  }
  if ((sub_rate > 0.0 || ins_rate > 0.0) && alphabet.empty()) {
    throw ConfigError("substitution or insertion needs a non-empty alphabet");
  }
}

NoiseParams NoiseParams::Scaled(double factor) const {
  NoiseParams out = *this;
  const double total = total_rate();
  double f = std::max(0.0, factor);
  constexpr double kCap = 0.95;
  if (total * f > kCap) f = kCap / total;
  out.sub_rate *= f;
  out.ins_rate *= f;
  out.del_rate *= f;
  return out;
}

std::u32string Transcribe(std::u32string_view true_text,
                          const NoiseParams& params, uint64_t stream_pos) {
  params.Validate();
  std::u32string out;
  out.reserve(true_text.size() + true_text.size() / 8);
  if (params.total_rate() == 0.0) return std::u32string(true_text);
  Rng rng(params.seed, stream_pos);
  const double del = params.del_rate;
  const double sub = del + params.sub_rate;
  const double ins = sub + params.ins_rate;
  for (char32_t c : true_text) {
    const double u = rng.Uniform();
    if (u < del) continue;
    if (u < sub) {
      out.push_back(DrawOther(rng, params.alphabet, c));
    } else if (u < ins) {
      out.push_back(c);
      out.push_back(params.alphabet[rng.Below(params.alphabet.size())]);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

void LearningCurve::Validate() const {
  initial.Validate();
  if (!(floor_rate >= 0.0 && floor_rate < 1.0)) {
    throw ConfigError("learning curve floor must lie in [0, 1)");
  }
  if (!(halving_hours > 0.0)) {
    throw ConfigError("learning curve halving_hours must be positive");
  }
}

NoiseParams ImprovedParams(const LearningCurve& curve, double retained_hours) {
  curve.Validate();
  if (retained_hours < 0.0) {
    throw ValidationError("retained hours must be non-negative");
  }
  const double total = curve.initial.total_rate();
  if (retained_hours == 0.0 || total <= curve.floor_rate) {
    return curve.initial;
  }
  const double decay = std::exp2(-retained_hours / curve.halving_hours);
  const double improved = curve.floor_rate + (total - curve.floor_rate) * decay;
  NoiseParams out = curve.initial;
  const double ratio = improved / total;
  out.sub_rate *= ratio;
  out.ins_rate *= ratio;
  out.del_rate *= ratio;
  return out;
}

SimTranscriber::SimTranscriber(NoiseParams params) : params_(std::move(params)) {
  params_.Validate();
}

std::u32string SimTranscriber::Transcribe(const PoolItem& item,
                                          uint64_t stream_pos) const {
  if (item.difficulty == 1.0) {
    return corpusalign::Transcribe(item.true_text, params_, stream_pos);
  }
  return corpusalign::Transcribe(item.true_text,
                                 params_.Scaled(item.difficulty), stream_pos);
}

SimTrainer::SimTrainer(LearningCurve curve) : curve_(std::move(curve)) {
  curve_.Validate();
}

std::unique_ptr<Transcriber> SimTrainer::Train(double retained_hours) const {
  return std::make_unique<SimTranscriber>(
      ImprovedParams(curve_, retained_hours));
}

}  // namespace corpusalign
