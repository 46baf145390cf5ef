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

#ifndef CORPUSALIGN_SIM_TRANSCRIBER_H_
#define CORPUSALIGN_SIM_TRANSCRIBER_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "corpusalign/segmenter.h"

namespace corpusalign {

// Noisy character channel standing in for an ASR model.
struct NoiseParams {
  double sub_rate = 0.0;
  double ins_rate = 0.0;
  double del_rate = 0.0;
  // Substituted and inserted characters are drawn uniformly from here.
  std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyz ";
  uint64_t seed = 0;

  double total_rate() const { return sub_rate + ins_rate + del_rate; }
  // Throws ConfigError unless each rate is in [0, 1) and the sum is < 1.
  void Validate() const;
  // Same channel with every rate multiplied by `factor`, capped so the total
  // stays below 1.
  NoiseParams Scaled(double factor) const;

  bool operator==(const NoiseParams&) const = default;
};

// Per character, with one uniform draw u: u < del deletes it; u < del + sub
// replaces it by a different alphabet symbol; u < del + sub + ins keeps it
// and inserts a random symbol after it. Draws come from a generator keyed by
// (params.seed, stream_pos), so a hypothesis never depends on call order.
std::u32string Transcribe(std::u32string_view true_text,
                          const NoiseParams& params, uint64_t stream_pos);

// Error rate as a function of hours of retained training data:
// floor + (initial - floor) * 2^(-hours / halving_hours), applied to the
// total rate with the sub/ins/del proportions kept.
struct LearningCurve {
  NoiseParams initial;
  double floor_rate = 0.0;
  double halving_hours = 1.0;

  void Validate() const;
};

NoiseParams ImprovedParams(const LearningCurve& curve, double retained_hours);

// What the refinement loop needs from an ASR system. The simulator reads the
// true text of a pool item; a real model would read the audio it points to.
struct PoolItem {
  Segment segment;
  std::string audio_ref;
  std::u32string true_text;
  // Acoustic difficulty: the simulator multiplies its error rates by this.
  double difficulty = 1.0;
  uint64_t id = 0;
};

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::u32string Transcribe(const PoolItem& item,
                                    uint64_t stream_pos) const = 0;
};

// Produces the transcriber for the next pass given cumulative retained hours.
class TranscriberTrainer {
 public:
  virtual ~TranscriberTrainer() = default;
  virtual std::unique_ptr<Transcriber> Train(double retained_hours) const = 0;
};

class SimTranscriber : public Transcriber {
 public:
  explicit SimTranscriber(NoiseParams params);
  const NoiseParams& params() const { return params_; }
  std::u32string Transcribe(const PoolItem& item,
                            uint64_t stream_pos) const override;

 private:
  NoiseParams params_;
};

class SimTrainer : public TranscriberTrainer {
 public:
  explicit SimTrainer(LearningCurve curve);
  std::unique_ptr<Transcriber> Train(double retained_hours) const override;

 private:
  LearningCurve curve_;
};

}  // namespace corpusalign

#endif  // CORPUSALIGN_SIM_TRANSCRIBER_H_
