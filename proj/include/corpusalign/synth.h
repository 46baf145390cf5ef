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

#ifndef CORPUSALIGN_SYNTH_H_
#define CORPUSALIGN_SYNTH_H_

// Seeded synthetic data: word streams, planted alignment cases and whole
// sessions (speech regions, segments, true text, transcript). Stands in for
// recorded audio and published transcripts in tests and benchmarks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corpusalign/aligner.h"
#include "corpusalign/pairing.h"
#include "corpusalign/refinement.h"
#include "corpusalign/rng.h"
#include "corpusalign/segmenter.h"
#include "corpusalign/sim_transcriber.h"

namespace corpusalign {

// A fixed random vocabulary of lowercase words sampled with Zipf-like
// frequencies, so frequent words repeat across a document.
class WordSource {
 public:
  explicit WordSource(uint64_t seed, std::size_t vocabulary_size = 3000);

  // Space-separated words, at least `min_chars` long (and at least one
  // word).
  std::u32string Text(Rng& rng, std::size_t min_chars) const;

 private:
  std::vector<std::u32string> words_;
  std::vector<double> cumulative_;
};

// Channel with the given total error rate, split 2:1:1 between
// substitutions, insertions and deletions.
NoiseParams MixedNoise(double total_rate, uint64_t seed);

struct PlantedCase {
  std::u32string doc;
  TextRange span;  // where the true text sits in doc
  std::u32string hypothesis;
};

// A document of about `doc_chars` characters with a word-aligned span of
// about `span_chars` characters, and a noisy copy of that span.
PlantedCase MakePlantedCase(const WordSource& words, Rng& rng,
                            std::size_t doc_chars, std::size_t span_chars,
                            double noise_rate);

struct CorpusParams {
  uint64_t seed = 1;
  std::size_t session_count = 1;
  Duration session_length = std::chrono::minutes(30);
  // Each session's length is drawn uniformly from
  // session_length * [1 - spread, 1 + spread].
  double session_length_spread = 0.0;
  double chars_per_second = 12.0;
  // Segments whose speech never made it into the transcript.
  double unalignable_fraction = 0.05;
  // Share of acoustically hard segments (difficulty in [1.5, 4]); the rest
  // fall in [0.5, 1.5].
  double hard_fraction = 0.2;
  // Chance of untranscribed-in-audio text (headings, notes) between two
  // segments in the transcript.
  double filler_probability = 0.1;
  std::size_t vocabulary_size = 3000;
  std::string language = "xx";
  std::string source_id = "synthetic";
  SegmenterParams segmenter;

  // Throws ConfigError.
  void Validate() const;
};

struct SyntheticSession {
  std::string session_id;
  Date date;
  std::vector<SpeechRegion> regions;
  SegmentationResult segmentation;
  // Parallel to segmentation.segments.
  std::vector<std::u32string> truths;
  std::vector<double> difficulty;
  std::vector<bool> transcribed;
  std::u32string transcript;
};

// Same params, same sessions, byte for byte.
std::vector<SyntheticSession> MakeCorpus(const CorpusParams& params);

// One pool item per segment; ids are consecutive across sessions.
std::vector<PoolItem> BuildPool(std::span<const SyntheticSession> sessions);
DocIndex BuildDocIndex(std::span<const SyntheticSession> sessions);

// Randomized speech regions for a session of `length`: speech runs of
// 0.8-7 s separated mostly by short pauses, sometimes by long ones.
std::vector<SpeechRegion> RandomRegions(Rng& rng, Duration length);

}  // namespace corpusalign

#endif  // CORPUSALIGN_SYNTH_H_
