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

#ifndef CORPUSALIGN_SEGMENTER_H_
#define CORPUSALIGN_SEGMENTER_H_

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace corpusalign {

// Session time, exact to the microsecond so duration bounds never suffer
// from floating-point drift.
using Duration = std::chrono::microseconds;

Duration SecondsToDuration(double seconds);
double DurationToSeconds(Duration d);
double DurationToHours(Duration d);

// A voice-activity interval produced by an external VAD.
struct SpeechRegion {
  Duration start{0};
  Duration end{0};
  bool operator==(const SpeechRegion&) const = default;
};

struct SegmenterParams {
  Duration min_dur = std::chrono::seconds(3);
  Duration max_dur = std::chrono::seconds(30);
  Duration target_low = std::chrono::seconds(10);
  Duration target_high = std::chrono::seconds(20);
  // Shortest pause that counts as a natural cut point.
  Duration min_silence_gap = std::chrono::milliseconds(300);
  // Longest pause a segment may bridge; longer pauses always separate.
  Duration merge_gap = std::chrono::seconds(1);

  // Throws ConfigError unless 0 < min <= low <= high <= max and the gaps
  // are non-negative.
  void Validate() const;
};

struct Segment {
  std::string session_id;
  std::size_t index = 0;
  Duration start{0};
  Duration end{0};

  Duration duration() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

// How a segment's end boundary was chosen.
enum class CutKind {
  kEndOfSpeech,  // speech ran out (end of a block of bridged regions)
  kSilence,      // cut at an inter-region pause
  kForced,       // no usable pause, cut at exactly max_dur
};

enum class DropReason {
  kIsolatedShort,       // a block shorter than min_dur with no merge partner
  kUnmergeableResidue,  // a tail shorter than min_dur after a forced cut
};

struct DroppedSpan {
  Duration start{0};
  Duration end{0};
  DropReason reason = DropReason::kIsolatedShort;
};

struct SegmentationResult {
  std::vector<Segment> segments;
  std::vector<CutKind> cuts;  // parallel to segments
  std::vector<DroppedSpan> dropped;
};

// Throws ValidationError naming the first unsorted or overlapping pair.
void ValidateRegions(std::span<const SpeechRegion> regions);

// Windowing runs over speech time: regions separated by at most merge_gap
// form a block, and cuts inside a block prefer the longest pause whose
// position puts the segment length in [target_low, target_high].
SegmentationResult SegmentSession(const std::string& session_id,
                                  std::span<const SpeechRegion> regions,
                                  const SegmenterParams& params);

}  // namespace corpusalign

#endif  // CORPUSALIGN_SEGMENTER_H_
