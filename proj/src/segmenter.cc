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

#include "corpusalign/segmenter.h"

#include <cmath>
#include <optional>

#include "corpusalign/errors.h"

namespace corpusalign {
namespace {

struct Gap {
  Duration start;  // end of the speech before the pause
  Duration end;    // start of the speech after it
  Duration length() const { return end - start; }
};

struct Piece {
  Duration start;
  Duration end;
  CutKind cut;
};

std::string FormatRegion(const SpeechRegion& r) {
  return "[" + std::to_string(DurationToSeconds(r.start)) + ", " +
         std::to_string(DurationToSeconds(r.end)) + "]";
}

// Picks the cut for a window starting at seg_start, or nullopt when a forced
// cut is required. `remaining` is block_end - seg_start.
std::optional<Gap> ChooseSilence(const std::vector<Gap>& gaps,
                                 Duration seg_start, Duration block_end,
                                 const SegmenterParams& p) {
  const Duration remaining = block_end - seg_start;
  const Gap* in_target = nullptr;  // longest, latest on ties
  const Gap* after_target = nullptr;  // earliest
  const Gap* before_target = nullptr;  // longest, latest on ties
  for (const Gap& g : gaps) {
    if (g.start <= seg_start || g.length() < p.min_silence_gap) continue;
    const Duration length = g.start - seg_start;
    if (length > p.max_dur) break;
    // Never leave a tail that would itself be too short.
    if (block_end - g.end < p.min_dur) continue;
    if (length >= p.target_low && length <= p.target_high) {
      if (in_target == nullptr || g.length() >= in_target->length()) {
        in_target = &g;
      }
    } else if (length > p.target_high) {
      if (after_target == nullptr) after_target = &g;
    } else if (length >= p.min_dur) {
      if (before_target == nullptr || g.length() >= before_target->length()) {
        before_target = &g;
      }
    }
  }
  if (in_target != nullptr) return *in_target;
  // A remainder that already fits is only split at a target-range pause.
  if (remaining <= p.max_dur) return std::nullopt;
  if (after_target != nullptr) return *after_target;
  if (before_target != nullptr) return *before_target;
  return std::nullopt;
}

void SegmentBlock(std::span<const SpeechRegion> block,
                  const SegmenterParams& p, std::vector<Piece>& out,
                  std::vector<DroppedSpan>& dropped) {
  const Duration block_end = block.back().end;
  std::vector<Gap> gaps;
  for (std::size_t i = 0; i + 1 < block.size(); ++i) {
    gaps.push_back({block[i].end, block[i + 1].start});
  }

  std::vector<Piece> pieces;
  Duration seg_start = block.front().start;
  while (true) {
    const Duration remaining = block_end - seg_start;
    if (remaining <= p.target_high) {
      pieces.push_back({seg_start, block_end, CutKind::kEndOfSpeech});
      break;
    }
    if (const auto gap = ChooseSilence(gaps, seg_start, block_end, p)) {
      pieces.push_back({seg_start, gap->start, CutKind::kSilence});
      seg_start = gap->end;
      continue;
    }
    if (remaining <= p.max_dur) {
      pieces.push_back({seg_start, block_end, CutKind::kEndOfSpeech});
      break;
    }
    const Duration cut = seg_start + p.max_dur;
    pieces.push_back({seg_start, cut, CutKind::kForced});
    seg_start = cut;
    for (const Gap& g : gaps) {
      if (cut >= g.start && cut < g.end) {
        seg_start = g.end;
        break;
      }
    }
  }

  Piece& last = pieces.back();
  if (last.end - last.start < p.min_dur) {
    if (pieces.size() == 1) {
      dropped.push_back({last.start, last.end, DropReason::kIsolatedShort});
      pieces.pop_back();
    } else {
      Piece& prev = pieces[pieces.size() - 2];
      if (last.end - prev.start <= p.max_dur) {
        prev.end = last.end;
        prev.cut = last.cut;
      } else {
        dropped.push_back(
            {last.start, last.end, DropReason::kUnmergeableResidue});
      }
      pieces.pop_back();
    }
  }
  out.insert(out.end(), pieces.begin(), pieces.end());
}

}  // namespace

Duration SecondsToDuration(double seconds) {
  return Duration(std::llround(seconds * 1e6));
}

double DurationToSeconds(Duration d) {
  return static_cast<double>(d.count()) / 1e6;
}

double DurationToHours(Duration d) {
  return static_cast<double>(d.count()) / 3.6e9;
}

void SegmenterParams::Validate() const {
  if (!(Duration::zero() < min_dur && min_dur <= target_low &&
        target_low <= target_high && target_high <= max_dur)) {
    throw ConfigError(
        "segmenter bounds must satisfy 0 < min_dur <= target_low <= "
        "target_high <= max_dur");
  }
  if (min_silence_gap < Duration::zero() || merge_gap < Duration::zero()) {
    throw ConfigError("segmenter gap thresholds must be non-negative");
  }
}

void ValidateRegions(std::span<const SpeechRegion> regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const SpeechRegion& r = regions[i];
    if (r.start < Duration::zero() || r.end <= r.start) {
      throw ValidationError("region " + std::to_string(i) + " " +
                            FormatRegion(r) + " is empty or negative");
    }
    if (i > 0 && regions[i - 1].end > r.start) {
      throw ValidationError("regions " + std::to_string(i - 1) + " " +
                            FormatRegion(regions[i - 1]) + " and " +
                            std::to_string(i) + " " + FormatRegion(r) +
                            " are unsorted or overlapping");
    }
  }
}

SegmentationResult SegmentSession(const std::string& session_id,
                                  std::span<const SpeechRegion> regions,
                                  const SegmenterParams& params) {
  params.Validate();
  ValidateRegions(regions);
  std::vector<Piece> pieces;
  SegmentationResult result;
  std::size_t block_begin = 0;
  for (std::size_t i = 1; i <= regions.size(); ++i) {
    if (i == regions.size() ||
        regions[i].start - regions[i - 1].end > params.merge_gap) {
      SegmentBlock(regions.subspan(block_begin, i - block_begin), params,
                   pieces, result.dropped);
      block_begin = i;
    }
  }
  for (const Piece& piece : pieces) {
    result.segments.push_back(
        {session_id, result.segments.size(), piece.start, piece.end});
    result.cuts.push_back(piece.cut);
  }
  return result;
}

}  // namespace corpusalign
