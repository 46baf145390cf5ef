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

#ifndef CORPUSALIGN_ALIGNER_H_
#define CORPUSALIGN_ALIGNER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpusalign/metrics.h"
#include "corpusalign/segmenter.h"

namespace corpusalign {

struct TextRange {
  std::size_t offset = 0;
  std::size_t length = 0;

  std::size_t end() const { return offset + length; }
  bool operator==(const TextRange&) const = default;
};

// A canonical (normalized) human transcript: the search space of the
// aligner. The text is also kept as dense symbol codes for the bit-vector
// kernels.
class TranscriptDoc {
 public:
  // Throws ValidationError on empty text or malformed fragments.
  TranscriptDoc(std::string session_id, std::u32string text,
                std::vector<TextRange> fragments = {});

  // Joins independently normalized pieces with a single space and records
  // each piece as a fragment.
  static TranscriptDoc FromFragments(std::string session_id,
                                     std::span<const std::u32string> pieces);

  const std::string& session_id() const { return session_id_; }
  const std::u32string& text() const { return text_; }
  std::size_t char_count() const { return text_.size(); }
  const std::vector<TextRange>& fragments() const { return fragments_; }
  bool has_fragments() const { return !fragments_.empty(); }

  std::u32string_view Span(std::size_t offset, std::size_t length) const {
    return std::u32string_view(text_).substr(offset, length);
  }

  std::span<const uint32_t> codes() const { return codes_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  // Maps pattern symbols into the document's code space; symbols absent from
  // the document get alphabet_size().
  std::vector<uint32_t> Encode(std::u32string_view pattern) const;

 private:
  std::string session_id_;
  std::u32string text_;
  std::vector<TextRange> fragments_;
  std::unordered_map<char32_t, uint32_t> alphabet_;
  std::vector<uint32_t> codes_;
};

struct AlignParams {
  double cer_threshold = 0.3;
  double span_len_min_ratio = 0.7;
  double span_len_max_ratio = 1.3;
  double coarse_stride_ratio = 0.5;
  // Stage-2 search radius in characters; unset means the hypothesis length.
  std::optional<std::size_t> fine_radius;
  // Restrict each segment's search to text after the previous retained
  // match (session driver only).
  bool monotone_anchor = false;

  // Throws ConfigError.
  void Validate() const;

  std::size_t MinSpan(std::size_t hyp_len) const;
  std::size_t MaxSpan(std::size_t hyp_len) const;
};

struct SegmentRef {
  std::string session_id;
  std::size_t index = 0;
  bool operator==(const SegmentRef&) const = default;
};

struct AlignmentMatch {
  SegmentRef segment;
  std::size_t span_offset = 0;
  std::size_t span_len = 0;
  CerValue cer;
  bool retained = false;

  bool operator==(const AlignmentMatch&) const = default;
};

enum class SearchMode { kFullDocument, kPerFragment };

struct SearchStats {
  // Every (offset, length) span scored, plus one per coarse window.
  uint64_t candidate_spans = 0;
  uint64_t coarse_windows = 0;
  uint64_t abandoned_windows = 0;
};

// Global minimum-CER span over every offset and every length in
// [MinSpan, MaxSpan]; ties go to the smaller offset, then the shorter span.
// Throws NoCandidateError when no legal span fits.
AlignmentMatch AlignExhaustive(std::u32string_view hyp,
                               const TranscriptDoc& doc,
                               const AlignParams& params,
                               SearchMode mode = SearchMode::kFullDocument,
                               SearchStats* stats = nullptr);

// Two-stage search. Stage 1 streams a semi-global distance over the text and
// scores stride-spaced windows by a lower bound on the distance of any span
// starting inside them; windows whose bound rules out retention are
// abandoned. Stage 2 searches every offset within fine_radius of the best
// two anchors over the full span-length range.
AlignmentMatch AlignCoarseToFine(std::u32string_view hyp,
                                 const TranscriptDoc& doc,
                                 const AlignParams& params,
                                 SearchMode mode = SearchMode::kFullDocument,
                                 SearchStats* stats = nullptr);

// Size of the exhaustive search space, without searching it.
uint64_t ExhaustiveCandidateCount(std::size_t hyp_len,
                                  const TranscriptDoc& doc,
                                  const AlignParams& params,
                                  SearchMode mode = SearchMode::kFullDocument);

enum class AlignMethod { kCoarseToFine, kExhaustive };

struct HypothesisRecord {
  Segment segment;
  std::u32string hypothesis;
};

struct SessionYield {
  std::size_t segment_count = 0;
  std::size_t retained_count = 0;
  std::size_t unaligned_count = 0;  // empty hypothesis or no legal span
  Duration total_duration{0};
  Duration retained_duration{0};

  double retention_rate() const {
    return segment_count == 0 ? 0.0
                              : static_cast<double>(retained_count) /
                                    static_cast<double>(segment_count);
  }
  bool operator==(const SessionYield&) const = default;
};

struct SessionAlignment {
  // Ordered by segment index; one entry per aligned segment whether or not
  // it was retained.
  std::vector<AlignmentMatch> matches;
  std::vector<std::size_t> unaligned;  // segment indices
  SessionYield yield;
};

struct SessionOptions {
  SearchMode mode = SearchMode::kFullDocument;
  AlignMethod method = AlignMethod::kCoarseToFine;
  int workers = 1;
};

// Aligns each hypothesis independently (or left to right in monotone anchor
// mode). Output is identical for any worker count.
SessionAlignment AlignSession(std::span<const HypothesisRecord> hyps,
                              const TranscriptDoc& doc,
                              const AlignParams& params,
                              const SessionOptions& options = {});

// Runs fn(i) for i in [0, count) on up to `workers` threads.
void ParallelFor(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace corpusalign

#endif  // CORPUSALIGN_ALIGNER_H_
