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

#ifndef CORPUSALIGN_MANIFEST_H_
#define CORPUSALIGN_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpusalign/aligner.h"
#include "corpusalign/metrics.h"
#include "corpusalign/pairing.h"
#include "corpusalign/segmenter.h"
#include "json.hpp"

namespace corpusalign {

// One released segment. ground_truth always comes from a transcript span;
// asr_hypothesis is kept for provenance only.
struct ManifestRecord {
  std::string audio_ref;
  std::string session_id;
  std::size_t segment_index = 0;
  std::string ground_truth;
  std::string asr_hypothesis;
  CerValue cer;
  bool retained = false;
  std::string language_code;
  Duration duration{0};
  std::string source_id;
  std::optional<Date> session_date;
  std::optional<double> quality_score;  // ingested, 1-5 scale
  std::optional<double> snr_db;
  std::size_t span_offset = 0;
  std::size_t span_len = 0;
  int alignment_pass = 1;

  bool operator==(const ManifestRecord&) const = default;
};

struct RecordContext {
  std::string audio_ref;
  std::string language_code;
  std::string source_id;
  std::optional<Date> session_date;
  std::optional<double> quality_score;
  std::optional<double> snr_db;
};

ManifestRecord BuildRecord(const Segment& segment, const AlignmentMatch& match,
                           const TranscriptDoc& doc,
                           std::u32string_view hypothesis,
                           const RecordContext& context, int pass = 1);

nlohmann::json RecordToJson(const ManifestRecord& record);
// Throws DataError on missing or mistyped fields.
ManifestRecord RecordFromJson(const nlohmann::json& json);

// One JSON object per line. Read errors carry the file and line number.
std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void WriteManifest(const std::filesystem::path& path,
                   std::span<const ManifestRecord> records);

struct FilterPredicate {
  std::optional<double> max_cer;  // keeps cer < max_cer
  std::optional<Duration> min_duration;
  std::optional<Duration> max_duration;
  std::optional<double> min_quality;  // records without a score fail
  std::optional<std::string> language;
  std::optional<std::string> source;
  std::optional<Date> date_from;  // inclusive; undated records fail
  std::optional<Date> date_to;
  bool retained_only = false;
};

bool Matches(const ManifestRecord& record, const FilterPredicate& predicate);
std::vector<ManifestRecord> Filter(std::span<const ManifestRecord> records,
                                   const FilterPredicate& predicate);

struct SplitParams {
  double train_fraction = 0.95;
  uint64_t seed = 0;

  void Validate() const;
};

struct SplitResult {
  std::vector<ManifestRecord> train;
  std::vector<ManifestRecord> test;
};

// Session-atomic split with |train| = round(N * train_fraction) exactly.
// Sessions are shuffled by `seed` and the test side is the first subset, in
// shuffled order, whose record count hits the target. Throws
// SplitInfeasibleError with fewer than two sessions or when no subset of
// session sizes sums to the target.
SplitResult Split(std::span<const ManifestRecord> records,
                  const SplitParams& params);

struct Histogram {
  double lo = 0.0;
  double bin_width = 1.0;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;
};

struct ManifestStats {
  std::size_t record_count = 0;
  Histogram duration;  // 1 s bins over [0, 30]
  Histogram cer;       // 0.01 bins over [0, 0.30]
  Histogram quality;   // 0.1 bins over [1, 5]
  std::optional<double> median_duration;  // seconds; lower median
  std::optional<CerValue> median_cer;
  std::optional<double> median_quality;
  std::size_t quality_missing = 0;
  double zero_cer_fraction = 0.0;
  Duration total_duration{0};

  double total_hours() const { return DurationToHours(total_duration); }
};

ManifestStats ComputeStats(std::span<const ManifestRecord> records);
nlohmann::json StatsToJson(const ManifestStats& stats);
std::string RenderHistograms(const ManifestStats& stats);

}  // namespace corpusalign

#endif  // CORPUSALIGN_MANIFEST_H_
