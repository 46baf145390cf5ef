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

#ifndef CORPUSALIGN_JSON_IO_H_
#define CORPUSALIGN_JSON_IO_H_

// File formats of the pipeline stages. Field names are documented in
// docs/formats.md and are part of the stable interface.

#include <filesystem>
#include <string>
#include <vector>

#include "corpusalign/aligner.h"
#include "corpusalign/manifest.h"
#include "corpusalign/pairing.h"
#include "corpusalign/refinement.h"
#include "corpusalign/segmenter.h"
#include "corpusalign/sim_transcriber.h"
#include "corpusalign/text_norm.h"
#include "json.hpp"

namespace corpusalign {

// Reads a whole JSON document; DataError carries the path and parse offset.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);
// Pretty-printed, trailing newline, written via a temporary file + rename.
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

// Parameter blocks. Missing keys keep their defaults; unknown keys are
// rejected with ConfigError.
nlohmann::json ToJson(const AlignParams& p);
nlohmann::json ToJson(const SegmenterParams& p);
nlohmann::json ToJson(const NoiseParams& p);
nlohmann::json ToJson(const LearningCurve& c);
nlohmann::json ToJson(const SplitParams& p);
nlohmann::json ToJson(const PairWeights& w);
AlignParams AlignParamsFromJson(const nlohmann::json& j);
SegmenterParams SegmenterParamsFromJson(const nlohmann::json& j);
NoiseParams NoiseParamsFromJson(const nlohmann::json& j);
LearningCurve LearningCurveFromJson(const nlohmann::json& j);
SplitParams SplitParamsFromJson(const nlohmann::json& j);
PairWeights PairWeightsFromJson(const nlohmann::json& j);

struct RegionFile {
  std::string session_id;
  std::vector<SpeechRegion> regions;
};
RegionFile RegionFileFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const RegionFile& f);

nlohmann::json SegmentationToJson(const std::string& session_id,
                                  const SegmentationResult& result,
                                  const SegmenterParams& params);
std::vector<Segment> SegmentsFromJson(const nlohmann::json& j);

struct HypothesisEntry {
  std::size_t index = 0;
  std::string text;
};
struct HypothesisFile {
  std::string session_id;
  std::vector<HypothesisEntry> hypotheses;
};
HypothesisFile HypothesisFileFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const HypothesisFile& f);

// Either "text" (one document) or "fragments" (independently searchable
// pieces), both raw; normalization happens when the doc is built.
struct TranscriptFile {
  std::string session_id;
  std::string language;
  std::string text;
  std::vector<std::string> fragments;
};
TranscriptFile TranscriptFileFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const TranscriptFile& f);
TranscriptDoc BuildDoc(const TranscriptFile& file, const Normalizer& norm);

// True segment text of a synthetic session; the simulator's "audio".
struct TruthEntry {
  std::size_t index = 0;
  std::string text;
  double difficulty = 1.0;
};
struct TruthFile {
  std::string session_id;
  std::vector<TruthEntry> segments;
};
TruthFile TruthFileFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const TruthFile& f);

// A list of sessions with per-session file paths, resolved relative to the
// list file's directory.
struct SessionEntry {
  std::string session_id;
  std::filesystem::path segments;
  std::filesystem::path hypotheses;  // may be empty for refine
  std::filesystem::path transcript;
  std::filesystem::path truth;  // synthetic sessions only
  RecordContext context;
};
std::vector<SessionEntry> ReadSessionList(const std::filesystem::path& path);
nlohmann::json ToJson(const std::vector<SessionEntry>& sessions,
                      const std::filesystem::path& base);

struct MetadataFile {
  std::vector<SessionMeta> sessions;
};
// Each record may carry "date_formats"; otherwise the file-level list or
// DefaultDateFormats() applies. Unparseable dates are dropped, not fatal.
MetadataFile MetadataFileFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const SessionMeta& m);

nlohmann::json MatchToJson(const AlignmentMatch& m);
AlignmentMatch MatchFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const SessionYield& y);
nlohmann::json ToJson(const PassReport& r);

}  // namespace corpusalign

#endif  // CORPUSALIGN_JSON_IO_H_
