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

#ifndef CORPUSALIGN_PAIRING_H_
#define CORPUSALIGN_PAIRING_H_

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpusalign/aligner.h"

namespace corpusalign {

using Date = std::chrono::year_month_day;

struct SessionMeta {
  std::string session_id;  // local handle linking metadata to files
  std::string source_id;
  std::optional<Date> session_date;
  std::optional<std::string> title;
  std::optional<std::string> doc_number;
  std::optional<std::string> url;

  // Throws ValidationError unless a date, title or document number is set.
  void Validate() const;
};

// Formats understood by ParseDate when a source lists none.
const std::vector<std::string>& DefaultDateFormats();

// Tries each strftime-style format in order; unset if none parses fully.
std::optional<Date> ParseDate(std::string_view text,
                              std::span<const std::string> formats);
std::string FormatDate(const Date& date);

struct PairWeights {
  double date = 0.5;
  double doc_number = 0.3;
  double title = 0.2;

  void Validate() const;
};

// 1 - lev / max length over case-folded, punctuation-free titles.
double TitleSimilarity(std::string_view a, std::string_view b);

// Weighted agreement over the fields both sides carry, with the weights
// renormalized to those fields. Symmetric. Throws IncomparableError when the
// two share no field.
double PairScore(const SessionMeta& a, const SessionMeta& b,
                 const PairWeights& weights);

struct VocabularyCheck {
  double overlap = 0.0;
  bool pass = false;
};

// Share of distinct sample words that occur in the transcript. Throws
// InconclusiveError when the samples contain no words.
VocabularyCheck ValidatePair(std::span<const std::u32string> sample_hyps,
                             const TranscriptDoc& doc, double min_overlap);

struct PairCandidate {
  SessionMeta audio;
  SessionMeta transcript;
  double score = 0.0;
  bool validated = false;
  std::optional<double> vocabulary_overlap;
};

struct PairingResult {
  std::vector<PairCandidate> pairs;
  std::vector<SessionMeta> unpaired_audio;
  std::vector<SessionMeta> unpaired_transcripts;
};

// Greedy one-to-one assignment by descending score (ties by list position).
// Pairs scoring below accept_threshold are never made.
PairingResult PairSessions(std::span<const SessionMeta> audio,
                           std::span<const SessionMeta> transcripts,
                           const PairWeights& weights, double accept_threshold);

// Records a vocabulary check on a candidate; validated requires both the
// score threshold and the check.
void ApplyValidation(PairCandidate& candidate, const VocabularyCheck& check,
                     double accept_threshold);

}  // namespace corpusalign

#endif  // CORPUSALIGN_PAIRING_H_
