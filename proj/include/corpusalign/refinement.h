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

#ifndef CORPUSALIGN_REFINEMENT_H_
#define CORPUSALIGN_REFINEMENT_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpusalign/aligner.h"
#include "corpusalign/sim_transcriber.h"

namespace corpusalign {

// Transcripts by session id, fixed for the whole refinement run.
using DocIndex = std::map<std::string, TranscriptDoc, std::less<>>;

struct PassReport {
  int pass_index = 1;
  Duration retained{0};  // cumulative after this pass
  Duration added{0};     // retained in this pass only
  Duration residual{0};  // pool - cumulative retained
  std::size_t retained_segments = 0;
  std::size_t added_segments = 0;
  std::size_t residual_segments = 0;
  std::size_t skipped_segments = 0;  // no paired transcript
  // added / cumulative before this pass; unset for pass 1 and whenever
  // nothing had been retained before.
  std::optional<double> relative_gain;

  double retained_hours() const { return DurationToHours(retained); }
  double new_hours() const { return DurationToHours(added); }
  double residual_hours() const { return DurationToHours(residual); }
};

struct PassMatch {
  std::size_t pool_index = 0;
  AlignmentMatch match;
  std::u32string hypothesis;
  int pass_index = 1;
};

struct PassResult {
  std::vector<PassMatch> matches;     // every aligned item, retained or not
  std::vector<std::size_t> residual;  // pool indices still unretained
  PassReport report;
};

struct RefineConfig {
  int max_passes = 3;
  double min_relative_gain = 0.02;
  AlignParams align_params;
  SearchMode mode = SearchMode::kFullDocument;
  int workers = 1;

  void Validate() const;
};

// Transcribes the `active` pool items with `transcriber`, aligns each against
// its session transcript and partitions them into retained and residual.
// prior_retained is the cumulative retained duration before this pass.
PassResult RunPass(std::span<const PoolItem> pool,
                   std::span<const std::size_t> active, const DocIndex& docs,
                   const Transcriber& transcriber, const AlignParams& params,
                   int pass_index, Duration prior_retained,
                   SearchMode mode = SearchMode::kFullDocument,
                   int workers = 1);

struct RefineResult {
  std::vector<PassReport> reports;
  // Retained matches of all passes, each frozen at the pass that found it.
  std::vector<PassMatch> retained;
  std::vector<std::size_t> residual;
};

// Pass k uses trainer.Train(cumulative retained hours after pass k - 1) and
// re-aligns only the residual pool. Stops after max_passes or once a pass's
// relative gain drops below min_relative_gain.
RefineResult Refine(std::span<const PoolItem> pool, const DocIndex& docs,
                    const TranscriberTrainer& trainer,
                    const RefineConfig& config);

}  // namespace corpusalign

#endif  // CORPUSALIGN_REFINEMENT_H_
