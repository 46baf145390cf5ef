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

#ifndef CORPUSALIGN_TOOLS_CLI_H_
#define CORPUSALIGN_TOOLS_CLI_H_

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "corpusalign/aligner.h"
#include "corpusalign/manifest.h"
#include "corpusalign/pairing.h"
#include "corpusalign/segmenter.h"
#include "corpusalign/sim_transcriber.h"
#include "corpusalign/synth.h"
#include "json.hpp"

namespace corpusalign::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,  // bad flags, config or validation failure
  kExitData = 2,    // malformed or unusable input data
  kExitInternal = 3,
};

struct RefineSettings {
  int max_passes = 3;
  double min_relative_gain = 0.02;
  LearningCurve curve;
};

struct PairSettings {
  PairWeights weights;
  double accept_threshold = 0.6;
  double min_overlap = 0.3;
  std::size_t validation_sample = 10;
};

struct SynthSettings {
  CorpusParams corpus;
  double noise = 0.1;  // total error rate of the first-pass hypotheses
};

// Everything a stage needs. Sub-seeds (split, transcriber, synthetic
// corpus) are all derived from `seed`.
struct RunConfig {
  uint64_t seed = 0;
  int workers = 1;
  std::string rules;  // normalization rule file; empty means generic rules
  AlignMethod method = AlignMethod::kCoarseToFine;
  SearchMode mode = SearchMode::kFullDocument;
  AlignParams align;
  SegmenterParams segmenter;
  SplitParams split;
  RefineSettings refine;
  PairSettings pair;
  SynthSettings synth;
  // Resolved input/output paths of the stage, by role.
  std::map<std::string, std::string> paths;

  RunConfig();
  void ApplySeed();
};

nlohmann::json ToJson(const RunConfig& config);
// Starts from defaults; unknown keys are a ConfigError.
RunConfig RunConfigFromJson(const nlohmann::json& j);

int ExitCodeFor(const std::exception& e);

// Parses argv-style arguments (without the program name) and runs one
// subcommand. Never throws; returns an ExitCode.
int Run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

}  // namespace corpusalign::cli

#endif  // CORPUSALIGN_TOOLS_CLI_H_
