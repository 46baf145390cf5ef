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

#include "corpusalign/refinement.h"

#include <algorithm>
#include <numeric>

#include "corpusalign/errors.h"

namespace corpusalign {
namespace {

constexpr uint64_t kPassBits = 8;

Duration PoolDuration(std::span<const PoolItem> pool) {
  Duration total{0};
  for (const auto& item : pool) total += item.segment.duration();
  return total;
}

}  // namespace

void RefineConfig::Validate() const {
  if (max_passes < 1) throw ConfigError("max_passes must be at least 1");
  if (max_passes >= (1 << kPassBits)) throw ConfigError("max_passes too large");
  if (min_relative_gain < 0.0) {
    throw ConfigError("min_relative_gain must be non-negative");
  }
  if (workers < 1) throw ConfigError("workers must be at least 1");
  align_params.Validate();
}

PassResult RunPass(std::span<const PoolItem> pool,
                   std::span<const std::size_t> active, const DocIndex& docs,
                   const Transcriber& transcriber, const AlignParams& params,
                   int pass_index, Duration prior_retained, SearchMode mode,
                   int workers) {
  PassResult result;
  std::vector<std::u32string> hyps(active.size());
  ParallelFor(active.size(), workers, [&](std::size_t k) {
    const PoolItem& item = pool[active[k]];
    const uint64_t stream =
        (item.id << kPassBits) | static_cast<uint64_t>(pass_index);
    hyps[k] = transcriber.Transcribe(item, stream);
  });

  // Group by session; std::map keeps session order deterministic.
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_session;
  for (std::size_t k = 0; k < active.size(); ++k) {
    by_session[pool[active[k]].segment.session_id].push_back(k);
  }

  std::vector<bool> retained(active.size(), false);
  for (const auto& [session, members] : by_session) {
    const auto doc = docs.find(session);
    if (doc == docs.end()) {
      result.report.skipped_segments += members.size();
      continue;
    }
    std::vector<HypothesisRecord> records;
    std::map<std::size_t, std::size_t> by_index;  // segment index -> k
    records.reserve(members.size());
    for (std::size_t k : members) {
      const PoolItem& item = pool[active[k]];
      records.push_back({item.segment, hyps[k]});
      by_index[item.segment.index] = k;
    }
    if (by_index.size() != records.size()) {
      throw ValidationError("duplicate segment index in session '" + session +
                            "'");
    }
    SessionOptions options;
    options.mode = mode;
    options.workers = workers;
    const SessionAlignment aligned =
        AlignSession(records, doc->second, params, options);
    for (const AlignmentMatch& m : aligned.matches) {
      const std::size_t k = by_index.at(m.segment.index);
      result.matches.push_back({active[k], m, hyps[k], pass_index});
      if (m.retained) retained[k] = true;
    }
  }

  Duration added{0};
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (retained[k]) {
      added += pool[active[k]].segment.duration();
      ++result.report.added_segments;
    } else {
      result.residual.push_back(active[k]);
    }
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const PassMatch& a, const PassMatch& b) {
              return a.pool_index < b.pool_index;
            });

  PassReport& report = result.report;
  report.pass_index = pass_index;
  report.added = added;
  report.retained = prior_retained + added;
  report.residual = PoolDuration(pool) - report.retained;
  report.residual_segments = result.residual.size();
  if (pass_index > 1 && prior_retained > Duration::zero()) {
    report.relative_gain = static_cast<double>(added.count()) /
                           static_cast<double>(prior_retained.count());
  }
  return result;
}

RefineResult Refine(std::span<const PoolItem> pool, const DocIndex& docs,
                    const TranscriberTrainer& trainer,
                    const RefineConfig& config) {
  config.Validate();
  RefineResult out;
  std::vector<std::size_t> active(pool.size());
  std::iota(active.begin(), active.end(), std::size_t{0});

  // Labels come from these texts in every pass; they must not move.
  std::map<std::string, std::size_t, std::less<>> fingerprints;
  for (const auto& [id, doc] : docs) {
    fingerprints[id] = std::hash<std::u32string>{}(doc.text());
  }

  Duration cumulative{0};
  std::size_t cumulative_segments = 0;
  for (int pass = 1; pass <= config.max_passes; ++pass) {
    for (const auto& [id, doc] : docs) {
      if (fingerprints.at(id) != std::hash<std::u32string>{}(doc.text())) {
        throw Error("transcript of session '" + id +
                    "' changed between refinement passes");
      }
    }
    const auto transcriber = trainer.Train(DurationToHours(cumulative));
    PassResult pass_result =
        RunPass(pool, active, docs, *transcriber, config.align_params, pass,
                cumulative, config.mode, config.workers);
    cumulative = pass_result.report.retained;
    cumulative_segments += pass_result.report.added_segments;
    pass_result.report.retained_segments = cumulative_segments;
    for (auto& m : pass_result.matches) {
      if (m.match.retained) out.retained.push_back(std::move(m));
    }
    active = std::move(pass_result.residual);
    const PassReport& report = out.reports.emplace_back(pass_result.report);
    if (pass == 1) continue;
    const bool stalled =
        report.relative_gain ? *report.relative_gain < config.min_relative_gain
                             : report.added == Duration::zero();
    if (stalled) break;
  }
  std::stable_sort(out.retained.begin(), out.retained.end(),
                   [](const PassMatch& a, const PassMatch& b) {
                     return a.pool_index < b.pool_index;
                   });
  out.residual = std::move(active);
  return out;
}

}  // namespace corpusalign
