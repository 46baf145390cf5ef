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

// Acceptance gate. Runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Arguments select a subset by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "corpusalign/aligner.h"
#include "corpusalign/manifest.h"
#include "corpusalign/metrics.h"
#include "corpusalign/refinement.h"
#include "corpusalign/rng.h"
#include "corpusalign/segmenter.h"
#include "corpusalign/sim_transcriber.h"
#include "corpusalign/synth.h"
#include "support/oracles.h"

namespace corpusalign {
namespace {

namespace fs = std::filesystem;
using testing::OracleDistance;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

// 1. Levenshtein and banded Levenshtein against the full matrix.
Outcome MetricOracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  const std::pair<std::u32string, std::u32string> named[] = {
      {U"kitten", U"sitting"}, {U"", U"abc"},     {U"abc", U""},
      {U"flaw", U"lawn"},      {U"abc", U"abc"},  {U"intention", U"execution"},
      {U"مرحبا", U"مرحب"},     {U"ab", U"ba"}};
  std::vector<std::pair<std::u32string, std::u32string>> cases(
      std::begin(named), std::end(named));
  uint64_t state = 1;
  for (int i = 0; i < 1000; ++i) {
    state = state * 6364136223846793005ULL + 1;
    const std::size_t la = (state >> 40) % 21;
    const std::size_t lb = (state >> 20) % 21;
    cases.emplace_back(testing::RandomString(state, la, U"acgt"),
                       testing::RandomString(state, lb, U"acgt"));
  }
  for (const auto& [a, b] : cases) {
    const std::size_t expected = OracleDistance(a, b);
    if (Levenshtein(a, b) != expected) ++mismatches;
    for (std::size_t band = 1; band <= 21; ++band) {
      const auto got = BandedLevenshtein(a, b, band);
      const bool ok = expected <= band ? (got && *got == expected) : !got;
      if (!ok) ++mismatches;
    }
  }
  const double secs = Seconds(t0);
  return {mismatches == 0 && secs < 5.0,
          Fmt("%zu pairs, %zu mismatches, %.2f s (limit 5 s)", cases.size(),
              mismatches, secs)};
}

// 2. Coarse-to-fine against exhaustive search.
Outcome AlignmentEquivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const WordSource words(2024);
  Rng rng(2024, 2);
  const double noises[] = {0.0, 0.1, 0.25};
  const AlignParams params;
  int agree = 0, both = 0, cer_violations = 0;
  double worst = 0.0;
  const int kCases = 500;
  for (int i = 0; i < kCases; ++i) {
    const std::size_t doc_chars = 500 + rng.Below(19'000);
    const std::size_t span_chars = 15 + rng.Below(250);
    const PlantedCase c =
        MakePlantedCase(words, rng, doc_chars, span_chars, noises[i % 3]);
    if (c.hypothesis.empty()) {
      ++agree;
      continue;
    }
    const TranscriptDoc doc("case", c.doc);
    const auto fast = AlignCoarseToFine(c.hypothesis, doc, params);
    const auto slow = AlignExhaustive(c.hypothesis, doc, params);
    if (fast.retained == slow.retained) ++agree;
    if (fast.retained && slow.retained) {
      ++both;
      const double diff = std::abs(fast.cer.value() - slow.cer.value());
      worst = std::max(worst, diff);
      if (diff > 0.01) ++cer_violations;
    }
  }
  const double secs = Seconds(t0);
  const double rate = static_cast<double>(agree) / kCases;
  return {rate >= 0.99 && cer_violations == 0 && secs < 120.0,
          Fmt("agreement %.3f (min 0.99), %d both-retained with max |dCER| "
              "%.4f (limit 0.01), %.1f s (limit 120 s)",
              rate, both, worst, secs)};
}

// 3. Planted-span recovery at 10% noise.
Outcome PlantedRecovery() {
  const WordSource words(77);
  Rng rng(77, 3);
  const AlignParams params;
  const int kSegments = 1000;
  int retained = 0;
  std::size_t overlap = 0, planted = 0;
  for (int i = 0; i < kSegments; ++i) {
    const std::size_t span_chars = 40 + rng.Below(260);
    const PlantedCase c =
        MakePlantedCase(words, rng, 10'000, span_chars, 0.10);
    const TranscriptDoc doc("case", c.doc);
    const auto m = AlignCoarseToFine(c.hypothesis, doc, params);
    if (!m.retained) continue;
    ++retained;
    const std::size_t lo = std::max(m.span_offset, c.span.offset);
    const std::size_t hi =
        std::min(m.span_offset + m.span_len, c.span.end());
    overlap += hi > lo ? hi - lo : 0;
    planted += c.span.length;
  }
  const double rate = static_cast<double>(retained) / kSegments;
  const double ov = planted ? static_cast<double>(overlap) / planted : 0.0;
  return {rate >= 0.99 && ov >= 0.90,
          Fmt("retained %.3f (min 0.99), character overlap %.4f (min 0.90)",
              rate, ov)};
}

// Speech blocks: regions joined across pauses no longer than merge_gap.
std::vector<SpeechRegion> Blocks(const std::vector<SpeechRegion>& regions,
                                 Duration merge_gap) {
  std::vector<SpeechRegion> blocks;
  for (const auto& r : regions) {
    if (!blocks.empty() && r.start - blocks.back().end <= merge_gap) {
      blocks.back().end = r.end;
    } else {
      blocks.push_back(r);
    }
  }
  return blocks;
}

Duration Covered(const std::vector<SpeechRegion>& regions,
                 const std::vector<SpeechRegion>& cover) {
  Duration total{0};
  for (const auto& r : regions) {
    for (const auto& c : cover) {
      const auto lo = std::max(r.start, c.start);
      const auto hi = std::min(r.end, c.end);
      if (hi > lo) total += hi - lo;
    }
  }
  return total;
}

std::vector<SpeechRegion> SilenceFree(Rng& rng) {
  std::vector<SpeechRegion> regions;
  const auto ms = [](double s) {
    return std::chrono::milliseconds(std::llround(s * 1000));
  };
  if (rng.Uniform() < 0.5) {
    regions.push_back({ms(0.0), ms(rng.Uniform(31.0, 400.0))});
    return regions;
  }
  Duration t = ms(rng.Uniform(0.0, 1.0));
  const Duration end = t + ms(rng.Uniform(31.0, 300.0));
  while (t < end) {
    const Duration e = std::min(end, t + ms(rng.Uniform(0.5, 8.0)));
    regions.push_back({t, e});
    t = e + ms(rng.Uniform(0.01, 0.29));
  }
  return regions;
}

std::vector<SpeechRegion> Bursty(Rng& rng) {
  std::vector<SpeechRegion> regions;
  const auto ms = [](double s) {
    return std::chrono::milliseconds(std::llround(s * 1000));
  };
  Duration t = ms(rng.Uniform(0.0, 3.0));
  const int n = 1 + static_cast<int>(rng.Below(60));
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    const double len = u < 0.3   ? rng.Uniform(0.1, 3.0)
                       : u < 0.8 ? rng.Uniform(0.5, 12.0)
                                 : rng.Uniform(12.0, 70.0);
    regions.push_back({t, t + ms(len)});
    const double v = rng.Uniform();
    const double gap = v < 0.3   ? rng.Uniform(0.01, 0.3)
                       : v < 0.7 ? rng.Uniform(0.3, 1.0)
                                 : rng.Uniform(1.0, 6.0);
    t = regions.back().end + ms(gap);
  }
  return regions;
}

// 4. Segmentation invariants over randomized sessions.
Outcome SegmentationInvariants() {
  const SegmenterParams p;
  Rng rng(4, 4);
  std::size_t segments = 0, forced_checked = 0, drops = 0;
  std::vector<std::string> failures;
  const auto fail = [&](int s, const std::string& what) {
    if (failures.size() < 5) failures.push_back(Fmt("session %d: ", s) + what);
  };
  for (int s = 0; s < 10'000; ++s) {
    const int kind = s % 5;
    std::vector<SpeechRegion> regions;
    if (kind == 0 || kind == 1) {
      regions = RandomRegions(rng, std::chrono::seconds(60 + rng.Below(1200)));
    } else if (kind == 2) {
      regions = SilenceFree(rng);
    } else {
      regions = Bursty(rng);
    }
    if (regions.empty()) continue;
    const auto result = SegmentSession("s", regions, p);
    segments += result.segments.size();
    for (const auto& seg : result.segments) {
      if (seg.duration() < p.min_dur || seg.duration() > p.max_dur) {
        fail(s, "segment duration out of range");
      }
    }
    if (kind == 2) {
      // Every cut before the last segment is forced at exactly 30 s.
      for (std::size_t i = 0; i + 1 < result.segments.size(); ++i) {
        ++forced_checked;
        if (result.segments[i].duration() != p.max_dur ||
            result.cuts[i] != CutKind::kForced) {
          fail(s, "silence-free cut not forced at 30 s");
        }
      }
      if (result.segments.empty()) fail(s, "silence-free session emitted nothing");
    }
    // Drops: exactly the short blocks plus residues that cannot merge.
    const auto blocks = Blocks(regions, p.merge_gap);
    std::vector<SpeechRegion> expected_isolated, got_isolated;
    for (const auto& b : blocks) {
      if (b.end - b.start < p.min_dur) expected_isolated.push_back(b);
    }
    std::vector<SpeechRegion> cover;
    for (const auto& seg : result.segments) cover.push_back({seg.start, seg.end});
    for (const auto& d : result.dropped) {
      ++drops;
      if (d.end - d.start >= p.min_dur) fail(s, "dropped span not short");
      if (d.reason == DropReason::kIsolatedShort) {
        got_isolated.push_back({d.start, d.end});
        continue;
      }
      cover.push_back({d.start, d.end});
      const auto prev = std::find_if(
          result.segments.rbegin(), result.segments.rend(),
          [&](const Segment& g) { return g.end <= d.start; });
      if (prev == result.segments.rend() ||
          d.start - prev->end > p.merge_gap ||
          d.end - prev->start <= p.max_dur) {
        fail(s, "residue could have merged");
      }
    }
    if (got_isolated != expected_isolated) fail(s, "isolated drops differ");
    // No speech lost or duplicated in the remaining blocks.
    std::vector<SpeechRegion> kept_regions;
    for (const auto& r : regions) {
      const bool isolated = std::any_of(
          expected_isolated.begin(), expected_isolated.end(),
          [&](const SpeechRegion& b) { return r.start >= b.start && r.end <= b.end; });
      if (!isolated) kept_regions.push_back(r);
    }
    Duration speech{0};
    for (const auto& r : kept_regions) speech += r.end - r.start;
    if (Covered(kept_regions, cover) != speech) fail(s, "speech coverage broken");
  }
  std::string detail =
      Fmt("10000 sessions, %zu segments, %zu forced cuts checked, %zu drops",
          segments, forced_checked, drops);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty() && forced_checked > 0, detail};
}

// 5. Refinement dynamics on a 200-hour synthetic pool.
Outcome RefinementDynamics() {
  const auto t0 = std::chrono::steady_clock::now();
  CorpusParams cp;
  cp.seed = 5;
  // Segments cover about 89% of session time (pauses, drops); 452 half-hour
  // sessions give a pool just over 200 hours.
  cp.session_count = 452;
  cp.session_length = std::chrono::minutes(30);
  cp.chars_per_second = 5.0;
  const auto sessions = MakeCorpus(cp);
  const auto pool = BuildPool(sessions);
  const DocIndex docs = BuildDocIndex(sessions);
  Duration pool_total{0};
  for (const auto& item : pool) pool_total += item.segment.duration();

  RefineConfig config;
  config.max_passes = 3;
  config.min_relative_gain = 0.0;  // run all three passes
  const double noises[] = {0.10, 0.25, 0.45};
  std::vector<RefineResult> runs;
  for (double noise : noises) {
    LearningCurve curve;
    curve.initial = MixedNoise(noise, 11);
    curve.floor_rate = 0.05;
    curve.halving_hours = 20.0;
    runs.push_back(Refine(pool, docs, SimTrainer(curve), config));
  }
  const double secs = Seconds(t0);

  bool a = true, b = true, c = true;
  std::string detail = Fmt("pool %.1f h;", DurationToHours(pool_total));
  double prev_gain2 = -1.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i].reports;
    if (r.size() < 3 || !r[1].relative_gain || !r[2].relative_gain) {
      return {false, "fewer than three passes with a defined gain"};
    }
    const double g2 = *r[1].relative_gain, g3 = *r[2].relative_gain;
    if (noises[i] >= 0.25 && !(r[1].retained > r[0].retained)) a = false;
    if (g2 < prev_gain2) b = false;
    if (!(g3 < g2)) c = false;
    prev_gain2 = g2;
    detail += Fmt(" noise %.2f: %.1f/%.1f/%.1f h, gain2 %+.1f%% gain3 %+.1f%%;",
                  noises[i], r[0].retained_hours(), r[1].retained_hours(),
                  r[2].retained_hours(), 100 * g2, 100 * g3);
  }
  detail += Fmt(" (a) %s (b) %s (c) %s, %.0f s (limit 300 s)",
                a ? "ok" : "no", b ? "ok" : "no", c ? "ok" : "no", secs);
  const bool full_size = DurationToHours(pool_total) >= 200.0;
  return {full_size && a && b && c && secs < 300.0, detail};
}

// 6. Channel calibration.
Outcome ChannelCalibration() {
  const WordSource words(6);
  Rng rng(6, 6);
  const NoiseParams p = MixedNoise(0.10, 6);
  std::size_t edits = 0, chars = 0;
  uint64_t stream = 0;
  while (chars < 200'000) {
    const auto truth = words.Text(rng, 200);
    const auto hyp = Transcribe(truth, p, stream++);
    edits += Levenshtein(truth, hyp);
    chars += truth.size();
  }
  const double cer = static_cast<double>(edits) / static_cast<double>(chars);
  return {std::abs(cer - 0.10) <= 0.02,
          Fmt("empirical CER %.4f over %zu chars (target 0.10 +/- 0.02)", cer,
              chars)};
}

ManifestRecord Record(const std::string& session, std::size_t index,
                      std::size_t edits, std::size_t len) {
  ManifestRecord r;
  r.audio_ref = session + ".wav";
  r.session_id = session;
  r.segment_index = index;
  r.ground_truth = "x";
  r.asr_hypothesis = "x";
  r.cer = {edits, len};
  r.retained = IsRetained(r.cer, 0.3);
  r.language_code = "xx";
  r.duration = std::chrono::seconds(3 + index % 27);
  r.source_id = "src";
  return r;
}

// 7. Manifest laws.
Outcome ManifestLaws() {
  std::vector<ManifestRecord> records;
  // CERs straddling 0.3, including exactly 0.3 in several forms.
  const std::pair<std::size_t, std::size_t> cers[] = {
      {0, 10}, {29, 100}, {3, 10}, {30, 100}, {299, 1000}, {31, 100},
      {1, 3},  {2, 7},    {9, 30}, {10, 33},  {0, 1},      {5, 10}};
  Rng rng(7, 7);
  for (int s = 0; s < 40; ++s) {
    const int n = 1 + static_cast<int>(rng.Below(8));
    for (int i = 0; i < n; ++i) {
      const auto& [e, l] = cers[rng.Below(std::size(cers))];
      records.push_back(Record("s" + std::to_string(s), i, e, l));
    }
  }
  FilterPredicate pred;
  pred.max_cer = 0.3;
  const auto once = Filter(records, pred);
  const auto twice = Filter(once, pred);
  const bool idempotent = once == twice;
  std::size_t expected = 0;
  bool exact = true;
  for (const auto& r : records) {
    // 10 * edits < 3 * len is cer < 0.3 in exact arithmetic.
    const bool keep = 10 * r.cer.edit_distance < 3 * r.cer.ref_len;
    expected += keep;
    const bool kept = std::find(once.begin(), once.end(), r) != once.end();
    if (keep != kept) exact = false;
  }
  exact = exact && once.size() == expected;

  const SplitParams sp{0.95, 99};
  std::string split_detail;
  bool split_ok = false;
  try {
    const auto s1 = Split(records, sp);
    const auto s2 = Split(records, sp);
    const bool deterministic = s1.train == s2.train && s1.test == s2.test;
    std::set<std::string> train_sessions, test_sessions;
    for (const auto& r : s1.train) train_sessions.insert(r.session_id);
    for (const auto& r : s1.test) test_sessions.insert(r.session_id);
    bool atomic = true;
    for (const auto& id : train_sessions) atomic = atomic && !test_sessions.count(id);
    const std::size_t n = records.size();
    const auto want_train = static_cast<std::size_t>(std::llround(n * 0.95));
    const bool sizes =
        s1.train.size() == want_train && s1.test.size() == n - want_train;
    std::multiset<std::pair<std::string, std::size_t>> all, parts;
    for (const auto& r : records) all.insert({r.session_id, r.segment_index});
    for (const auto* part : {&s1.train, &s1.test}) {
      for (const auto& r : *part) parts.insert({r.session_id, r.segment_index});
    }
    const bool partition = all == parts;
    split_ok = deterministic && atomic && sizes && partition;
    split_detail = Fmt("split %zu/%zu of %zu (deterministic %d, atomic %d, "
                       "sizes %d, partition %d)",
                       s1.train.size(), s1.test.size(), n, deterministic,
                       atomic, sizes, partition);
  } catch (const std::exception& e) {
    split_detail = std::string("split failed: ") + e.what();
  }
  return {idempotent && exact && split_ok,
          Fmt("filter idempotent %d, exact threshold set %d (%zu of %zu); ",
              idempotent, exact, once.size(), records.size()) +
              split_detail};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Every file of a stage directory except the provenance record, which
// names the worker count.
std::vector<std::pair<std::string, std::string>> StageFiles(
    const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "config.json") continue;
    files.emplace_back(fs::relative(e.path(), dir).string(), Slurp(e.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

// 8. Worker-count independence of align and refine on the bundled fixture.
Outcome Determinism() {
  const fs::path fixture = fs::path(CORPUSALIGN_FIXTURE_DIR) / "sessions.json";
  const fs::path root = fs::temp_directory_path() / "corpusalign_acceptance_8";
  fs::remove_all(root);
  std::ostringstream sink;
  std::vector<std::vector<std::pair<std::string, std::string>>> align_runs,
      refine_runs;
  for (int workers : {1, 4, 8}) {
    const fs::path out = root / ("w" + std::to_string(workers));
    for (const char* cmd : {"align", "refine"}) {
      const std::vector<std::string> args = {
          cmd, "--sessions", fixture.string(), "--out", out.string(),
          "--seed", "17", "--workers", std::to_string(workers)};
      const int code = cli::Run(args, sink, sink);
      if (code != 0) {
        return {false, Fmt("%s exited %d with %d workers: ", cmd, code,
                           workers) + sink.str()};
      }
    }
    align_runs.push_back(StageFiles(out / "align"));
    refine_runs.push_back(StageFiles(out / "refine"));
  }
  const bool align_same =
      align_runs[0] == align_runs[1] && align_runs[0] == align_runs[2];
  const bool refine_same =
      refine_runs[0] == refine_runs[1] && refine_runs[0] == refine_runs[2];
  fs::remove_all(root);
  return {align_same && refine_same && !align_runs[0].empty(),
          Fmt("align outputs identical %d (%zu files), refine outputs "
              "identical %d (%zu files) across workers {1,4,8}",
              align_same, align_runs[0].size(), refine_same,
              refine_runs[0].size())};
}

// 9. Candidate count and wall time on a 1M-character transcript.
Outcome PerformanceSmoke() {
  const WordSource words(9);
  Rng rng(9, 9);
  const std::u32string text = words.Text(rng, 1'000'000);
  const TranscriptDoc doc("big", text);
  const AlignParams params;
  std::vector<std::size_t> word_starts{0};
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i - 1] == U' ') word_starts.push_back(i);
  }
  uint64_t evaluated = 0, exhaustive = 0;
  int retained = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 200; ++i) {
    std::size_t offset = word_starts[rng.Below(word_starts.size())];
    offset = std::min(offset, text.size() - 225);
    const auto truth = std::u32string_view(text).substr(offset, 225);
    const auto hyp = Transcribe(truth, MixedNoise(0.10, 9), i);
    SearchStats stats;
    const auto m = AlignCoarseToFine(hyp, doc, params,
                                     SearchMode::kFullDocument, &stats);
    retained += m.retained;
    evaluated += stats.candidate_spans;
    exhaustive += ExhaustiveCandidateCount(hyp.size(), doc, params);
  }
  const double secs = Seconds(t0);
  const double ratio = static_cast<double>(evaluated) / exhaustive;
  return {ratio <= 0.10 && secs < 60.0,
          Fmt("evaluated %.3f%% of %llu exhaustive candidates (limit 10%%), "
              "%d/200 retained, %.1f s (interactive limit 60 s)",
              100 * ratio, static_cast<unsigned long long>(exhaustive),
              retained, secs)};
}

}  // namespace
}  // namespace corpusalign

int main(int argc, char** argv) {
  using corpusalign::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"metric oracle", corpusalign::MetricOracle},
      {"alignment oracle equivalence", corpusalign::AlignmentEquivalence},
      {"planted-span recovery", corpusalign::PlantedRecovery},
      {"segmentation invariants", corpusalign::SegmentationInvariants},
      {"refinement dynamics", corpusalign::RefinementDynamics},
      {"channel calibration", corpusalign::ChannelCalibration},
      {"manifest laws", corpusalign::ManifestLaws},
      {"determinism", corpusalign::Determinism},
      {"performance smoke", corpusalign::PerformanceSmoke},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int i = 0; i < static_cast<int>(std::size(criteria)); ++i) {
    if (!selected.empty() && !selected.count(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d [%s]: %s - %s\n", i + 1, criteria[i].first,
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
