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

#include "corpusalign/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "corpusalign/errors.h"

namespace corpusalign {
namespace {

constexpr std::u32string_view kLetters = U"abcdefghijklmnopqrstuvwxyz";

std::size_t CharsFor(Duration d, double chars_per_second) {
  const double n = DurationToSeconds(d) * chars_per_second;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n)));
}

Duration Millis(double seconds) {
  return std::chrono::milliseconds(std::llround(seconds * 1000.0));
}

}  // namespace

WordSource::WordSource(uint64_t seed, std::size_t vocabulary_size) {
  if (vocabulary_size == 0) throw ConfigError("vocabulary_size must be > 0");
  Rng rng(seed, 0x766f636162ULL);
  std::unordered_set<std::u32string> seen;
  while (words_.size() < vocabulary_size) {
    // Short words dominate, as in running text.
    const std::size_t len = 1 + rng.Below(3) + rng.Below(4) + rng.Below(4);
    std::u32string w;
    for (std::size_t i = 0; i < len; ++i) {
      w.push_back(kLetters[rng.Below(kLetters.size())]);
    }
    if (seen.insert(w).second) words_.push_back(std::move(w));
  }
  double total = 0.0;
  for (std::size_t r = 0; r < words_.size(); ++r) {
    total += 1.0 / static_cast<double>(r + 1);
    cumulative_.push_back(total);
  }
  for (auto& c : cumulative_) c /= total;
}

std::u32string WordSource::Text(Rng& rng, std::size_t min_chars) const {
  std::u32string out;
  do {
    if (!out.empty()) out.push_back(U' ');
    const double u = rng.Uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    out += words_[static_cast<std::size_t>(it - cumulative_.begin())];
  } while (out.size() < min_chars);
  return out;
}

NoiseParams MixedNoise(double total_rate, uint64_t seed) {
  NoiseParams p;
  p.sub_rate = total_rate * 0.5;
  p.ins_rate = total_rate * 0.25;
  p.del_rate = total_rate * 0.25;
  p.seed = seed;
  p.Validate();
  return p;
}

PlantedCase MakePlantedCase(const WordSource& words, Rng& rng,
                            std::size_t doc_chars, std::size_t span_chars,
                            double noise_rate) {
  if (span_chars == 0 || span_chars >= doc_chars) {
    throw ConfigError("planted span must be shorter than the document");
  }
  PlantedCase c;
  c.doc = words.Text(rng, doc_chars);
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i + 1 < c.doc.size(); ++i) {
    if (c.doc[i] == U' ' && c.doc[i] != c.doc[i + 1]) starts.push_back(i + 1);
  }
  // Only starts that leave room for a whole span.
  while (starts.size() > 1 && starts.back() + span_chars > c.doc.size()) {
    starts.pop_back();
  }
  const std::size_t offset = starts[rng.Below(starts.size())];
  std::size_t end = std::min(c.doc.size(), offset + span_chars);
  while (end < c.doc.size() && c.doc[end] != U' ') ++end;
  c.span = {offset, end - offset};
  const auto truth = std::u32string_view(c.doc).substr(offset, end - offset);
  c.hypothesis = Transcribe(truth, MixedNoise(noise_rate, rng.Next()), 0);
  return c;
}

void CorpusParams::Validate() const {
  segmenter.Validate();
  if (session_count == 0) throw ConfigError("session_count must be > 0");
  if (session_length <= Duration::zero()) {
    throw ConfigError("session_length must be positive");
  }
  if (!(chars_per_second > 0.0)) {
    throw ConfigError("chars_per_second must be positive");
  }
  if (!(session_length_spread >= 0.0 && session_length_spread < 1.0)) {
    throw ConfigError("session_length_spread must lie in [0, 1)");
  }
  for (double p : {unalignable_fraction, hard_fraction, filler_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("corpus probabilities must lie in [0, 1]");
    }
  }
}

std::vector<SpeechRegion> RandomRegions(Rng& rng, Duration length) {
  std::vector<SpeechRegion> regions;
  Duration t = Millis(rng.Uniform(0.0, 2.0));
  while (true) {
    const Duration end = t + Millis(rng.Uniform(0.8, 7.0));
    if (end > length) break;
    regions.push_back({t, end});
    const double u = rng.Uniform();
    double gap;
    if (u < 0.1) {
      gap = rng.Uniform(0.05, 0.3);
    } else if (u < 0.85) {
      gap = rng.Uniform(0.3, 0.95);
    } else {
      gap = rng.Uniform(1.2, 4.0);
    }
    t = end + Millis(gap);
  }
  return regions;
}

std::vector<SyntheticSession> MakeCorpus(const CorpusParams& params) {
  params.Validate();
  const WordSource words(params.seed, params.vocabulary_size);
  const std::chrono::sys_days base =
      std::chrono::year{2020} / std::chrono::January / 1;
  std::vector<SyntheticSession> sessions;
  sessions.reserve(params.session_count);
  for (std::size_t s = 0; s < params.session_count; ++s) {
    Rng rng(params.seed, s + 1);
    SyntheticSession session;
    char id[32];
    std::snprintf(id, sizeof id, "session-%04zu", s + 1);
    session.session_id = id;
    session.date = Date(base + std::chrono::days(s));
    const double stretch =
        1.0 + params.session_length_spread * (2.0 * rng.Uniform() - 1.0);
    session.regions = RandomRegions(
        rng, SecondsToDuration(DurationToSeconds(params.session_length) *
                               stretch));
    session.segmentation =
        SegmentSession(session.session_id, session.regions, params.segmenter);

    // Transcript pieces in time order: segment text (when transcribed),
    // text of dropped speech, and occasional filler between segments.
    struct Piece {
      Duration start;
      std::u32string text;
    };
    std::vector<Piece> pieces;
    for (const auto& seg : session.segmentation.segments) {
      auto truth = words.Text(rng, CharsFor(seg.duration(), params.chars_per_second));
      double difficulty = rng.Uniform() < params.hard_fraction
                              ? rng.Uniform(1.5, 4.0)
                              : rng.Uniform(0.5, 1.5);
      const bool transcribed = rng.Uniform() >= params.unalignable_fraction;
      if (transcribed) pieces.push_back({seg.start, truth});
      if (rng.Uniform() < params.filler_probability) {
        pieces.push_back({seg.end, words.Text(rng, 20 + rng.Below(60))});
      }
      session.truths.push_back(std::move(truth));
      session.difficulty.push_back(difficulty);
      session.transcribed.push_back(transcribed);
    }
    for (const auto& d : session.segmentation.dropped) {
      pieces.push_back(
          {d.start, words.Text(rng, CharsFor(d.end - d.start,
                                             params.chars_per_second))});
    }
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const Piece& a, const Piece& b) {
                       return a.start < b.start;
                     });
    for (const auto& p : pieces) {
      if (!session.transcript.empty()) session.transcript.push_back(U' ');
      session.transcript += p.text;
    }
    if (session.transcript.empty()) session.transcript = words.Text(rng, 1);
    sessions.push_back(std::move(session));
  }
  return sessions;
}

std::vector<PoolItem> BuildPool(std::span<const SyntheticSession> sessions) {
  std::vector<PoolItem> pool;
  uint64_t id = 0;
  for (const auto& s : sessions) {
    const auto& segs = s.segmentation.segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      PoolItem item;
      item.segment = segs[i];
      item.audio_ref = s.session_id;
      item.true_text = s.truths[i];
      item.difficulty = s.difficulty[i];
      item.id = id++;
      pool.push_back(std::move(item));
    }
  }
  return pool;
}

DocIndex BuildDocIndex(std::span<const SyntheticSession> sessions) {
  DocIndex docs;
  for (const auto& s : sessions) {
    docs.emplace(s.session_id, TranscriptDoc(s.session_id, s.transcript));
  }
  return docs;
}

}  // namespace corpusalign
