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

#include "corpusalign/aligner.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "bit_parallel.h"
#include "corpusalign/errors.h"

namespace corpusalign {
namespace {

using internal::PatternMatcher;

// Guards ceil/floor of ratio * length against products such as
// 10 * 0.7 == 6.999...
constexpr double kRatioSlack = 1e-9;

struct Candidate {
  std::size_t dist = 0;
  std::size_t len = 0;
  std::size_t offset = 0;
  bool valid = false;
};

bool Better(const Candidate& a, const Candidate& b) {
  if (!b.valid) return true;
  const auto order = CompareRate(CerValue{a.dist, a.len},
                                 CerValue{b.dist, b.len});
  if (order != 0) return order < 0;
  if (a.offset != b.offset) return a.offset < b.offset;
  return a.len < b.len;
}

std::vector<TextRange> SearchRegions(const TranscriptDoc& doc,
                                     SearchMode mode) {
  if (mode == SearchMode::kFullDocument) return {{0, doc.char_count()}};
  if (!doc.has_fragments()) {
    throw ConfigError("per-fragment search on session '" + doc.session_id() +
                      "' which has no fragments");
  }
  return doc.fragments();
}

class SpanSearch {
 public:
  SpanSearch(std::u32string_view hyp, const TranscriptDoc& doc,
             const AlignParams& params)
      : doc_(doc),
        params_(params),
        pattern_(doc.Encode(hyp)),
        matcher_(pattern_, doc.alphabet_size()),
        min_span_(params.MinSpan(hyp.size())),
        max_span_(params.MaxSpan(hyp.size())),
        buffer_(max_span_) {}

  std::size_t min_span() const { return min_span_; }
  std::size_t max_span() const { return max_span_; }

  // Scores every offset in [first, last] against every legal length inside
  // `region`.
  void ScanOffsets(const TextRange& region, std::size_t first,
                   std::size_t last, Candidate& best, SearchStats& stats) {
    const auto codes = doc_.codes();
    for (std::size_t o = first; o <= last && o + min_span_ <= region.end();
         ++o) {
      const std::size_t cols = std::min(max_span_, region.end() - o);
      matcher_.PrefixDistances(codes.subspan(o, cols), buffer_);
      for (std::size_t len = min_span_; len <= cols; ++len) {
        const Candidate c{buffer_[len - 1], len, o, true};
        if (Better(c, best)) best = c;
      }
      stats.candidate_spans += cols - min_span_ + 1;
    }
  }

  const PatternMatcher& matcher() const { return matcher_; }

  AlignmentMatch ToMatch(const Candidate& best) const {
    AlignmentMatch match;
    match.span_offset = best.offset;
    match.span_len = best.len;
    match.cer = CerValue{best.dist, best.len};
    match.retained = IsRetained(match.cer, params_.cer_threshold);
    return match;
  }

 private:
  const TranscriptDoc& doc_;
  const AlignParams& params_;
  std::vector<uint32_t> pattern_;
  PatternMatcher matcher_;
  std::size_t min_span_;
  std::size_t max_span_;
  std::vector<uint32_t> buffer_;
};

void CheckHypothesis(std::u32string_view hyp) {
  if (hyp.empty()) throw ValidationError("empty hypothesis");
}

[[noreturn]] void NoCandidate(std::size_t hyp_len, const TranscriptDoc& doc) {
  throw NoCandidateError("no legal span for a " + std::to_string(hyp_len) +
                         "-character hypothesis in session '" +
                         doc.session_id() + "'");
}

AlignmentMatch ExhaustiveIn(std::u32string_view hyp, const TranscriptDoc& doc,
                            const AlignParams& params,
                            std::span<const TextRange> regions,
                            SearchStats& stats) {
  SpanSearch search(hyp, doc, params);
  Candidate best;
  for (const TextRange& region : regions) {
    if (region.length < search.min_span()) continue;
    search.ScanOffsets(region, region.offset,
                       region.end() - search.min_span(), best, stats);
  }
  if (!best.valid) NoCandidate(hyp.size(), doc);
  return search.ToMatch(best);
}

struct Window {
  std::size_t bound = 0;
  std::size_t start = 0;
  std::size_t anchor = 0;  // estimated span start
  std::size_t region = 0;
  bool abandoned = false;
};

bool WindowBefore(const Window& a, const Window& b) {
  if (a.bound != b.bound) return a.bound < b.bound;
  return a.start < b.start;
}

AlignmentMatch CoarseToFineIn(std::u32string_view hyp,
                              const TranscriptDoc& doc,
                              const AlignParams& params,
                              std::span<const TextRange> regions,
                              SearchStats& stats) {
  SpanSearch search(hyp, doc, params);
  const std::size_t m = hyp.size();
  const std::size_t min_span = search.min_span();
  const std::size_t max_span = search.max_span();
  const std::size_t stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(params.coarse_stride_ratio * static_cast<double>(m) +
                        kRatioSlack)));
  const std::size_t radius = params.fine_radius.value_or(m);
  const auto codes = doc.codes();

  // Stage 1. best_end[e] is the least distance of the hypothesis to any
  // substring ending at e, so the minimum over a window's reachable ends
  // bounds every span that starts inside the window.
  std::vector<Window> windows;
  std::vector<uint32_t> best_end;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const TextRange& region = regions[r];
    if (region.length < min_span) continue;
    best_end.resize(region.length);
    search.matcher().SearchDistances(codes.subspan(region.offset, region.length),
                                     best_end);
    for (std::size_t a = region.offset; a + min_span <= region.end();
         a += stride) {
      const std::size_t first_end = a + min_span;
      const std::size_t last_end =
          std::min(a + stride - 1 + max_span, region.end());
      std::size_t arg = first_end;
      uint32_t bound = best_end[first_end - region.offset - 1];
      for (std::size_t e = first_end + 1; e <= last_end; ++e) {
        const uint32_t v = best_end[e - region.offset - 1];
        if (v < bound) {
          bound = v;
          arg = e;
        }
      }
      Window w;
      w.bound = bound;
      w.start = a;
      w.region = r;
      w.anchor = std::clamp<std::size_t>(arg > m ? arg - m : 0, region.offset,
                                         region.end() - min_span);
      w.abandoned = !IsRetained(CerValue{bound, max_span}, params.cer_threshold);
      windows.push_back(w);
    }
  }
  if (windows.empty()) NoCandidate(m, doc);
  stats.coarse_windows += windows.size();
  stats.candidate_spans += windows.size();
  for (const Window& w : windows) stats.abandoned_windows += w.abandoned;

  const Window* first = &windows.front();
  for (const Window& w : windows) {
    if (WindowBefore(w, *first)) first = &w;
  }
  const Window* second = nullptr;
  if (!first->abandoned) {
    for (const Window& w : windows) {
      if (w.abandoned) continue;
      const std::size_t apart = w.anchor > first->anchor
                                    ? w.anchor - first->anchor
                                    : first->anchor - w.anchor;
      if (w.region == first->region && apart <= radius) continue;
      if (second == nullptr || WindowBefore(w, *second)) second = &w;
    }
  }

  // Stage 2 over the union of the anchor neighbourhoods.
  struct Interval {
    std::size_t region;
    std::size_t lo;
    std::size_t hi;
  };
  std::vector<Interval> intervals;
  for (const Window* w : {first, second}) {
    if (w == nullptr) continue;
    const TextRange& region = regions[w->region];
    const std::size_t lo = std::max(region.offset,
                                    w->anchor > radius ? w->anchor - radius : 0);
    const std::size_t hi = std::min(region.end() - min_span, w->anchor + radius);
    intervals.push_back({w->region, lo, hi});
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) {
              return std::tie(a.region, a.lo) < std::tie(b.region, b.lo);
            });
  if (intervals.size() == 2 && intervals[0].region == intervals[1].region &&
      intervals[1].lo <= intervals[0].hi + 1) {
    intervals[0].hi = std::max(intervals[0].hi, intervals[1].hi);
    intervals.pop_back();
  }
  Candidate best;
  for (const Interval& iv : intervals) {
    search.ScanOffsets(regions[iv.region], iv.lo, iv.hi, best, stats);
  }
  if (!best.valid) NoCandidate(m, doc);
  return search.ToMatch(best);
}

std::vector<TextRange> ClipRegions(std::span<const TextRange> regions,
                                   std::size_t floor) {
  std::vector<TextRange> out;
  for (const TextRange& r : regions) {
    if (r.end() <= floor) continue;
    const std::size_t start = std::max(r.offset, floor);
    out.push_back({start, r.end() - start});
  }
  return out;
}

AlignmentMatch AlignIn(AlignMethod method, std::u32string_view hyp,
                       const TranscriptDoc& doc, const AlignParams& params,
                       std::span<const TextRange> regions,
                       SearchStats& stats) {
  return method == AlignMethod::kExhaustive
             ? ExhaustiveIn(hyp, doc, params, regions, stats)
             : CoarseToFineIn(hyp, doc, params, regions, stats);
}

}  // namespace

TranscriptDoc::TranscriptDoc(std::string session_id, std::u32string text,
                             std::vector<TextRange> fragments)
    : session_id_(std::move(session_id)),
      text_(std::move(text)),
      fragments_(std::move(fragments)) {
  if (text_.empty()) {
    throw ValidationError("transcript for session '" + session_id_ +
                          "' is empty");
  }
  for (std::size_t i = 0; i < fragments_.size(); ++i) {
    const TextRange& f = fragments_[i];
    if (f.length == 0 || f.end() > text_.size() ||
        (i > 0 && fragments_[i - 1].end() > f.offset)) {
      throw ValidationError("fragment " + std::to_string(i) + " of session '" +
                            session_id_ +
                            "' is empty, out of bounds or overlapping");
    }
  }
  codes_.reserve(text_.size());
  for (char32_t c : text_) {
    const auto [it, inserted] =
        alphabet_.try_emplace(c, static_cast<uint32_t>(alphabet_.size()));
    codes_.push_back(it->second);
  }
}

TranscriptDoc TranscriptDoc::FromFragments(
    std::string session_id, std::span<const std::u32string> pieces) {
  std::u32string text;
  std::vector<TextRange> fragments;
  for (const auto& piece : pieces) {
    if (piece.empty()) continue;
    if (!text.empty()) text.push_back(U' ');
    fragments.push_back({text.size(), piece.size()});
    text += piece;
  }
  return TranscriptDoc(std::move(session_id), std::move(text),
                       std::move(fragments));
}

std::vector<uint32_t> TranscriptDoc::Encode(std::u32string_view pattern) const {
  std::vector<uint32_t> out;
  out.reserve(pattern.size());
  const auto unknown = static_cast<uint32_t>(alphabet_.size());
  for (char32_t c : pattern) {
    const auto it = alphabet_.find(c);
    out.push_back(it == alphabet_.end() ? unknown : it->second);
  }
  return out;
}

void AlignParams::Validate() const {
  if (!(cer_threshold > 0.0)) {
    throw ConfigError("cer_threshold must be positive");
  }
  if (!(span_len_min_ratio > 0.0 && span_len_min_ratio <= 1.0 &&
        span_len_max_ratio >= 1.0)) {
    throw ConfigError(
        "span length ratios must satisfy 0 < min_ratio <= 1 <= max_ratio");
  }
  if (!(coarse_stride_ratio > 0.0 && coarse_stride_ratio <= 1.0)) {
    throw ConfigError("coarse_stride_ratio must lie in (0, 1]");
  }
}

std::size_t AlignParams::MinSpan(std::size_t hyp_len) const {
  const double v =
      std::ceil(span_len_min_ratio * static_cast<double>(hyp_len) - kRatioSlack);
  return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

std::size_t AlignParams::MaxSpan(std::size_t hyp_len) const {
  const double v = std::floor(span_len_max_ratio * static_cast<double>(hyp_len) +
                              kRatioSlack);
  return std::max(MinSpan(hyp_len), static_cast<std::size_t>(v));
}

AlignmentMatch AlignExhaustive(std::u32string_view hyp,
                               const TranscriptDoc& doc,
                               const AlignParams& params, SearchMode mode,
                               SearchStats* stats) {
  params.Validate();
  CheckHypothesis(hyp);
  SearchStats local;
  const auto regions = SearchRegions(doc, mode);
  auto match = ExhaustiveIn(hyp, doc, params, regions, stats ? *stats : local);
  match.segment.session_id = doc.session_id();
  return match;
}

AlignmentMatch AlignCoarseToFine(std::u32string_view hyp,
                                 const TranscriptDoc& doc,
                                 const AlignParams& params, SearchMode mode,
                                 SearchStats* stats) {
  params.Validate();
  CheckHypothesis(hyp);
  SearchStats local;
  const auto regions = SearchRegions(doc, mode);
  auto match =
      CoarseToFineIn(hyp, doc, params, regions, stats ? *stats : local);
  match.segment.session_id = doc.session_id();
  return match;
}

uint64_t ExhaustiveCandidateCount(std::size_t hyp_len,
                                  const TranscriptDoc& doc,
                                  const AlignParams& params, SearchMode mode) {
  const std::size_t lo = params.MinSpan(hyp_len);
  const std::size_t hi = params.MaxSpan(hyp_len);
  uint64_t total = 0;
  for (const TextRange& region : SearchRegions(doc, mode)) {
    for (std::size_t len = lo; len <= hi && len <= region.length; ++len) {
      total += region.length - len + 1;
    }
  }
  return total;
}

void ParallelFor(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& fn) {
  const std::size_t threads =
      std::min<std::size_t>(std::max(1, workers), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SessionAlignment AlignSession(std::span<const HypothesisRecord> hyps,
                              const TranscriptDoc& doc,
                              const AlignParams& params,
                              const SessionOptions& options) {
  params.Validate();
  const auto regions = SearchRegions(doc, options.mode);
  for (const auto& h : hyps) {
    if (h.segment.session_id != doc.session_id()) {
      throw ValidationError("segment " + std::to_string(h.segment.index) +
                            " of session '" + h.segment.session_id +
                            "' aligned against transcript of '" +
                            doc.session_id() + "'");
    }
  }

  std::vector<std::optional<AlignmentMatch>> results(hyps.size());
  auto align_one = [&](std::size_t i, std::span<const TextRange> where) {
    const auto& h = hyps[i];
    if (h.hypothesis.empty()) return;
    SearchStats stats;
    try {
      results[i] =
          AlignIn(options.method, h.hypothesis, doc, params, where, stats);
    } catch (const NoCandidateError&) {
      return;
    }
    results[i]->segment = {h.segment.session_id, h.segment.index};
  };

  if (params.monotone_anchor) {
    std::size_t floor = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      const auto clipped = ClipRegions(regions, floor);
      align_one(i, clipped);
      if (!results[i] && !hyps[i].hypothesis.empty()) align_one(i, regions);
      if (results[i] && results[i]->retained) {
        floor = results[i]->span_offset + results[i]->span_len;
      }
    }
  } else {
    ParallelFor(hyps.size(), options.workers,
                [&](std::size_t i) { align_one(i, regions); });
  }

  std::vector<std::size_t> order(hyps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hyps[a].segment.index < hyps[b].segment.index;
  });

  SessionAlignment out;
  for (std::size_t i : order) {
    const auto& h = hyps[i];
    ++out.yield.segment_count;
    out.yield.total_duration += h.segment.duration();
    if (!results[i]) {
      ++out.yield.unaligned_count;
      out.unaligned.push_back(h.segment.index);
      continue;
    }
    if (results[i]->retained) {
      ++out.yield.retained_count;
      out.yield.retained_duration += h.segment.duration();
    }
    out.matches.push_back(std::move(*results[i]));
  }
  return out;
}

}  // namespace corpusalign
