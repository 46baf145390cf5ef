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

#include "corpusalign/manifest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "corpusalign/errors.h"
#include "corpusalign/rng.h"
#include "corpusalign/unicode.h"

namespace corpusalign {
namespace {

using nlohmann::json;

template <typename T>
json Nullable(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> OptionalField(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

Histogram MakeHistogram(double lo, double width, std::size_t bins) {
  Histogram h;
  h.lo = lo;
  h.bin_width = width;
  h.counts.assign(bins, 0);
  return h;
}

// Adds to bin `index` of a closed-right histogram: index == bins means the
// value sits exactly on the upper edge and joins the last bin.
void AddToBin(Histogram& h, long long index, bool exactly_top) {
  const auto bins = static_cast<long long>(h.counts.size());
  if (index < 0) {
    ++h.underflow;
  } else if (index < bins) {
    ++h.counts[static_cast<std::size_t>(index)];
  } else if (index == bins && exactly_top) {
    ++h.counts.back();
  } else {
    ++h.overflow;
  }
}

json HistogramToJson(const Histogram& h) {
  return {{"lo", h.lo},
          {"bin_width", h.bin_width},
          {"counts", h.counts},
          {"underflow", h.underflow},
          {"overflow", h.overflow}};
}

}  // namespace

ManifestRecord BuildRecord(const Segment& segment, const AlignmentMatch& match,
                           const TranscriptDoc& doc,
                           std::u32string_view hypothesis,
                           const RecordContext& context, int pass) {
  if (match.segment.session_id != doc.session_id() ||
      segment.session_id != doc.session_id() ||
      match.segment.index != segment.index) {
    throw ValidationError("match, segment and transcript disagree on session");
  }
  ManifestRecord r;
  r.audio_ref = context.audio_ref;
  r.session_id = segment.session_id;
  r.segment_index = segment.index;
  r.ground_truth = EncodeUtf8(doc.Span(match.span_offset, match.span_len));
  r.asr_hypothesis = EncodeUtf8(hypothesis);
  r.cer = match.cer;
  r.retained = match.retained;
  r.language_code = context.language_code;
  r.duration = segment.duration();
  r.source_id = context.source_id;
  r.session_date = context.session_date;
  r.quality_score = context.quality_score;
  r.snr_db = context.snr_db;
  r.span_offset = match.span_offset;
  r.span_len = match.span_len;
  r.alignment_pass = pass;
  return r;
}

json RecordToJson(const ManifestRecord& r) {
  json j;
  j["audio_ref"] = r.audio_ref;
  j["session_id"] = r.session_id;
  j["segment_index"] = r.segment_index;
  j["ground_truth"] = r.ground_truth;
  j["asr_hypothesis"] = r.asr_hypothesis;
  j["edit_distance"] = r.cer.edit_distance;
  j["ref_len"] = r.cer.ref_len;
  j["cer"] = r.cer.value();
  j["retained"] = r.retained;
  j["language"] = r.language_code;
  j["duration"] = DurationToSeconds(r.duration);
  j["source_id"] = r.source_id;
  j["session_date"] =
      r.session_date ? json(FormatDate(*r.session_date)) : json(nullptr);
  j["quality_score"] = Nullable(r.quality_score);
  j["snr_db"] = Nullable(r.snr_db);
  j["span_offset"] = r.span_offset;
  j["span_len"] = r.span_len;
  j["alignment_pass"] = r.alignment_pass;
  return j;
}

ManifestRecord RecordFromJson(const json& j) {
  try {
    ManifestRecord r;
    r.audio_ref = j.at("audio_ref").get<std::string>();
    r.session_id = j.at("session_id").get<std::string>();
    r.segment_index = j.at("segment_index").get<std::size_t>();
    r.ground_truth = j.at("ground_truth").get<std::string>();
    r.asr_hypothesis = j.at("asr_hypothesis").get<std::string>();
    r.cer.edit_distance = j.at("edit_distance").get<std::size_t>();
    r.cer.ref_len = j.at("ref_len").get<std::size_t>();
    if (r.cer.ref_len == 0) throw DataError("ref_len must be positive");
    r.retained = j.at("retained").get<bool>();
    r.language_code = j.at("language").get<std::string>();
    r.duration = SecondsToDuration(j.at("duration").get<double>());
    r.source_id = j.at("source_id").get<std::string>();
    if (const auto date = OptionalField<std::string>(j, "session_date")) {
      const std::string format = "%Y-%m-%d";
      r.session_date = ParseDate(*date, std::span(&format, 1));
      if (!r.session_date) throw DataError("bad session_date '" + *date + "'");
    }
    r.quality_score = OptionalField<double>(j, "quality_score");
    r.snr_db = OptionalField<double>(j, "snr_db");
    r.span_offset = j.value("span_offset", std::size_t{0});
    r.span_len = j.value("span_len", std::size_t{0});
    r.alignment_pass = j.value("alignment_pass", 1);
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest record: ") + e.what());
  }
}

std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::vector<ManifestRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(RecordFromJson(json::parse(line)));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return records;
}

void WriteManifest(const std::filesystem::path& path,
                   std::span<const ManifestRecord> records) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    for (const auto& r : records) out << RecordToJson(r).dump() << '\n';
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

bool Matches(const ManifestRecord& r, const FilterPredicate& p) {
  if (p.retained_only && !r.retained) return false;
  if (p.max_cer && !IsRetained(r.cer, *p.max_cer)) return false;
  if (p.min_duration && r.duration < *p.min_duration) return false;
  if (p.max_duration && r.duration > *p.max_duration) return false;
  if (p.min_quality && !(r.quality_score && *r.quality_score >= *p.min_quality)) {
    return false;
  }
  if (p.language && r.language_code != *p.language) return false;
  if (p.source && r.source_id != *p.source) return false;
  if (p.date_from && !(r.session_date && *r.session_date >= *p.date_from)) {
    return false;
  }
  if (p.date_to && !(r.session_date && *r.session_date <= *p.date_to)) {
    return false;
  }
  return true;
}

std::vector<ManifestRecord> Filter(std::span<const ManifestRecord> records,
                                   const FilterPredicate& predicate) {
  std::vector<ManifestRecord> out;
  for (const auto& r : records) {
    if (Matches(r, predicate)) out.push_back(r);
  }
  return out;
}

void SplitParams::Validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
}

SplitResult Split(std::span<const ManifestRecord> records,
                  const SplitParams& params) {
  params.Validate();
  std::map<std::string, std::size_t> sizes;
  for (const auto& r : records) ++sizes[r.session_id];
  if (sizes.size() < 2) {
    throw SplitInfeasibleError("a session-atomic split needs at least two "
                               "sessions, got " +
                               std::to_string(sizes.size()));
  }
  const std::size_t n = records.size();
  const auto train_target = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * params.train_fraction));
  const std::size_t test_target = n - train_target;

  std::vector<std::pair<std::string, std::size_t>> sessions(sizes.begin(),
                                                            sizes.end());
  Rng rng(params.seed);
  rng.Shuffle(sessions);

  // reach[i] holds the test sizes reachable with sessions i.. (bit t set).
  const std::size_t k = sessions.size();
  const std::size_t words = test_target / 64 + 1;
  std::vector<std::vector<uint64_t>> reach(k + 1,
                                           std::vector<uint64_t>(words, 0));
  reach[k][0] = 1;
  for (std::size_t i = k; i-- > 0;) {
    reach[i] = reach[i + 1];
    const std::size_t shift = sessions[i].second;
    if (shift > test_target) continue;
    for (std::size_t t = test_target + 1; t-- > shift;) {
      const std::size_t from = t - shift;
      if ((reach[i + 1][from / 64] >> (from % 64)) & 1) {
        reach[i][t / 64] |= uint64_t{1} << (t % 64);
      }
    }
  }
  if (!((reach[0][test_target / 64] >> (test_target % 64)) & 1)) {
    throw SplitInfeasibleError("no set of whole sessions has exactly " +
                               std::to_string(test_target) + " records");
  }
  std::map<std::string, bool> in_test;
  std::size_t remaining = test_target;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t c = sessions[i].second;
    const bool take =
        c <= remaining &&
        ((reach[i + 1][(remaining - c) / 64] >> ((remaining - c) % 64)) & 1);
    in_test[sessions[i].first] = take;
    if (take) remaining -= c;
  }

  SplitResult out;
  for (const auto& r : records) {
    (in_test.at(r.session_id) ? out.test : out.train).push_back(r);
  }
  return out;
}

ManifestStats ComputeStats(std::span<const ManifestRecord> records) {
  ManifestStats s;
  s.record_count = records.size();
  s.duration = MakeHistogram(0.0, 1.0, 30);
  s.cer = MakeHistogram(0.0, 0.01, 30);
  s.quality = MakeHistogram(1.0, 0.1, 40);
  std::vector<Duration> durations;
  std::vector<CerValue> cers;
  std::vector<double> qualities;
  std::size_t zero = 0;
  for (const auto& r : records) {
    s.total_duration += r.duration;
    durations.push_back(r.duration);
    cers.push_back(r.cer);
    if (r.cer.edit_distance == 0) ++zero;

    const long long micros = r.duration.count();
    AddToBin(s.duration, micros < 0 ? -1 : micros / 1'000'000,
             micros == 30'000'000);
    // floor(100 * d / n) computed exactly.
    const auto scaled = static_cast<long long>(
        (100 * static_cast<unsigned __int128>(r.cer.edit_distance)) /
        r.cer.ref_len);
    AddToBin(s.cer, scaled, 100 * r.cer.edit_distance == 30 * r.cer.ref_len);

    if (r.quality_score) {
      const double q = *r.quality_score;
      qualities.push_back(q);
      const double pos = (q - 1.0) * 10.0;
      AddToBin(s.quality,
               q < 1.0 ? -1 : static_cast<long long>(std::floor(pos + 1e-9)),
               q == 5.0);
    } else {
      ++s.quality_missing;
    }
  }
  if (!records.empty()) {
    s.zero_cer_fraction =
        static_cast<double>(zero) / static_cast<double>(records.size());
    const std::size_t mid = (durations.size() - 1) / 2;
    std::nth_element(durations.begin(), durations.begin() + mid,
                     durations.end());
    s.median_duration = DurationToSeconds(durations[mid]);
    std::nth_element(cers.begin(), cers.begin() + mid, cers.end(),
                     [](const CerValue& a, const CerValue& b) {
                       return CompareRate(a, b) < 0;
                     });
    s.median_cer = cers[mid];
  }
  if (!qualities.empty()) {
    const std::size_t mid = (qualities.size() - 1) / 2;
    std::nth_element(qualities.begin(), qualities.begin() + mid,
                     qualities.end());
    s.median_quality = qualities[mid];
  }
  return s;
}

json StatsToJson(const ManifestStats& s) {
  json j;
  j["record_count"] = s.record_count;
  j["total_hours"] = s.total_hours();
  j["total_seconds"] = DurationToSeconds(s.total_duration);
  j["zero_cer_fraction"] = s.zero_cer_fraction;
  j["median_duration"] = Nullable(s.median_duration);
  j["median_cer"] = s.median_cer ? json(s.median_cer->value()) : json(nullptr);
  j["median_quality"] = Nullable(s.median_quality);
  j["quality_missing"] = s.quality_missing;
  j["duration_histogram"] = HistogramToJson(s.duration);
  j["cer_histogram"] = HistogramToJson(s.cer);
  j["quality_histogram"] = HistogramToJson(s.quality);
  return j;
}

std::string RenderHistograms(const ManifestStats& s) {
  std::ostringstream out;
  auto render = [&](const char* title, const Histogram& h, int decimals) {
    out << title << '\n';
    std::size_t peak = 1;
    for (auto c : h.counts) peak = std::max(peak, c);
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      char label[64];
      std::snprintf(label, sizeof(label), "%8.*f", decimals,
                    h.lo + h.bin_width * static_cast<double>(i));
      const auto bar = h.counts[i] * 50 / peak;
      out << label << " | " << std::string(bar, '#') << ' ' << h.counts[i]
          << '\n';
    }
    if (h.underflow || h.overflow) {
      out << "  (underflow " << h.underflow << ", overflow " << h.overflow
          << ")\n";
    }
  };
  render("duration (s)", s.duration, 0);
  render("cer", s.cer, 2);
  render("quality", s.quality, 1);
  return out.str();
}

}  // namespace corpusalign
