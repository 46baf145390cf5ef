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

#include "corpusalign/json_io.h"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include "corpusalign/errors.h"
#include "corpusalign/unicode.h"

namespace corpusalign {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void RejectUnknownKeys(const json& j, std::string_view what,
                       std::initializer_list<std::string_view> known) {
  if (!j.is_object()) {
    throw ConfigError(std::string(what) + ": expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (auto k : known) found = found || k == key;
    if (!found) {
      throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void ReadSeconds(const json& j, const char* key, Duration& out) {
  if (const auto it = j.find(key); it != j.end()) {
    out = SecondsToDuration(it->get<double>());
  }
}

template <typename T>
T Wrap(std::string_view what, const auto& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

std::optional<std::string> OptString(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

fs::path Resolve(const fs::path& base, const json& j, const char* key) {
  const auto s = OptString(j, key);
  if (!s || s->empty()) return {};
  fs::path p(*s);
  return p.is_absolute() ? p : base / p;
}

std::string RelativeTo(const fs::path& p, const fs::path& base) {
  if (p.empty()) return {};
  return p.lexically_relative(base).generic_string();
}

const char* CutName(CutKind k) {
  switch (k) {
    case CutKind::kEndOfSpeech:
      return "end_of_speech";
    case CutKind::kSilence:
      return "silence";
    case CutKind::kForced:
      return "forced";
  }
  return "?";
}

const char* DropName(DropReason r) {
  return r == DropReason::kIsolatedShort ? "isolated_short"
                                         : "unmergeable_residue";
}

}  // namespace

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void WriteJsonFile(const fs::path& path, const json& j) {
  WriteTextFile(path, j.dump(2) + "\n");
}

json ToJson(const AlignParams& p) {
  json j = {{"cer_threshold", p.cer_threshold},
            {"span_len_min_ratio", p.span_len_min_ratio},
            {"span_len_max_ratio", p.span_len_max_ratio},
            {"coarse_stride_ratio", p.coarse_stride_ratio},
            {"monotone_anchor", p.monotone_anchor}};
  j["fine_radius"] = p.fine_radius ? json(*p.fine_radius) : json(nullptr);
  return j;
}

AlignParams AlignParamsFromJson(const json& j) {
  RejectUnknownKeys(j, "align params",
                    {"cer_threshold", "span_len_min_ratio",
                     "span_len_max_ratio", "coarse_stride_ratio",
                     "fine_radius", "monotone_anchor"});
  try {
    AlignParams p;
    Read(j, "cer_threshold", p.cer_threshold);
    Read(j, "span_len_min_ratio", p.span_len_min_ratio);
    Read(j, "span_len_max_ratio", p.span_len_max_ratio);
    Read(j, "coarse_stride_ratio", p.coarse_stride_ratio);
    Read(j, "monotone_anchor", p.monotone_anchor);
    if (const auto it = j.find("fine_radius");
        it != j.end() && !it->is_null()) {
      p.fine_radius = it->get<std::size_t>();
    }
    p.Validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("align params: ") + e.what());
  }
}

json ToJson(const SegmenterParams& p) {
  return {{"min_dur", DurationToSeconds(p.min_dur)},
          {"max_dur", DurationToSeconds(p.max_dur)},
          {"target_low", DurationToSeconds(p.target_low)},
          {"target_high", DurationToSeconds(p.target_high)},
          {"min_silence_gap", DurationToSeconds(p.min_silence_gap)},
          {"merge_gap", DurationToSeconds(p.merge_gap)}};
}

SegmenterParams SegmenterParamsFromJson(const json& j) {
  RejectUnknownKeys(j, "segmenter params",
                    {"min_dur", "max_dur", "target_low", "target_high",
                     "min_silence_gap", "merge_gap"});
  try {
    SegmenterParams p;
    ReadSeconds(j, "min_dur", p.min_dur);
    ReadSeconds(j, "max_dur", p.max_dur);
    ReadSeconds(j, "target_low", p.target_low);
    ReadSeconds(j, "target_high", p.target_high);
    ReadSeconds(j, "min_silence_gap", p.min_silence_gap);
    ReadSeconds(j, "merge_gap", p.merge_gap);
    p.Validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("segmenter params: ") + e.what());
  }
}

json ToJson(const NoiseParams& p) {
  return {{"sub_rate", p.sub_rate},
          {"ins_rate", p.ins_rate},
          {"del_rate", p.del_rate},
          {"alphabet", EncodeUtf8(p.alphabet)},
          {"seed", p.seed}};
}

NoiseParams NoiseParamsFromJson(const json& j) {
  RejectUnknownKeys(j, "noise params",
                    {"sub_rate", "ins_rate", "del_rate", "alphabet", "seed"});
  try {
    NoiseParams p;
    Read(j, "sub_rate", p.sub_rate);
    Read(j, "ins_rate", p.ins_rate);
    Read(j, "del_rate", p.del_rate);
    Read(j, "seed", p.seed);
    if (const auto a = OptString(j, "alphabet")) p.alphabet = DecodeUtf8(*a);
    p.Validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("noise params: ") + e.what());
  }
}

json ToJson(const LearningCurve& c) {
  return {{"initial", ToJson(c.initial)},
          {"floor_rate", c.floor_rate},
          {"halving_hours", c.halving_hours}};
}

LearningCurve LearningCurveFromJson(const json& j) {
  RejectUnknownKeys(j, "learning curve",
                    {"initial", "floor_rate", "halving_hours"});
  try {
    LearningCurve c;
    if (const auto it = j.find("initial"); it != j.end()) {
      c.initial = NoiseParamsFromJson(*it);
    }
    Read(j, "floor_rate", c.floor_rate);
    Read(j, "halving_hours", c.halving_hours);
    c.Validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("learning curve: ") + e.what());
  }
}

json ToJson(const SplitParams& p) {
  return {{"train_fraction", p.train_fraction}, {"seed", p.seed}};
}

SplitParams SplitParamsFromJson(const json& j) {
  RejectUnknownKeys(j, "split params", {"train_fraction", "seed"});
  try {
    SplitParams p;
    Read(j, "train_fraction", p.train_fraction);
    Read(j, "seed", p.seed);
    p.Validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("split params: ") + e.what());
  }
}

json ToJson(const PairWeights& w) {
  return {{"date", w.date}, {"doc_number", w.doc_number}, {"title", w.title}};
}

PairWeights PairWeightsFromJson(const json& j) {
  RejectUnknownKeys(j, "pair weights", {"date", "doc_number", "title"});
  try {
    PairWeights w;
    Read(j, "date", w.date);
    Read(j, "doc_number", w.doc_number);
    Read(j, "title", w.title);
    w.Validate();
    return w;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pair weights: ") + e.what());
  }
}

RegionFile RegionFileFromJson(const json& j) {
  return Wrap<RegionFile>("region file", [&] {
    RegionFile f;
    f.session_id = j.at("session_id").get<std::string>();
    for (const auto& r : j.at("regions")) {
      f.regions.push_back({SecondsToDuration(r.at("start").get<double>()),
                           SecondsToDuration(r.at("end").get<double>())});
    }
    return f;
  });
}

json ToJson(const RegionFile& f) {
  json regions = json::array();
  for (const auto& r : f.regions) {
    regions.push_back(
        {{"start", DurationToSeconds(r.start)}, {"end", DurationToSeconds(r.end)}});
  }
  return {{"session_id", f.session_id}, {"regions", regions}};
}

json SegmentationToJson(const std::string& session_id,
                        const SegmentationResult& result,
                        const SegmenterParams& params) {
  json segments = json::array();
  for (std::size_t i = 0; i < result.segments.size(); ++i) {
    const auto& s = result.segments[i];
    json e = {{"index", s.index},
              {"start", DurationToSeconds(s.start)},
              {"end", DurationToSeconds(s.end)},
              {"duration", DurationToSeconds(s.duration())}};
    if (i < result.cuts.size()) e["cut"] = CutName(result.cuts[i]);
    segments.push_back(std::move(e));
  }
  json dropped = json::array();
  for (const auto& d : result.dropped) {
    dropped.push_back({{"start", DurationToSeconds(d.start)},
                       {"end", DurationToSeconds(d.end)},
                       {"reason", DropName(d.reason)}});
  }
  return {{"session_id", session_id},
          {"params", ToJson(params)},
          {"segments", segments},
          {"dropped", dropped}};
}

std::vector<Segment> SegmentsFromJson(const json& j) {
  return Wrap<std::vector<Segment>>("segment file", [&] {
    const auto session = j.at("session_id").get<std::string>();
    std::vector<Segment> out;
    for (const auto& s : j.at("segments")) {
      out.push_back({session, s.at("index").get<std::size_t>(),
                     SecondsToDuration(s.at("start").get<double>()),
                     SecondsToDuration(s.at("end").get<double>())});
    }
    return out;
  });
}

HypothesisFile HypothesisFileFromJson(const json& j) {
  return Wrap<HypothesisFile>("hypothesis file", [&] {
    HypothesisFile f;
    f.session_id = j.at("session_id").get<std::string>();
    for (const auto& h : j.at("hypotheses")) {
      f.hypotheses.push_back(
          {h.at("index").get<std::size_t>(), h.at("text").get<std::string>()});
    }
    return f;
  });
}

json ToJson(const HypothesisFile& f) {
  json hyps = json::array();
  for (const auto& h : f.hypotheses) {
    hyps.push_back({{"index", h.index}, {"text", h.text}});
  }
  return {{"session_id", f.session_id}, {"hypotheses", hyps}};
}

TranscriptFile TranscriptFileFromJson(const json& j) {
  return Wrap<TranscriptFile>("transcript file", [&] {
    TranscriptFile f;
    f.session_id = j.at("session_id").get<std::string>();
    f.language = j.value("language", std::string());
    const bool has_text = j.contains("text");
    const bool has_fragments = j.contains("fragments");
    if (has_text == has_fragments) {
      throw DataError("transcript file " + f.session_id +
                      ": exactly one of 'text' or 'fragments' is required");
    }
    if (has_text) {
      f.text = j.at("text").get<std::string>();
    } else {
      f.fragments = j.at("fragments").get<std::vector<std::string>>();
    }
    return f;
  });
}

json ToJson(const TranscriptFile& f) {
  json j = {{"session_id", f.session_id}, {"language", f.language}};
  if (f.fragments.empty()) {
    j["text"] = f.text;
  } else {
    j["fragments"] = f.fragments;
  }
  return j;
}

TranscriptDoc BuildDoc(const TranscriptFile& file, const Normalizer& norm) {
  if (file.fragments.empty()) {
    return TranscriptDoc(file.session_id, norm.Normalize(DecodeUtf8(file.text)));
  }
  std::vector<std::u32string> pieces;
  for (const auto& f : file.fragments) {
    auto piece = norm.Normalize(DecodeUtf8(f));
    if (!piece.empty()) pieces.push_back(std::move(piece));
  }
  return TranscriptDoc::FromFragments(file.session_id, pieces);
}

TruthFile TruthFileFromJson(const json& j) {
  return Wrap<TruthFile>("truth file", [&] {
    TruthFile f;
    f.session_id = j.at("session_id").get<std::string>();
    for (const auto& s : j.at("segments")) {
      f.segments.push_back({s.at("index").get<std::size_t>(),
                            s.at("text").get<std::string>(),
                            s.value("difficulty", 1.0)});
    }
    return f;
  });
}

json ToJson(const TruthFile& f) {
  json segs = json::array();
  for (const auto& s : f.segments) {
    segs.push_back(
        {{"index", s.index}, {"text", s.text}, {"difficulty", s.difficulty}});
  }
  return {{"session_id", f.session_id}, {"segments", segs}};
}

std::vector<SessionEntry> ReadSessionList(const fs::path& path) {
  const json j = ReadJsonFile(path);
  const fs::path base = path.parent_path();
  return Wrap<std::vector<SessionEntry>>(path.string(), [&] {
    std::vector<SessionEntry> out;
    std::set<std::string> seen;
    for (const auto& s : j.at("sessions")) {
      SessionEntry e;
      e.session_id = s.at("session_id").get<std::string>();
      if (!seen.insert(e.session_id).second) {
        throw DataError("duplicate session '" + e.session_id + "'");
      }
      e.segments = Resolve(base, s, "segments");
      e.hypotheses = Resolve(base, s, "hypotheses");
      e.transcript = Resolve(base, s, "transcript");
      e.truth = Resolve(base, s, "truth");
      if (e.segments.empty() || e.transcript.empty()) {
        throw DataError("session '" + e.session_id +
                        "' needs 'segments' and 'transcript'");
      }
      e.context.audio_ref = s.value("audio_ref", e.session_id);
      e.context.language_code = s.value("language", std::string());
      e.context.source_id = s.value("source_id", std::string());
      if (const auto d = OptString(s, "session_date")) {
        const std::string iso = "%Y-%m-%d";
        e.context.session_date = ParseDate(*d, std::span(&iso, 1));
        if (!e.context.session_date) {
          throw DataError("session '" + e.session_id + "': bad session_date");
        }
      }
      if (const auto it = s.find("quality_score");
          it != s.end() && !it->is_null()) {
        e.context.quality_score = it->get<double>();
      }
      if (const auto it = s.find("snr_db"); it != s.end() && !it->is_null()) {
        e.context.snr_db = it->get<double>();
      }
      out.push_back(std::move(e));
    }
    return out;
  });
}

json ToJson(const std::vector<SessionEntry>& sessions, const fs::path& base) {
  json list = json::array();
  for (const auto& e : sessions) {
    json s = {{"session_id", e.session_id},
              {"segments", RelativeTo(e.segments, base)},
              {"transcript", RelativeTo(e.transcript, base)},
              {"audio_ref", e.context.audio_ref},
              {"language", e.context.language_code},
              {"source_id", e.context.source_id}};
    if (!e.hypotheses.empty()) s["hypotheses"] = RelativeTo(e.hypotheses, base);
    if (!e.truth.empty()) s["truth"] = RelativeTo(e.truth, base);
    if (e.context.session_date) {
      s["session_date"] = FormatDate(*e.context.session_date);
    }
    if (e.context.quality_score) s["quality_score"] = *e.context.quality_score;
    if (e.context.snr_db) s["snr_db"] = *e.context.snr_db;
    list.push_back(std::move(s));
  }
  return {{"sessions", list}};
}

MetadataFile MetadataFileFromJson(const json& j) {
  return Wrap<MetadataFile>("metadata file", [&] {
    MetadataFile f;
    std::vector<std::string> file_formats = DefaultDateFormats();
    if (j.contains("date_formats")) {
      file_formats = j.at("date_formats").get<std::vector<std::string>>();
    }
    for (const auto& s : j.at("sessions")) {
      SessionMeta m;
      m.session_id = s.at("session_id").get<std::string>();
      m.source_id = s.value("source_id", std::string());
      const auto formats =
          s.contains("date_formats")
              ? s.at("date_formats").get<std::vector<std::string>>()
              : file_formats;
      if (const auto d = OptString(s, "date")) {
        m.session_date = ParseDate(*d, formats);
      }
      m.title = OptString(s, "title");
      m.doc_number = OptString(s, "doc_number");
      m.url = OptString(s, "url");
      f.sessions.push_back(std::move(m));
    }
    return f;
  });
}

json ToJson(const SessionMeta& m) {
  json j = {{"session_id", m.session_id}, {"source_id", m.source_id}};
  j["date"] = m.session_date ? json(FormatDate(*m.session_date)) : json(nullptr);
  j["title"] = m.title ? json(*m.title) : json(nullptr);
  j["doc_number"] = m.doc_number ? json(*m.doc_number) : json(nullptr);
  j["url"] = m.url ? json(*m.url) : json(nullptr);
  return j;
}

json MatchToJson(const AlignmentMatch& m) {
  return {{"session_id", m.segment.session_id},
          {"index", m.segment.index},
          {"span_offset", m.span_offset},
          {"span_len", m.span_len},
          {"edit_distance", m.cer.edit_distance},
          {"ref_len", m.cer.ref_len},
          {"retained", m.retained}};
}

AlignmentMatch MatchFromJson(const json& j) {
  return Wrap<AlignmentMatch>("match", [&] {
    AlignmentMatch m;
    m.segment.session_id = j.at("session_id").get<std::string>();
    m.segment.index = j.at("index").get<std::size_t>();
    m.span_offset = j.at("span_offset").get<std::size_t>();
    m.span_len = j.at("span_len").get<std::size_t>();
    m.cer.edit_distance = j.at("edit_distance").get<std::size_t>();
    m.cer.ref_len = j.at("ref_len").get<std::size_t>();
    m.retained = j.at("retained").get<bool>();
    return m;
  });
}

json ToJson(const SessionYield& y) {
  return {{"segments", y.segment_count},
          {"retained", y.retained_count},
          {"unaligned", y.unaligned_count},
          {"total_hours", DurationToHours(y.total_duration)},
          {"retained_hours", DurationToHours(y.retained_duration)},
          {"retention_rate", y.retention_rate()}};
}

json ToJson(const PassReport& r) {
  json j = {{"pass", r.pass_index},
            {"retained_hours", r.retained_hours()},
            {"new_hours", r.new_hours()},
            {"residual_hours", r.residual_hours()},
            {"retained_segments", r.retained_segments},
            {"new_segments", r.added_segments},
            {"residual_segments", r.residual_segments},
            {"skipped_segments", r.skipped_segments}};
  j["relative_gain"] =
      r.relative_gain ? json(*r.relative_gain) : json(nullptr);
  return j;
}

}  // namespace corpusalign
