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

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "corpusalign/errors.h"
#include "corpusalign/json_io.h"
#include "corpusalign/refinement.h"
#include "corpusalign/text_norm.h"
#include "corpusalign/unicode.h"

namespace corpusalign::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char* MethodName(AlignMethod m) {
  return m == AlignMethod::kExhaustive ? "exhaustive" : "coarse_to_fine";
}

AlignMethod ParseMethod(const std::string& s) {
  if (s == "coarse_to_fine") return AlignMethod::kCoarseToFine;
  if (s == "exhaustive") return AlignMethod::kExhaustive;
  throw ConfigError("unknown align method '" + s + "'");
}

const char* ModeName(SearchMode m) {
  return m == SearchMode::kPerFragment ? "per_fragment" : "full_document";
}

SearchMode ParseMode(const std::string& s) {
  if (s == "full_document") return SearchMode::kFullDocument;
  if (s == "per_fragment") return SearchMode::kPerFragment;
  throw ConfigError("unknown search mode '" + s + "'");
}

void CheckKeys(const json& j, const std::string& what,
               std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ConfigError(what + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; })) {
      throw ConfigError(what + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end()) out = it->get<T>();
}

json ToJson(const CorpusParams& c) {
  return {{"sessions", c.session_count},
          {"session_minutes",
           std::chrono::duration<double, std::ratio<60>>(c.session_length)
               .count()},
          {"session_length_spread", c.session_length_spread},
          {"chars_per_second", c.chars_per_second},
          {"unalignable_fraction", c.unalignable_fraction},
          {"hard_fraction", c.hard_fraction},
          {"filler_probability", c.filler_probability},
          {"vocabulary_size", c.vocabulary_size},
          {"language", c.language},
          {"source_id", c.source_id}};
}

void ReadCorpus(const json& j, CorpusParams& c) {
  CheckKeys(j, "synth.corpus",
            {"sessions", "session_minutes", "session_length_spread",
             "chars_per_second",
             "unalignable_fraction", "hard_fraction", "filler_probability",
             "vocabulary_size", "language", "source_id"});
  Read(j, "sessions", c.session_count);
  if (const auto it = j.find("session_minutes"); it != j.end()) {
    c.session_length = SecondsToDuration(it->get<double>() * 60.0);
  }
  Read(j, "session_length_spread", c.session_length_spread);
  Read(j, "chars_per_second", c.chars_per_second);
  Read(j, "unalignable_fraction", c.unalignable_fraction);
  Read(j, "hard_fraction", c.hard_fraction);
  Read(j, "filler_probability", c.filler_probability);
  Read(j, "vocabulary_size", c.vocabulary_size);
  Read(j, "language", c.language);
  Read(j, "source_id", c.source_id);
}

// Output directory <root>/<name> that appears only once the stage has
// succeeded; on failure the partial directory is removed.
class StageDir {
 public:
  StageDir(const fs::path& root, const std::string& name)
      : final_(root / name), tmp_(root / ("." + name + ".partial")) {
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
  }
  StageDir(const StageDir&) = delete;
  StageDir& operator=(const StageDir&) = delete;
  ~StageDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(tmp_, ec);
    }
  }

  fs::path path(const std::string& file) const { return tmp_ / file; }
  const fs::path& dir() const { return tmp_; }
  const fs::path& final_dir() const { return final_; }

  void Commit() {
    fs::remove_all(final_);
    fs::rename(tmp_, final_);
    committed_ = true;
  }

 private:
  fs::path final_;
  fs::path tmp_;
  bool committed_ = false;
};

void WriteConfig(const StageDir& stage, const RunConfig& config,
                 const std::string& command) {
  json j = ToJson(config);
  j["command"] = command;
  WriteJsonFile(stage.path("config.json"), j);
}

Normalizer MakeNormalizer(const RunConfig& config) {
  return Normalizer(config.rules.empty() ? NormRuleSet::Generic()
                                         : LoadRuleSet(config.rules));
}

void CheckSessionId(const std::string& id) {
  if (id.empty() || id == "." || id == ".." ||
      id.find_first_of("/\\") != std::string::npos) {
    throw DataError("session id '" + id + "' is not usable as a file name");
  }
}

std::optional<Date> ParseIsoDate(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  const std::string iso = "%Y-%m-%d";
  auto d = ParseDate(*s, std::span(&iso, 1));
  if (!d) throw ConfigError("expected a YYYY-MM-DD date, got '" + *s + "'");
  return d;
}

std::string Jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::string WriteManifestText(std::span<const ManifestRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += RecordToJson(r).dump();
    out += '\n';
  }
  return out;
}

// A session of the align/refine list with its files loaded.
struct LoadedSession {
  SessionEntry entry;
  std::vector<Segment> segments;
  std::optional<TranscriptDoc> doc;
};

LoadedSession LoadSession(const SessionEntry& entry, const Normalizer& norm) {
  LoadedSession s{entry, SegmentsFromJson(ReadJsonFile(entry.segments)), {}};
  for (const auto& seg : s.segments) {
    if (seg.session_id != entry.session_id) {
      throw DataError(entry.segments.string() + ": session '" +
                      seg.session_id + "' does not match list entry '" +
                      entry.session_id + "'");
    }
  }
  auto transcript = TranscriptFileFromJson(ReadJsonFile(entry.transcript));
  transcript.session_id = entry.session_id;
  try {
    s.doc.emplace(BuildDoc(transcript, norm));
  } catch (const ValidationError& e) {
    throw DataError(entry.transcript.string() + ": " + e.what());
  }
  return s;
}

SessionYield& operator+=(SessionYield& a, const SessionYield& b) {
  a.segment_count += b.segment_count;
  a.retained_count += b.retained_count;
  a.unaligned_count += b.unaligned_count;
  a.total_duration += b.total_duration;
  a.retained_duration += b.retained_duration;
  return a;
}

// ---------------------------------------------------------------- commands

void CmdNormalize(RunConfig& config, const fs::path& in, const fs::path& root,
                  std::ostream& out) {
  config.paths["input"] = in.string();
  const Normalizer norm = MakeNormalizer(config);
  std::ifstream file(in, std::ios::binary);
  if (!file) throw DataError("cannot open " + in.string());
  StageDir stage(root, "normalize");
  WriteConfig(stage, config, "normalize");
  std::string text, line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      text += EncodeUtf8(norm.Normalize(DecodeUtf8(line)));
    } catch (const ValidationError& e) {
      throw DataError(in.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
    text += '\n';
  }
  WriteTextFile(stage.path(in.filename().string()), text);
  stage.Commit();
  out << "normalized " << line_no << " lines into "
      << (stage.final_dir() / in.filename()).string() << "\n";
}

void CmdSegment(RunConfig& config, const std::vector<std::string>& inputs,
                const fs::path& root, std::ostream& out) {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    config.paths["regions." + std::to_string(i)] = inputs[i];
  }
  StageDir stage(root, "segment");
  WriteConfig(stage, config, "segment");
  json summary = json::array();
  std::set<std::string> seen;
  for (const auto& input : inputs) {
    const RegionFile regions = RegionFileFromJson(ReadJsonFile(input));
    CheckSessionId(regions.session_id);
    if (!seen.insert(regions.session_id).second) {
      throw DataError("session '" + regions.session_id + "' given twice");
    }
    SegmentationResult result;
    try {
      result = SegmentSession(regions.session_id, regions.regions,
                              config.segmenter);
    } catch (const ValidationError& e) {
      throw DataError(input + ": " + e.what());
    }
    WriteJsonFile(stage.path(regions.session_id + ".json"),
                  SegmentationToJson(regions.session_id, result,
                                     config.segmenter));
    Duration total{0};
    for (const auto& s : result.segments) total += s.duration();
    summary.push_back({{"session_id", regions.session_id},
                       {"segments", result.segments.size()},
                       {"dropped", result.dropped.size()},
                       {"hours", DurationToHours(total)}});
  }
  WriteJsonFile(stage.path("summary.json"), {{"sessions", summary}});
  stage.Commit();
  out << "segmented " << inputs.size() << " sessions into "
      << stage.final_dir().string() << "\n";
}

std::vector<std::u32string> SampleHypotheses(const fs::path& file,
                                             const Normalizer& norm,
                                             std::size_t count) {
  auto hyps = HypothesisFileFromJson(ReadJsonFile(file)).hypotheses;
  std::sort(hyps.begin(), hyps.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  std::vector<std::u32string> sample;
  for (const auto& h : hyps) {
    if (sample.size() == count) break;
    auto text = norm.Normalize(DecodeUtf8(h.text));
    if (!text.empty()) sample.push_back(std::move(text));
  }
  return sample;
}

void CmdPair(RunConfig& config, const fs::path& audio_meta,
             const fs::path& transcript_meta, const std::string& hyp_dir,
             const std::string& transcript_dir, const fs::path& root,
             std::ostream& out) {
  config.paths["audio_meta"] = audio_meta.string();
  config.paths["transcript_meta"] = transcript_meta.string();
  if (!hyp_dir.empty()) config.paths["hypotheses_dir"] = hyp_dir;
  if (!transcript_dir.empty()) config.paths["transcripts_dir"] = transcript_dir;
  auto audio = MetadataFileFromJson(ReadJsonFile(audio_meta)).sessions;
  auto transcripts =
      MetadataFileFromJson(ReadJsonFile(transcript_meta)).sessions;
  for (const auto* list : {&audio, &transcripts}) {
    for (const auto& m : *list) m.Validate();
  }
  StageDir stage(root, "pair");
  WriteConfig(stage, config, "pair");
  PairingResult result = PairSessions(audio, transcripts, config.pair.weights,
                                      config.pair.accept_threshold);
  const bool validate = !hyp_dir.empty() && !transcript_dir.empty();
  const Normalizer norm = MakeNormalizer(config);
  json pairs = json::array();
  for (auto& c : result.pairs) {
    std::string note;
    if (validate) {
      const auto sample =
          SampleHypotheses(fs::path(hyp_dir) / (c.audio.session_id + ".json"),
                           norm, config.pair.validation_sample);
      auto tf = TranscriptFileFromJson(ReadJsonFile(
          fs::path(transcript_dir) / (c.transcript.session_id + ".json")));
      const TranscriptDoc doc = BuildDoc(tf, norm);
      try {
        ApplyValidation(c, ValidatePair(sample, doc, config.pair.min_overlap),
                        config.pair.accept_threshold);
      } catch (const InconclusiveError& e) {
        note = e.what();
      }
    }
    json p = {{"audio_session", c.audio.session_id},
              {"transcript_session", c.transcript.session_id},
              {"score", c.score},
              {"validated", c.validated}};
    p["vocabulary_overlap"] =
        c.vocabulary_overlap ? json(*c.vocabulary_overlap) : json(nullptr);
    if (!note.empty()) p["note"] = note;
    pairs.push_back(std::move(p));
  }
  json unpaired_audio = json::array(), unpaired_transcripts = json::array();
  for (const auto& m : result.unpaired_audio) {
    unpaired_audio.push_back(ToJson(m));
  }
  for (const auto& m : result.unpaired_transcripts) {
    unpaired_transcripts.push_back(ToJson(m));
  }
  WriteJsonFile(stage.path("pairs.json"), {{"pairs", pairs}});
  WriteJsonFile(stage.path("unpaired.json"),
                {{"audio", unpaired_audio}, {"transcripts", unpaired_transcripts}});
  stage.Commit();
  out << "paired " << result.pairs.size() << " sessions ("
      << result.unpaired_audio.size() << " audio, "
      << result.unpaired_transcripts.size() << " transcripts unpaired)\n";
}

void CmdAlign(RunConfig& config, const fs::path& sessions_path,
              const fs::path& root, std::ostream& out) {
  config.paths["sessions"] = sessions_path.string();
  const auto entries = ReadSessionList(sessions_path);
  const Normalizer norm = MakeNormalizer(config);
  StageDir stage(root, "align");
  WriteConfig(stage, config, "align");
  std::vector<json> match_rows;
  std::string manifest;
  json yields = json::array();
  SessionYield total;
  SessionOptions options{config.mode, config.method, config.workers};
  for (const auto& entry : entries) {
    if (entry.hypotheses.empty()) {
      throw DataError("session '" + entry.session_id +
                      "' has no hypotheses file");
    }
    LoadedSession s = LoadSession(entry, norm);
    const auto hyp_file = HypothesisFileFromJson(ReadJsonFile(entry.hypotheses));
    std::map<std::size_t, std::u32string> hyp_by_index;
    for (const auto& h : hyp_file.hypotheses) {
      std::u32string text;
      try {
        text = norm.Normalize(DecodeUtf8(h.text));
      } catch (const ValidationError& e) {
        throw DataError(entry.hypotheses.string() + ": " + e.what());
      }
      if (!hyp_by_index.emplace(h.index, std::move(text)).second) {
        throw DataError(entry.hypotheses.string() + ": duplicate index " +
                        std::to_string(h.index));
      }
    }
    std::vector<HypothesisRecord> records;
    std::map<std::size_t, std::size_t> position;
    for (const auto& seg : s.segments) {
      const auto it = hyp_by_index.find(seg.index);
      position[seg.index] = records.size();
      records.push_back(
          {seg, it == hyp_by_index.end() ? std::u32string() : it->second});
    }
    const SessionAlignment result =
        AlignSession(records, *s.doc, config.align, options);
    for (const auto& m : result.matches) {
      const auto& rec = records[position.at(m.segment.index)];
      match_rows.push_back(MatchToJson(m));
      manifest += RecordToJson(BuildRecord(rec.segment, m, *s.doc,
                                           rec.hypothesis, entry.context))
                      .dump();
      manifest += '\n';
    }
    json y = ToJson(result.yield);
    y["session_id"] = entry.session_id;
    y["unaligned_indices"] = result.unaligned;
    yields.push_back(std::move(y));
    total += result.yield;
  }
  WriteTextFile(stage.path("matches.jsonl"), Jsonl(match_rows));
  WriteTextFile(stage.path("manifest.jsonl"), manifest);
  WriteJsonFile(stage.path("yield.json"),
                {{"sessions", yields}, {"total", ToJson(total)}});
  stage.Commit();
  out << "aligned " << total.segment_count << " segments, retained "
      << total.retained_count << " ("
      << DurationToHours(total.retained_duration) << " h)\n";
}

void CmdRefine(RunConfig& config, const fs::path& sessions_path,
               const fs::path& root, std::ostream& out) {
  config.paths["sessions"] = sessions_path.string();
  const auto entries = ReadSessionList(sessions_path);
  const Normalizer norm = MakeNormalizer(config);
  std::vector<PoolItem> pool;
  DocIndex docs;
  std::map<std::string, RecordContext> contexts;
  for (const auto& entry : entries) {
    if (entry.truth.empty()) {
      throw DataError("session '" + entry.session_id +
                      "' has no truth file for the simulated transcriber");
    }
    LoadedSession s = LoadSession(entry, norm);
    const TruthFile truth = TruthFileFromJson(ReadJsonFile(entry.truth));
    std::map<std::size_t, const TruthEntry*> by_index;
    for (const auto& t : truth.segments) by_index[t.index] = &t;
    for (const auto& seg : s.segments) {
      const auto it = by_index.find(seg.index);
      if (it == by_index.end()) continue;
      PoolItem item;
      item.segment = seg;
      item.audio_ref = entry.context.audio_ref;
      item.true_text = norm.Normalize(DecodeUtf8(it->second->text));
      item.difficulty = it->second->difficulty;
      item.id = pool.size();
      pool.push_back(std::move(item));
    }
    docs.emplace(entry.session_id, std::move(*s.doc));
    contexts[entry.session_id] = entry.context;
  }
  StageDir stage(root, "refine");
  WriteConfig(stage, config, "refine");
  RefineConfig rc;
  rc.max_passes = config.refine.max_passes;
  rc.min_relative_gain = config.refine.min_relative_gain;
  rc.align_params = config.align;
  rc.mode = config.mode;
  rc.workers = config.workers;
  const SimTrainer trainer(config.refine.curve);
  RefineResult result = Refine(pool, docs, trainer, rc);

  json passes = json::array();
  std::string csv = "pass,retained_hours,new_hours,residual_hours,relative_gain\n";
  for (const auto& r : result.reports) {
    passes.push_back(ToJson(r));
    WriteJsonFile(stage.path("pass_" + std::to_string(r.pass_index) + ".json"),
                  ToJson(r));
    std::ostringstream row;
    row.precision(6);
    row << std::fixed << r.pass_index << ',' << r.retained_hours() << ','
        << r.new_hours() << ',' << r.residual_hours() << ',';
    if (r.relative_gain) row << *r.relative_gain;
    csv += row.str() + "\n";
  }
  auto retained = result.retained;
  std::sort(retained.begin(), retained.end(),
            [](const PassMatch& a, const PassMatch& b) {
              return a.pool_index < b.pool_index;
            });
  std::string manifest;
  for (const auto& m : retained) {
    const auto& item = pool[m.pool_index];
    const auto& sid = item.segment.session_id;
    manifest += RecordToJson(BuildRecord(item.segment, m.match, docs.at(sid),
                                         m.hypothesis, contexts.at(sid),
                                         m.pass_index))
                    .dump();
    manifest += '\n';
  }
  json residual = json::array();
  for (std::size_t i : result.residual) {
    residual.push_back({{"session_id", pool[i].segment.session_id},
                        {"index", pool[i].segment.index}});
  }
  WriteJsonFile(stage.path("passes.json"), {{"passes", passes}});
  WriteTextFile(stage.path("passes.csv"), csv);
  WriteTextFile(stage.path("manifest.jsonl"), manifest);
  WriteJsonFile(stage.path("residual.json"), {{"residual", residual}});
  stage.Commit();
  out << "refined " << pool.size() << " segments in "
      << result.reports.size() << " passes\n";
}

void CmdStats(RunConfig& config, const fs::path& manifest,
              const fs::path& root, std::ostream& out) {
  config.paths["manifest"] = manifest.string();
  const auto records = ReadManifest(manifest);
  StageDir stage(root, "stats");
  WriteConfig(stage, config, "stats");
  const ManifestStats stats = ComputeStats(records);
  WriteJsonFile(stage.path("stats.json"), StatsToJson(stats));
  WriteTextFile(stage.path("histograms.txt"), RenderHistograms(stats));
  stage.Commit();
  out << stats.record_count << " records, " << stats.total_hours() << " h\n";
}

struct FilterFlags {
  std::optional<double> min_duration;
  std::optional<double> max_duration;
  std::optional<double> min_quality;
  std::optional<std::string> language;
  std::optional<std::string> source;
  std::optional<std::string> date_from;
  std::optional<std::string> date_to;
  bool retained_only = false;
};

void CmdFilter(RunConfig& config, const fs::path& manifest,
               const std::optional<double>& max_cer, const FilterFlags& flags,
               const fs::path& root, std::ostream& out) {
  config.paths["manifest"] = manifest.string();
  FilterPredicate p;
  p.max_cer = max_cer;
  if (flags.min_duration) p.min_duration = SecondsToDuration(*flags.min_duration);
  if (flags.max_duration) p.max_duration = SecondsToDuration(*flags.max_duration);
  p.min_quality = flags.min_quality;
  p.language = flags.language;
  p.source = flags.source;
  p.date_from = ParseIsoDate(flags.date_from);
  p.date_to = ParseIsoDate(flags.date_to);
  p.retained_only = flags.retained_only;
  const auto records = ReadManifest(manifest);
  StageDir stage(root, "filter");
  json cfg = ToJson(config);
  cfg["command"] = "filter";
  json predicate = json::object();
  predicate["max_cer"] = max_cer ? json(*max_cer) : json(nullptr);
  predicate["min_duration"] =
      flags.min_duration ? json(*flags.min_duration) : json(nullptr);
  predicate["max_duration"] =
      flags.max_duration ? json(*flags.max_duration) : json(nullptr);
  predicate["min_quality"] =
      flags.min_quality ? json(*flags.min_quality) : json(nullptr);
  predicate["language"] = flags.language ? json(*flags.language) : json(nullptr);
  predicate["source"] = flags.source ? json(*flags.source) : json(nullptr);
  predicate["date_from"] =
      flags.date_from ? json(*flags.date_from) : json(nullptr);
  predicate["date_to"] = flags.date_to ? json(*flags.date_to) : json(nullptr);
  predicate["retained_only"] = flags.retained_only;
  cfg["predicate"] = predicate;
  WriteJsonFile(stage.path("config.json"), cfg);
  const auto kept = Filter(records, p);
  WriteTextFile(stage.path("manifest.jsonl"), WriteManifestText(kept));
  stage.Commit();
  out << "kept " << kept.size() << " of " << records.size() << " records\n";
}

void CmdSplit(RunConfig& config, const fs::path& manifest,
              const fs::path& root, std::ostream& out) {
  config.paths["manifest"] = manifest.string();
  const auto records = ReadManifest(manifest);
  StageDir stage(root, "split");
  WriteConfig(stage, config, "split");
  const SplitResult split = Split(records, config.split);
  WriteTextFile(stage.path("train.jsonl"), WriteManifestText(split.train));
  WriteTextFile(stage.path("test.jsonl"), WriteManifestText(split.test));
  stage.Commit();
  out << "train " << split.train.size() << ", test " << split.test.size()
      << "\n";
}

void CmdSynth(RunConfig& config, const fs::path& root, std::ostream& out) {
  const auto sessions = MakeCorpus(config.synth.corpus);
  const auto pool = BuildPool(sessions);
  StageDir stage(root, "synth");
  WriteConfig(stage, config, "synth");
  for (const char* sub : {"regions", "segments", "truth", "transcripts",
                          "hypotheses"}) {
    fs::create_directories(stage.dir() / sub);
  }
  const SimTranscriber first_pass(
      MixedNoise(config.synth.noise, SplitMix64(config.seed)));
  std::vector<SessionEntry> entries;
  json audio_meta = json::array(), transcript_meta = json::array();
  std::size_t next_item = 0;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    const auto& session = sessions[s];
    const std::string file = session.session_id + ".json";
    WriteJsonFile(stage.dir() / "regions" / file,
                  ToJson(RegionFile{session.session_id, session.regions}));
    WriteJsonFile(stage.dir() / "segments" / file,
                  SegmentationToJson(session.session_id, session.segmentation,
                                     config.synth.corpus.segmenter));
    TruthFile truth{session.session_id, {}};
    HypothesisFile hyps{session.session_id, {}};
    for (std::size_t i = 0; i < session.truths.size(); ++i) {
      const auto& seg = session.segmentation.segments[i];
      truth.segments.push_back(
          {seg.index, EncodeUtf8(session.truths[i]), session.difficulty[i]});
      const auto& item = pool[next_item++];
      hyps.hypotheses.push_back(
          {seg.index, EncodeUtf8(first_pass.Transcribe(item, item.id << 8))});
    }
    WriteJsonFile(stage.dir() / "truth" / file, ToJson(truth));
    WriteJsonFile(stage.dir() / "hypotheses" / file, ToJson(hyps));
    TranscriptFile tf;
    tf.session_id = session.session_id;
    tf.language = config.synth.corpus.language;
    tf.text = EncodeUtf8(session.transcript);
    WriteJsonFile(stage.dir() / "transcripts" / file, ToJson(tf));

    SessionEntry e;
    e.session_id = session.session_id;
    e.segments = stage.dir() / "segments" / file;
    e.hypotheses = stage.dir() / "hypotheses" / file;
    e.transcript = stage.dir() / "transcripts" / file;
    e.truth = stage.dir() / "truth" / file;
    e.context.audio_ref = "audio/" + session.session_id + ".wav";
    e.context.language_code = config.synth.corpus.language;
    e.context.source_id = config.synth.corpus.source_id;
    e.context.session_date = session.date;
    entries.push_back(std::move(e));

    const auto ymd = session.date;
    char dotted[16];
    std::snprintf(dotted, sizeof dotted, "%02u.%02u.%04d",
                  static_cast<unsigned>(ymd.day()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<int>(ymd.year()));
    audio_meta.push_back({{"session_id", session.session_id},
                          {"source_id", config.synth.corpus.source_id},
                          {"date", FormatDate(session.date)},
                          {"title", "Session " + std::to_string(s + 1)}});
    transcript_meta.push_back({{"session_id", session.session_id},
                               {"source_id", config.synth.corpus.source_id},
                               {"date", dotted},
                               {"title", "Record of session " +
                                             std::to_string(s + 1)},
                               {"doc_number", std::to_string(s + 1)}});
  }
  WriteJsonFile(stage.path("sessions.json"), ToJson(entries, stage.dir()));
  WriteJsonFile(stage.path("audio_meta.json"), {{"sessions", audio_meta}});
  WriteJsonFile(stage.path("transcript_meta.json"),
                {{"sessions", transcript_meta}});
  stage.Commit();
  out << "wrote " << sessions.size() << " synthetic sessions ("
      << pool.size() << " segments) to " << stage.final_dir().string()
      << "\n";
}

}  // namespace

RunConfig::RunConfig() {
  refine.curve.initial = MixedNoise(0.25, 0);
  refine.curve.floor_rate = 0.05;
  refine.curve.halving_hours = 20.0;
  ApplySeed();
}

void RunConfig::ApplySeed() {
  split.seed = seed;
  refine.curve.initial.seed = SplitMix64(seed ^ 0x7472616e73ULL);
  synth.corpus.seed = seed;
}

json ToJson(const RunConfig& c) {
  json paths = json::object();
  for (const auto& [role, path] : c.paths) paths[role] = path;
  json j = {{"seed", c.seed},
            {"workers", c.workers},
            {"rules", c.rules},
            {"method", MethodName(c.method)},
            {"mode", ModeName(c.mode)},
            {"align", corpusalign::ToJson(c.align)},
            {"segmenter", corpusalign::ToJson(c.segmenter)},
            {"split", {{"train_fraction", c.split.train_fraction}}},
            {"refine",
             {{"max_passes", c.refine.max_passes},
              {"min_relative_gain", c.refine.min_relative_gain},
              {"curve", corpusalign::ToJson(c.refine.curve)}}},
            {"pair",
             {{"weights", corpusalign::ToJson(c.pair.weights)},
              {"accept_threshold", c.pair.accept_threshold},
              {"min_overlap", c.pair.min_overlap},
              {"validation_sample", c.pair.validation_sample}}},
            {"synth",
             {{"corpus", ToJson(c.synth.corpus)}, {"noise", c.synth.noise}}},
            {"paths", paths}};
  return j;
}

RunConfig RunConfigFromJson(const json& j) {
  CheckKeys(j, "config",
            {"seed", "workers", "rules", "method", "mode", "align",
             "segmenter", "split", "refine", "pair", "synth", "paths",
             "command", "predicate"});
  try {
    RunConfig c;
    Read(j, "seed", c.seed);
    Read(j, "workers", c.workers);
    Read(j, "rules", c.rules);
    if (j.contains("method")) c.method = ParseMethod(j.at("method"));
    if (j.contains("mode")) c.mode = ParseMode(j.at("mode"));
    if (j.contains("align")) c.align = AlignParamsFromJson(j.at("align"));
    if (j.contains("segmenter")) {
      c.segmenter = SegmenterParamsFromJson(j.at("segmenter"));
    }
    if (j.contains("split")) {
      CheckKeys(j.at("split"), "split", {"train_fraction", "seed"});
      Read(j.at("split"), "train_fraction", c.split.train_fraction);
    }
    if (j.contains("refine")) {
      const json& r = j.at("refine");
      CheckKeys(r, "refine", {"max_passes", "min_relative_gain", "curve"});
      Read(r, "max_passes", c.refine.max_passes);
      Read(r, "min_relative_gain", c.refine.min_relative_gain);
      if (r.contains("curve")) {
        c.refine.curve = LearningCurveFromJson(r.at("curve"));
      }
    }
    if (j.contains("pair")) {
      const json& p = j.at("pair");
      CheckKeys(p, "pair",
                {"weights", "accept_threshold", "min_overlap",
                 "validation_sample"});
      if (p.contains("weights")) {
        c.pair.weights = PairWeightsFromJson(p.at("weights"));
      }
      Read(p, "accept_threshold", c.pair.accept_threshold);
      Read(p, "min_overlap", c.pair.min_overlap);
      Read(p, "validation_sample", c.pair.validation_sample);
    }
    if (j.contains("synth")) {
      const json& s = j.at("synth");
      CheckKeys(s, "synth", {"corpus", "noise"});
      if (s.contains("corpus")) ReadCorpus(s.at("corpus"), c.synth.corpus);
      Read(s, "noise", c.synth.noise);
    }
    c.ApplySeed();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const DataError*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kExitData;
  }
  return kExitInternal;
}

namespace {

void Validate(const RunConfig& c) {
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  c.align.Validate();
  c.segmenter.Validate();
  c.split.Validate();
  c.refine.curve.Validate();
  if (c.refine.max_passes < 1) throw ConfigError("max_passes must be >= 1");
  if (!(c.refine.min_relative_gain >= 0.0)) {
    throw ConfigError("min_relative_gain must be >= 0");
  }
  c.pair.weights.Validate();
  for (double v : {c.pair.accept_threshold, c.pair.min_overlap}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError("pair thresholds must lie in [0, 1]");
    }
  }
  c.synth.corpus.Validate();
  if (!(c.synth.noise >= 0.0 && c.synth.noise < 1.0)) {
    throw ConfigError("synth noise must lie in [0, 1)");
  }
}

}  // namespace

int Run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Build speech corpora from long recordings and their "
               "published transcripts",
               "corpusalign"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_root = "out";
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> cer_threshold;
  std::optional<double> train_fraction;
  std::optional<std::string> rules;
  std::optional<std::string> method;
  std::optional<std::string> mode;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_root, "output root; each stage writes <out>/<stage>");
  app.add_option("--seed", seed, "global seed");
  app.add_option("--workers", workers, "worker threads for align/refine");
  app.add_option("--cer-threshold", cer_threshold,
                 "retention threshold (align/refine) or max CER (filter)");
  app.add_option("--train-fraction", train_fraction, "split train share");
  app.add_option("--rules", rules, "normalization rule file");
  app.add_option("--method", method, "coarse_to_fine | exhaustive");
  app.add_option("--mode", mode, "full_document | per_fragment");

  std::string normalize_in;
  auto* normalize = app.add_subcommand("normalize", "normalize a text file");
  normalize->add_option("--in", normalize_in, "input text")->required();

  std::vector<std::string> region_files;
  auto* segment = app.add_subcommand("segment", "cut speech regions into segments");
  segment->add_option("--regions", region_files, "region files")->required();

  std::string audio_meta, transcript_meta, hyp_dir, transcript_dir;
  auto* pair = app.add_subcommand("pair", "pair audio sessions with transcripts");
  pair->add_option("--audio-meta", audio_meta)->required();
  pair->add_option("--transcript-meta", transcript_meta)->required();
  pair->add_option("--hypotheses-dir", hyp_dir,
                   "per-audio-session hypothesis files for validation");
  pair->add_option("--transcripts-dir", transcript_dir,
                   "per-transcript files for validation");

  std::string sessions_path;
  auto* align = app.add_subcommand("align", "align hypotheses to transcripts");
  align->add_option("--sessions", sessions_path, "session list")->required();
  auto* refine = app.add_subcommand("refine", "iterative alignment refinement");
  refine->add_option("--sessions", sessions_path, "session list")->required();
  std::optional<int> max_passes;
  refine->add_option("--max-passes", max_passes);

  std::string manifest_path;
  auto* stats = app.add_subcommand("stats", "manifest statistics");
  stats->add_option("--manifest", manifest_path)->required();
  auto* filter = app.add_subcommand("filter", "filter a manifest");
  filter->add_option("--manifest", manifest_path)->required();
  FilterFlags ff;
  filter->add_option("--min-duration", ff.min_duration, "seconds");
  filter->add_option("--max-duration", ff.max_duration, "seconds");
  filter->add_option("--min-quality", ff.min_quality);
  filter->add_option("--language", ff.language);
  filter->add_option("--source", ff.source);
  filter->add_option("--date-from", ff.date_from, "YYYY-MM-DD, inclusive");
  filter->add_option("--date-to", ff.date_to, "YYYY-MM-DD, inclusive");
  filter->add_flag("--retained-only", ff.retained_only);
  auto* split = app.add_subcommand("split", "session-atomic train/test split");
  split->add_option("--manifest", manifest_path)->required();

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::optional<std::size_t> synth_sessions;
  std::optional<double> synth_minutes, synth_noise;
  synth->add_option("--sessions", synth_sessions);
  synth->add_option("--minutes", synth_minutes, "length of each session");
  synth->add_option("--noise", synth_noise, "first-pass hypothesis error rate");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config " + config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
      config = RunConfigFromJson(j);
    }
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (rules) config.rules = *rules;
    if (method) config.method = ParseMethod(*method);
    if (mode) config.mode = ParseMode(*mode);
    if (cer_threshold && !filter->parsed()) {
      config.align.cer_threshold = *cer_threshold;
    }
    if (train_fraction) config.split.train_fraction = *train_fraction;
    if (max_passes) config.refine.max_passes = *max_passes;
    if (synth_sessions) config.synth.corpus.session_count = *synth_sessions;
    if (synth_minutes) {
      config.synth.corpus.session_length =
          SecondsToDuration(*synth_minutes * 60.0);
    }
    if (synth_noise) config.synth.noise = *synth_noise;
    config.ApplySeed();
    config.paths["output_root"] = out_root;
    Validate(config);
    // Fail on a bad rule file before any stage output exists.
    if (!config.rules.empty()) LoadRuleSet(config.rules);

    const fs::path root(out_root);
    fs::create_directories(root);
    if (normalize->parsed()) {
      CmdNormalize(config, normalize_in, root, out);
    } else if (segment->parsed()) {
      CmdSegment(config, region_files, root, out);
    } else if (pair->parsed()) {
      CmdPair(config, audio_meta, transcript_meta, hyp_dir, transcript_dir,
              root, out);
    } else if (align->parsed()) {
      CmdAlign(config, sessions_path, root, out);
    } else if (refine->parsed()) {
      CmdRefine(config, sessions_path, root, out);
    } else if (stats->parsed()) {
      CmdStats(config, manifest_path, root, out);
    } else if (filter->parsed()) {
      CmdFilter(config, manifest_path, cer_threshold, ff, root, out);
    } else if (split->parsed()) {
      CmdSplit(config, manifest_path, root, out);
    } else if (synth->parsed()) {
      CmdSynth(config, root, out);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
}

}  // namespace corpusalign::cli
