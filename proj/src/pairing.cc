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

#include "corpusalign/pairing.h"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <locale>
#include <set>
#include <sstream>

#include "corpusalign/errors.h"
#include "corpusalign/text_norm.h"
#include "corpusalign/unicode.h"

namespace corpusalign {
namespace {

const Normalizer& TitleNormalizer() {
  static const Normalizer normalizer = [] {
    NormRuleSet rules = NormRuleSet::Generic("und");
    NormRule fold;
    fold.kind = RuleKind::kCaseFold;
    fold.name = "fold";
    rules.rules.push_back(fold);
    return Normalizer(rules);
  }();
  return normalizer;
}

std::string Trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool SameDocNumber(std::string_view a, std::string_view b) {
  const std::string x = Trimmed(a);
  const std::string y = Trimmed(b);
  return x.size() == y.size() &&
         std::equal(x.begin(), x.end(), y.begin(), [](char p, char q) {
           return std::tolower(static_cast<unsigned char>(p)) ==
                  std::tolower(static_cast<unsigned char>(q));
         });
}

bool HasTitle(const SessionMeta& m) {
  return m.title && !TitleNormalizer().Normalize(*m.title).empty();
}

}  // namespace

void SessionMeta::Validate() const {
  if (!session_date && !(title && !title->empty()) &&
      !(doc_number && !doc_number->empty())) {
    throw ValidationError("session metadata '" + session_id +
                          "' has no date, title or document number");
  }
}

const std::vector<std::string>& DefaultDateFormats() {
  static const std::vector<std::string> formats = {
      "%Y-%m-%d", "%d.%m.%Y", "%d/%m/%Y", "%Y%m%d", "%B %d, %Y", "%d %B %Y",
  };
  return formats;
}

std::optional<Date> ParseDate(std::string_view text,
                              std::span<const std::string> formats) {
  const std::string input = Trimmed(text);
  if (input.empty()) return std::nullopt;
  for (const auto& format : formats) {
    std::istringstream in(input);
    in.imbue(std::locale::classic());
    std::tm tm = {};
    in >> std::get_time(&tm, format.c_str());
    if (in.fail()) continue;
    in >> std::ws;
    if (!in.eof()) continue;
    const Date date{std::chrono::year(tm.tm_year + 1900),
                    std::chrono::month(static_cast<unsigned>(tm.tm_mon + 1)),
                    std::chrono::day(static_cast<unsigned>(tm.tm_mday))};
    if (date.ok()) return date;
  }
  return std::nullopt;
}

std::string FormatDate(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

void PairWeights::Validate() const {
  if (date < 0 || doc_number < 0 || title < 0 ||
      date + doc_number + title <= 0) {
    throw ConfigError("pair weights must be non-negative with a positive sum");
  }
}

double TitleSimilarity(std::string_view a, std::string_view b) {
  const Normalizer& norm = TitleNormalizer();
  const std::u32string x = norm.Normalize(DecodeUtf8(a));
  const std::u32string y = norm.Normalize(DecodeUtf8(b));
  const std::size_t longest = std::max(x.size(), y.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(Levenshtein(x, y)) /
                   static_cast<double>(longest);
}

double PairScore(const SessionMeta& a, const SessionMeta& b,
                 const PairWeights& weights) {
  weights.Validate();
  double weighted = 0.0;
  double total = 0.0;
  if (a.session_date && b.session_date && weights.date > 0) {
    total += weights.date;
    if (*a.session_date == *b.session_date) weighted += weights.date;
  }
  if (a.doc_number && b.doc_number && !Trimmed(*a.doc_number).empty() &&
      !Trimmed(*b.doc_number).empty() && weights.doc_number > 0) {
    total += weights.doc_number;
    if (SameDocNumber(*a.doc_number, *b.doc_number)) {
      weighted += weights.doc_number;
    }
  }
  if (HasTitle(a) && HasTitle(b) && weights.title > 0) {
    total += weights.title;
    weighted += weights.title * TitleSimilarity(*a.title, *b.title);
  }
  if (total == 0.0) {
    throw IncomparableError("sessions '" + a.session_id + "' and '" +
                            b.session_id + "' share no comparable field");
  }
  return std::clamp(weighted / total, 0.0, 1.0);
}

VocabularyCheck ValidatePair(std::span<const std::u32string> sample_hyps,
                             const TranscriptDoc& doc, double min_overlap) {
  std::set<std::u32string_view> sample;
  for (const auto& hyp : sample_hyps) {
    for (auto word : SplitWords(hyp)) sample.insert(word);
  }
  if (sample.empty()) {
    throw InconclusiveError("vocabulary check for session '" +
                            doc.session_id() + "' has no sample words");
  }
  std::set<std::u32string_view> vocabulary;
  for (auto word : SplitWords(doc.text())) vocabulary.insert(word);
  std::size_t shared = 0;
  for (auto word : sample) shared += vocabulary.count(word);
  VocabularyCheck check;
  check.overlap =
      static_cast<double>(shared) / static_cast<double>(sample.size());
  check.pass = check.overlap >= min_overlap;
  return check;
}

PairingResult PairSessions(std::span<const SessionMeta> audio,
                           std::span<const SessionMeta> transcripts,
                           const PairWeights& weights,
                           double accept_threshold) {
  if (audio.empty() || transcripts.empty()) {
    throw ValidationError("pairing needs at least one audio and one transcript");
  }
  for (const auto& m : audio) m.Validate();
  for (const auto& m : transcripts) m.Validate();

  struct Scored {
    double score;
    std::size_t a;
    std::size_t t;
  };
  std::vector<Scored> scored;
  for (std::size_t a = 0; a < audio.size(); ++a) {
    for (std::size_t t = 0; t < transcripts.size(); ++t) {
      try {
        scored.push_back({PairScore(audio[a], transcripts[t], weights), a, t});
      } catch (const IncomparableError&) {
      }
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& x, const Scored& y) {
                     if (x.score != y.score) return x.score > y.score;
                     if (x.a != y.a) return x.a < y.a;
                     return x.t < y.t;
                   });

  PairingResult result;
  std::vector<bool> audio_used(audio.size(), false);
  std::vector<bool> transcript_used(transcripts.size(), false);
  for (const Scored& s : scored) {
    if (s.score < accept_threshold) break;
    if (audio_used[s.a] || transcript_used[s.t]) continue;
    audio_used[s.a] = transcript_used[s.t] = true;
    PairCandidate c;
    c.audio = audio[s.a];
    c.transcript = transcripts[s.t];
    c.score = s.score;
    result.pairs.push_back(std::move(c));
  }
  for (std::size_t a = 0; a < audio.size(); ++a) {
    if (!audio_used[a]) result.unpaired_audio.push_back(audio[a]);
  }
  for (std::size_t t = 0; t < transcripts.size(); ++t) {
    if (!transcript_used[t]) result.unpaired_transcripts.push_back(transcripts[t]);
  }
  return result;
}

void ApplyValidation(PairCandidate& candidate, const VocabularyCheck& check,
                     double accept_threshold) {
  candidate.vocabulary_overlap = check.overlap;
  candidate.validated = check.pass && candidate.score >= accept_threshold;
}

}  // namespace corpusalign
