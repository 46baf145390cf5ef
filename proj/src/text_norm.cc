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

#include "corpusalign/text_norm.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "corpusalign/errors.h"
#include "corpusalign/unicode.h"

namespace corpusalign {
namespace {

constexpr int kMaxPasses = 8;

struct CategoryName {
  const char* name;
  uint32_t mask;
};

constexpr CategoryName kCategories[] = {
    {"L", U_GC_L_MASK},   {"Lu", U_GC_LU_MASK}, {"Ll", U_GC_LL_MASK},
    {"Lt", U_GC_LT_MASK}, {"Lm", U_GC_LM_MASK}, {"Lo", U_GC_LO_MASK},
    {"M", U_GC_M_MASK},   {"Mn", U_GC_MN_MASK}, {"Mc", U_GC_MC_MASK},
    {"Me", U_GC_ME_MASK}, {"N", U_GC_N_MASK},   {"Nd", U_GC_ND_MASK},
    {"Nl", U_GC_NL_MASK}, {"No", U_GC_NO_MASK}, {"P", U_GC_P_MASK},
    {"Pc", U_GC_PC_MASK}, {"Pd", U_GC_PD_MASK}, {"Ps", U_GC_PS_MASK},
    {"Pe", U_GC_PE_MASK}, {"Pi", U_GC_PI_MASK}, {"Pf", U_GC_PF_MASK},
    {"Po", U_GC_PO_MASK}, {"S", U_GC_S_MASK},   {"Sm", U_GC_SM_MASK},
    {"Sc", U_GC_SC_MASK}, {"Sk", U_GC_SK_MASK}, {"So", U_GC_SO_MASK},
    {"Z", U_GC_Z_MASK},   {"Zs", U_GC_ZS_MASK}, {"Zl", U_GC_ZL_MASK},
    {"Zp", U_GC_ZP_MASK}, {"C", U_GC_C_MASK},   {"Cc", U_GC_CC_MASK},
    {"Cf", U_GC_CF_MASK}, {"Co", U_GC_CO_MASK}, {"Cn", U_GC_CN_MASK},
};

const char* KindName(RuleKind kind) {
  switch (kind) {
    case RuleKind::kRemove:
      return "remove";
    case RuleKind::kMap:
      return "map";
    case RuleKind::kCaseFold:
      return "case_fold";
    case RuleKind::kStripPunctuation:
      return "strip_punctuation";
  }
  return "?";
}

RuleKind KindFromName(const std::string& name, const std::string& rule) {
  if (name == "remove") return RuleKind::kRemove;
  if (name == "map") return RuleKind::kMap;
  if (name == "case_fold") return RuleKind::kCaseFold;
  if (name == "strip_punctuation") return RuleKind::kStripPunctuation;
  throw ConfigError("rule '" + rule + "': unknown type '" + name + "'");
}

char32_t ParseCodepoint(std::string_view text, const std::string& rule) {
  if (text.starts_with("U+") || text.starts_with("u+")) text.remove_prefix(2);
  if (text.empty() || text.size() > 6) {
    throw ConfigError("rule '" + rule + "': bad code point '" +
                      std::string(text) + "'");
  }
  uint32_t value = 0;
  for (char ch : text) {
    int digit;
    if (ch >= '0' && ch <= '9') {
      digit = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      digit = ch - 'a' + 10;
    } else if (ch >= 'A' && ch <= 'F') {
      digit = ch - 'A' + 10;
    } else {
      throw ConfigError("rule '" + rule + "': bad code point '" +
                        std::string(text) + "'");
    }
    value = value * 16 + static_cast<uint32_t>(digit);
  }
  if (value > 0x10FFFF) {
    throw ConfigError("rule '" + rule + "': code point out of range");
  }
  return static_cast<char32_t>(value);
}

CodepointRange ParseRange(const std::string& text, const std::string& rule) {
  const auto dots = text.find("..");
  CodepointRange range;
  if (dots == std::string::npos) {
    range.first = range.last = ParseCodepoint(text, rule);
  } else {
    range.first = ParseCodepoint(std::string_view(text).substr(0, dots), rule);
    range.last = ParseCodepoint(std::string_view(text).substr(dots + 2), rule);
  }
  if (range.first > range.last) {
    throw ConfigError("rule '" + rule + "': empty range '" + text + "'");
  }
  return range;
}

std::string FormatCodepoint(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(c));
  return buf;
}

std::u32string Nfc(std::u32string_view text) {
  if (text.empty()) return {};
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const auto source = icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32*>(text.data()),
      static_cast<int32_t>(text.size()));
  if (nfc->isNormalized(source, status) && U_SUCCESS(status)) {
    return std::u32string(text);
  }
  status = U_ZERO_ERROR;
  const icu::UnicodeString composed = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw ValidationError("NFC normalization failed");
  std::u32string out(static_cast<std::size_t>(composed.countChar32()), U'\0');
  status = U_ZERO_ERROR;
  composed.toUTF32(reinterpret_cast<UChar32*>(out.data()),
                   static_cast<int32_t>(out.size()), status);
  if (U_FAILURE(status)) throw ValidationError("NFC conversion failed");
  return out;
}

std::u32string CollapseWhitespace(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t c : text) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

NormRuleSet NormRuleSet::Generic(std::string language_code) {
  NormRuleSet set;
  set.language_code = std::move(language_code);
  NormRule punct;
  punct.kind = RuleKind::kStripPunctuation;
  punct.name = "punctuation";
  set.rules.push_back(std::move(punct));
  return set;
}

NormRuleSet RuleSetFromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("rule set must be a JSON object");
  NormRuleSet set;
  set.language_code = doc.value("language", std::string());
  if (set.language_code.empty()) {
    throw ConfigError("rule set is missing 'language'");
  }
  set.version = doc.value("version", NormRuleSet::kFormatVersion);
  if (set.version != NormRuleSet::kFormatVersion) {
    throw ConfigError("unsupported rule set version " +
                      std::to_string(set.version));
  }
  const auto rules = doc.find("rules");
  if (rules == doc.end()) return set;
  if (!rules->is_array()) throw ConfigError("'rules' must be an array");
  for (std::size_t i = 0; i < rules->size(); ++i) {
    const auto& item = (*rules)[i];
    std::string name = "rule[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ConfigError(name + " must be an object");
    if (item.contains("name") && item["name"].is_string()) {
      name = item["name"].get<std::string>();
    }
    if (!item.contains("type") || !item["type"].is_string()) {
      throw ConfigError("rule '" + name + "': missing 'type'");
    }
    NormRule rule;
    rule.name = name;
    rule.kind = KindFromName(item["type"].get<std::string>(), name);
    try {
      if (rule.kind == RuleKind::kRemove) {
        for (const auto& r : item.value("ranges", nlohmann::json::array())) {
          rule.ranges.push_back(ParseRange(r.get<std::string>(), name));
        }
        for (const auto& c :
             item.value("categories", nlohmann::json::array())) {
          rule.categories.push_back(c.get<std::string>());
        }
      } else if (rule.kind == RuleKind::kMap) {
        for (const auto& p : item.value("pairs", nlohmann::json::array())) {
          if (!p.is_array() || p.size() != 2) {
            throw ConfigError("rule '" + name +
                              "': map pairs must be [from, to]");
          }
          rule.pairs.emplace_back(p[0].get<std::string>(),
                                  p[1].get<std::string>());
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("rule '" + name + "': " + e.what());
    }
    set.rules.push_back(std::move(rule));
  }
  // Compiling validates the remaining constraints.
  Normalizer check(set);
  return set;
}

nlohmann::json RuleSetToJson(const NormRuleSet& set) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& rule : set.rules) {
    nlohmann::json item = {{"type", KindName(rule.kind)}, {"name", rule.name}};
    if (rule.kind == RuleKind::kRemove) {
      nlohmann::json ranges = nlohmann::json::array();
      for (const auto& r : rule.ranges) {
        ranges.push_back(r.first == r.last ? FormatCodepoint(r.first)
                                           : FormatCodepoint(r.first) + ".." +
                                                 FormatCodepoint(r.last));
      }
      item["ranges"] = ranges;
      item["categories"] = rule.categories;
    } else if (rule.kind == RuleKind::kMap) {
      nlohmann::json pairs = nlohmann::json::array();
      for (const auto& [from, to] : rule.pairs) pairs.push_back({from, to});
      item["pairs"] = pairs;
    }
    rules.push_back(std::move(item));
  }
  return {{"format", "corpusalign.normrules"},
          {"version", set.version},
          {"language", set.language_code},
          {"rules", rules}};
}

NormRuleSet LoadRuleSet(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule set " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return RuleSetFromJson(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

struct Normalizer::Compiled {
  struct MapEntry {
    std::u32string from;
    std::u32string to;
  };
  struct Step {
    RuleKind kind;
    std::vector<CodepointRange> ranges;
    uint32_t category_mask = 0;
    // Keyed by first code point; entries sorted longest-first.
    std::map<char32_t, std::vector<MapEntry>> map;
  };
  std::vector<Step> steps;

  static bool InClass(const Step& step, char32_t c) {
    if (step.category_mask != 0 &&
        (U_MASK(u_charType(static_cast<UChar32>(c))) & step.category_mask)) {
      return true;
    }
    for (const auto& r : step.ranges) {
      if (c >= r.first && c <= r.last) return true;
    }
    return false;
  }

  std::u32string ApplyRules(std::u32string_view text) const {
    std::u32string current(text);
    std::u32string next;
    for (const auto& step : steps) {
      next.clear();
      next.reserve(current.size());
      switch (step.kind) {
        case RuleKind::kRemove:
          for (char32_t c : current) {
            if (!InClass(step, c)) next.push_back(c);
          }
          break;
        case RuleKind::kStripPunctuation:
          for (char32_t c : current) {
            if (!(U_MASK(u_charType(static_cast<UChar32>(c))) & U_GC_P_MASK)) {
              next.push_back(c);
            }
          }
          break;
        case RuleKind::kCaseFold:
          for (char32_t c : current) {
            next.push_back(static_cast<char32_t>(
                u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT)));
          }
          break;
        case RuleKind::kMap:
          for (std::size_t i = 0; i < current.size();) {
            const auto bucket = step.map.find(current[i]);
            const MapEntry* hit = nullptr;
            if (bucket != step.map.end()) {
              for (const auto& entry : bucket->second) {
                if (std::u32string_view(current).substr(i).starts_with(
                        entry.from)) {
                  hit = &entry;
                  break;
                }
              }
            }
            if (hit != nullptr) {
              next += hit->to;
              i += hit->from.size();
            } else {
              next.push_back(current[i++]);
            }
          }
          break;
      }
      current.swap(next);
    }
    return current;
  }

  std::u32string Pass(std::u32string_view text) const {
    return CollapseWhitespace(Nfc(ApplyRules(text)));
  }
};

Normalizer::Normalizer(NormRuleSet rules) : rules_(std::move(rules)) {
  auto compiled = std::make_unique<Compiled>();
  for (const auto& rule : rules_.rules) {
    Compiled::Step step;
    step.kind = rule.kind;
    const std::string label = "rule '" + rule.name + "'";
    if (rule.kind == RuleKind::kRemove) {
      if (rule.ranges.empty() && rule.categories.empty()) {
        throw ConfigError(label + ": remove rule has no ranges or categories");
      }
      for (const auto& r : rule.ranges) {
        if (r.first > r.last || r.last > 0x10FFFF) {
          throw ConfigError(label + ": invalid code point range");
        }
      }
      step.ranges = rule.ranges;
      for (const auto& name : rule.categories) {
        const auto* hit = std::find_if(
            std::begin(kCategories), std::end(kCategories),
            [&](const CategoryName& c) { return name == c.name; });
        if (hit == std::end(kCategories)) {
          throw ConfigError(label + ": unknown general category '" + name +
                            "'");
        }
        step.category_mask |= hit->mask;
      }
    } else if (rule.kind == RuleKind::kMap) {
      if (rule.pairs.empty()) throw ConfigError(label + ": map has no pairs");
      std::vector<Compiled::MapEntry> entries;
      for (const auto& [from, to] : rule.pairs) {
        std::u32string f;
        std::u32string t;
        try {
          f = Nfc(DecodeUtf8(from));
          t = Nfc(DecodeUtf8(to));
        } catch (const ValidationError& e) {
          throw ConfigError(label + ": " + e.what());
        }
        if (f.empty()) throw ConfigError(label + ": empty map source");
        for (const auto& other : entries) {
          if (other.from == f) {
            throw ConfigError(label + ": duplicate map source '" + from + "'");
          }
        }
        entries.push_back({std::move(f), std::move(t)});
      }
      for (const auto& entry : entries) {
        for (const auto& other : entries) {
          if (entry.to.find(other.from) != std::u32string::npos) {
            throw ConfigError(label +
                              ": map target contains a map source, rule "
                              "would not be idempotent");
          }
        }
      }
      for (auto& entry : entries) {
        step.map[entry.from.front()].push_back(std::move(entry));
      }
      for (auto& [first, bucket] : step.map) {
        std::stable_sort(bucket.begin(), bucket.end(),
                         [](const auto& a, const auto& b) {
                           return a.from.size() > b.from.size();
                         });
      }
    }
    compiled->steps.push_back(std::move(step));
  }
  compiled_ = std::move(compiled);
}

Normalizer::~Normalizer() = default;
Normalizer::Normalizer(Normalizer&&) noexcept = default;
Normalizer& Normalizer::operator=(Normalizer&&) noexcept = default;

std::u32string Normalizer::Normalize(std::u32string_view text) const {
  std::u32string current = CollapseWhitespace(Nfc(text));
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::u32string next = compiled_->Pass(current);
    if (next == current) return next;
    current.swap(next);
  }
  throw ConfigError("rule set '" + rules_.language_code +
                    "' does not reach a fixed point");
}

std::string Normalizer::Normalize(std::string_view utf8) const {
  return EncodeUtf8(Normalize(DecodeUtf8(utf8)));
}

std::string Normalize(std::string_view text, const NormRuleSet& rules) {
  return Normalizer(rules).Normalize(text);
}

std::u32string ComposeNfc(std::u32string_view text) { return Nfc(text); }

std::vector<std::u32string_view> SplitWords(std::u32string_view text) {
  std::vector<std::u32string_view> words;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(U' ', start);
    if (end == std::u32string_view::npos) end = text.size();
    if (end > start) words.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return words;
}

}  // namespace corpusalign
