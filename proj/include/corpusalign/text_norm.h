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

#ifndef CORPUSALIGN_TEXT_NORM_H_
#define CORPUSALIGN_TEXT_NORM_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace corpusalign {

enum class RuleKind {
  kRemove,            // drop every code point in a class
  kMap,               // replace literal strings, longest match first
  kCaseFold,          // simple Unicode case folding
  kStripPunctuation,  // drop general category P*
};

struct CodepointRange {
  char32_t first = 0;
  char32_t last = 0;
  bool operator==(const CodepointRange&) const = default;
};

struct NormRule {
  RuleKind kind = RuleKind::kRemove;
  std::string name;
  // kRemove: union of explicit ranges and general categories ("Mn", "P").
  std::vector<CodepointRange> ranges;
  std::vector<std::string> categories;
  // kMap: (from, to) pairs in UTF-8.
  std::vector<std::pair<std::string, std::string>> pairs;

  bool operator==(const NormRule&) const = default;
};

// Ordered, declarative normalization rules for one language. Whitespace
// collapse and NFC composition are always applied and are not listed.
struct NormRuleSet {
  static constexpr int kFormatVersion = 1;

  std::string language_code;
  int version = kFormatVersion;
  std::vector<NormRule> rules;

  bool operator==(const NormRuleSet&) const = default;

  // The conservative default: punctuation stripped, case preserved.
  static NormRuleSet Generic(std::string language_code = "und");
};

NormRuleSet RuleSetFromJson(const nlohmann::json& doc);
nlohmann::json RuleSetToJson(const NormRuleSet& rules);
NormRuleSet LoadRuleSet(const std::filesystem::path& path);

// Compiled form of a NormRuleSet. Construction validates every rule and
// throws ConfigError naming the offending rule; Normalize is const and safe
// to call concurrently.
class Normalizer {
 public:
  explicit Normalizer(NormRuleSet rules);
  ~Normalizer();
  Normalizer(Normalizer&&) noexcept;
  Normalizer& operator=(Normalizer&&) noexcept;

  const NormRuleSet& rules() const { return rules_; }

  std::u32string Normalize(std::u32string_view text) const;
  std::string Normalize(std::string_view utf8) const;

 private:
  struct Compiled;
  NormRuleSet rules_;
  std::unique_ptr<const Compiled> compiled_;
};

// Convenience wrapper; compiles `rules` on every call.
std::string Normalize(std::string_view text, const NormRuleSet& rules);

// NFC composition only.
std::u32string ComposeNfc(std::u32string_view text);

// Splits canonical text on single spaces.
std::vector<std::u32string_view> SplitWords(std::u32string_view text);

}  // namespace corpusalign

#endif  // CORPUSALIGN_TEXT_NORM_H_
