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

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <thread>
#include <vector>

#include "corpusalign/errors.h"
#include "corpusalign/rng.h"
#include "corpusalign/unicode.h"

namespace corpusalign {
namespace {

const std::filesystem::path kRules = CORPUSALIGN_RULES_DIR;

NormRuleSet Empty() { return NormRuleSet{"und", 1, {}}; }

bool InHarakat(char32_t c) {
  return (c >= 0x064B && c <= 0x065F) || c == 0x0670;
}

// Draws code points from a mix of scripts, marks, spaces and punctuation
// chosen to exercise composition, folding and removal together.
std::u32string RandomUnicode(Rng& rng, std::size_t len) {
  static const std::pair<char32_t, char32_t> kBlocks[] = {
      {0x20, 0x7E},     {0x09, 0x0D},     {0xA0, 0xFF},     {0x0300, 0x036F},
      {0x0391, 0x03C9}, {0x0600, 0x06FF}, {0x1100, 0x1112}, {0x1161, 0x1175},
      {0x11A8, 0x11C2}, {0x1E00, 0x1EFF}, {0x2000, 0x206F}, {0x3000, 0x303F},
      {0x4E00, 0x4E40}, {0xAC00, 0xAC40}, {0xFB50, 0xFB60}, {0x1F600, 0x1F64F},
      {0x0130, 0x0131}, {0x00DF, 0x00DF}, {0x1E9E, 0x1E9E}, {0x0345, 0x0345}};
  std::u32string s;
  for (std::size_t i = 0; i < len; ++i) {
    const auto& [lo, hi] = kBlocks[rng.Below(std::size(kBlocks))];
    s.push_back(static_cast<char32_t>(lo + rng.Below(hi - lo + 1)));
  }
  return s;
}

std::vector<NormRuleSet> AllRuleSets() {
  NormRuleSet folded = NormRuleSet::Generic();
  folded.rules.push_back({RuleKind::kCaseFold, "fold", {}, {}, {}});
  return {Empty(), NormRuleSet::Generic(), folded,
          LoadRuleSet(kRules / "generic.json"), LoadRuleSet(kRules / "ar.json"),
          LoadRuleSet(kRules / "yue.json")};
}

TEST(NormalizeTest, WhitespaceOnlyWithEmptyRules) {
  EXPECT_EQ(Normalize("a   b\n c", Empty()), "a b c");
  EXPECT_EQ(Normalize("  \t lead and trail \r\n", Empty()), "lead and trail");
}

TEST(NormalizeTest, EmptyInput) {
  for (const auto& rules : AllRuleSets()) {
    EXPECT_EQ(Normalize("", rules), "") << rules.language_code;
  }
}

TEST(NormalizeTest, ComposesToNfc) {
  EXPECT_EQ(Normalize("été", Empty()), "été");
  // Conjoining jamo compose to a syllable.
  EXPECT_EQ(Normalize("가", Empty()), "가");
}

TEST(NormalizeTest, GenericStripsPunctuationAndKeepsCase) {
  EXPECT_EQ(Normalize("Hello, World! (Again)", NormRuleSet::Generic()),
            "Hello World Again");
}

TEST(NormalizeTest, PunctuationOnlyBecomesEmpty) {
  EXPECT_EQ(Normalize(" ... !!! ", NormRuleSet::Generic()), "");
}

TEST(NormalizeTest, CaseFoldIsOptIn) {
  NormRuleSet rules = Empty();
  EXPECT_EQ(Normalize("ABC Straße", rules), "ABC Straße");
  rules.rules.push_back({RuleKind::kCaseFold, "fold", {}, {}, {}});
  EXPECT_EQ(Normalize("ABC ΣΊΣΥΦΟΣ", rules), "abc σίσυφοσ");
}

TEST(NormalizeTest, ArabicHarakatRemovedCharacterByCharacter) {
  // The removal class is enumerated here independently of the rule file.
  std::vector<char32_t> marks;
  for (char32_t c = 0x064B; c <= 0x065F; ++c) marks.push_back(c);
  marks.push_back(0x0670);
  const std::u32string letters = U"بتثجحخدذرزسشصضطظعغفقكلمنهوي";
  NormRuleSet rules{"ar", 1,
                    {{RuleKind::kRemove, "harakat",
                      {{0x064B, 0x065F}, {0x0670, 0x0670}}, {}, {}}}};
  const Normalizer norm(rules);
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    std::u32string text;
    for (int k = 0; k < 40; ++k) {
      const auto u = rng.Below(3);
      if (u == 0) {
        text.push_back(marks[rng.Below(marks.size())]);
      } else if (u == 1) {
        text.push_back(letters[rng.Below(letters.size())]);
      } else if (!text.empty() && text.back() != U' ') {
        text.push_back(U' ');
      }
    }
    // Composition runs first, so a hamza above that composes with its base
    // letter is part of that letter, not a free mark.
    std::u32string expected;
    for (char32_t c : ComposeNfc(text)) {
      if (!InHarakat(c)) expected.push_back(c);
    }
    // Removing marks can make words adjacent to spaces collapse.
    expected = Normalizer(Empty()).Normalize(expected);
    EXPECT_EQ(norm.Normalize(text), expected) << i;
  }
}

TEST(NormalizeTest, ArabicRuleFile) {
  const Normalizer norm(LoadRuleSet(kRules / "ar.json"));
  // "al-madrasatu" with full vocalization and a hamza-bearing alef.
  const std::u32string in = U"أَلْمَدْرَسَةُ الكَبِيرَةُ، إِلَى آخِرِهِ";
  const std::u32string out = norm.Normalize(in);
  EXPECT_EQ(out, U"المدرسه الكبيره الى اخره");
  for (char32_t c : out) EXPECT_FALSE(InHarakat(c)) << std::hex << static_cast<unsigned>(c);
}

TEST(NormalizeTest, CantoneseToneMarksMapped) {
  const Normalizer norm(LoadRuleSet(kRules / "yue.json"));
  EXPECT_EQ(norm.Normalize(std::string("Gwóngdūng wá, 裏面")),
            "gwongdung wa 裡面");
}

TEST(NormalizeTest, IdempotentOnRandomUnicode) {
  for (const auto& rules : AllRuleSets()) {
    const Normalizer norm(rules);
    Rng rng(1000);
    for (int i = 0; i < 1000; ++i) {
      const auto text = RandomUnicode(rng, rng.Below(40));
      const auto once = norm.Normalize(text);
      ASSERT_EQ(norm.Normalize(once), once)
          << rules.language_code << " case " << i << ": " << EncodeUtf8(text);
    }
  }
}

TEST(NormalizeTest, RemovalOnlyNeverLengthens) {
  NormRuleSet rules{"x", 1,
                    {{RuleKind::kRemove, "marks", {}, {"Mn"}, {}},
                     {RuleKind::kStripPunctuation, "p", {}, {}, {}}}};
  const Normalizer norm(rules);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto text = ComposeNfc(RandomUnicode(rng, rng.Below(40)));
    ASSERT_LE(norm.Normalize(text).size(), text.size()) << i;
  }
}

TEST(NormalizeTest, SameResultAcrossThreads) {
  const Normalizer norm(LoadRuleSet(kRules / "ar.json"));
  Rng rng(8);
  std::vector<std::u32string> inputs;
  for (int i = 0; i < 200; ++i) inputs.push_back(RandomUnicode(rng, 30));
  std::vector<std::u32string> expected;
  for (const auto& s : inputs) expected.push_back(norm.Normalize(s));
  std::vector<std::vector<std::u32string>> got(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (const auto& s : inputs) got[t].push_back(norm.Normalize(s));
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& g : got) EXPECT_EQ(g, expected);
}

TEST(NormalizeTest, RejectsInvalidUtf8) {
  EXPECT_THROW(Normalize(std::string("a\xff"), Empty()), ValidationError);
}

TEST(RuleSetTest, JsonRoundTrip) {
  for (const auto& rules : AllRuleSets()) {
    EXPECT_EQ(RuleSetFromJson(RuleSetToJson(rules)), rules);
  }
}

TEST(RuleSetTest, MalformedRulesNameTheRule) {
  const auto expect_error = [](const NormRuleSet& rules,
                               const std::string& fragment) {
    try {
      Normalizer n(rules);
      FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos)
          << e.what();
    }
  };
  expect_error({"x", 1, {{RuleKind::kRemove, "nothing", {}, {}, {}}}},
               "nothing");
  expect_error({"x", 1, {{RuleKind::kRemove, "badcat", {}, {"Zz"}, {}}}},
               "badcat");
  expect_error({"x", 1, {{RuleKind::kMap, "empty", {}, {}, {}}}}, "empty");
  expect_error(
      {"x", 1, {{RuleKind::kMap, "dup", {}, {}, {{"a", "b"}, {"a", "c"}}}}},
      "dup");
  expect_error({"x", 1, {{RuleKind::kMap, "grow", {}, {}, {{"a", "aa"}}}}},
               "grow");
}

TEST(RuleSetTest, UnknownRuleTypeIsConfigError) {
  const auto doc = nlohmann::json::parse(
      R"({"format":"corpusalign.normrules","version":1,"language":"x",
          "rules":[{"type":"transliterate","name":"t"}]})");
  EXPECT_THROW(RuleSetFromJson(doc), ConfigError);
}

TEST(RuleSetTest, MissingFileIsConfigError) {
  EXPECT_THROW(LoadRuleSet(kRules / "does_not_exist.json"), ConfigError);
}

TEST(SplitWordsTest, SplitsOnSpaces) {
  const auto words = SplitWords(U"one two  three");
  ASSERT_EQ(words.size(), 3u);
  EXPECT_EQ(words[2], U"three");
  EXPECT_TRUE(SplitWords(U"").empty());
}

}  // namespace
}  // namespace corpusalign
