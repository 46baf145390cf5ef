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

#ifndef CORPUSALIGN_SRC_BIT_PARALLEL_H_
#define CORPUSALIGN_SRC_BIT_PARALLEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace corpusalign::internal {

// Bit-vector edit distance (Myers 1999, block form after Hyyro) of a fixed
// pattern against a text of dense symbol codes. Pattern symbols outside
// [0, alphabet_size) never match any text symbol.
class PatternMatcher {
 public:
  PatternMatcher(std::span<const uint32_t> pattern, std::size_t alphabet_size);

  std::size_t pattern_size() const { return size_; }

  // out[j] = lev(pattern, text[0 .. j]) for j in [0, text.size()).
  void PrefixDistances(std::span<const uint32_t> text,
                       std::span<uint32_t> out) const;

  // out[j] = min over s <= j + 1 of lev(pattern, text[s .. j]).
  void SearchDistances(std::span<const uint32_t> text,
                       std::span<uint32_t> out) const;

 private:
  template <int kTopDelta>
  void Run(std::span<const uint32_t> text, std::span<uint32_t> out) const;

  std::size_t size_;
  std::size_t words_;
  std::size_t alphabet_size_;
  uint64_t last_bit_;
  // peq_[code * words_ + w]: rows of word w whose pattern symbol is `code`.
  std::vector<uint64_t> peq_;
};

}  // namespace corpusalign::internal

#endif  // CORPUSALIGN_SRC_BIT_PARALLEL_H_
