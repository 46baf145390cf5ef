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

#ifndef CORPUSALIGN_METRICS_H_
#define CORPUSALIGN_METRICS_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <string_view>

namespace corpusalign {

// Character error rate kept as the exact pair (edit distance, reference
// length). The rate is derived; comparisons between two values are exact.
struct CerValue {
  std::size_t edit_distance = 0;
  std::size_t ref_len = 1;

  double value() const {
    return static_cast<double>(edit_distance) / static_cast<double>(ref_len);
  }

  bool operator==(const CerValue&) const = default;
};

// Orders two CER values by rate without rounding.
std::strong_ordering CompareRate(const CerValue& a, const CerValue& b);

// The single retention predicate of the pipeline: strict `value < threshold`.
bool IsRetained(const CerValue& cer, double threshold);

// Unit-cost edit distance over Unicode scalar values.
std::size_t Levenshtein(std::u32string_view a, std::u32string_view b);

// Exact distance when it is <= band, std::nullopt otherwise. band >= 1.
std::optional<std::size_t> BandedLevenshtein(std::u32string_view a,
                                             std::u32string_view b,
                                             std::size_t band);

// Normalized by the reference length. Throws ValidationError on an empty
// reference.
CerValue Cer(std::u32string_view hyp, std::u32string_view ref);

}  // namespace corpusalign

#endif  // CORPUSALIGN_METRICS_H_
