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

#include "bit_parallel.h"

#include <cassert>

namespace corpusalign::internal {

PatternMatcher::PatternMatcher(std::span<const uint32_t> pattern,
                               std::size_t alphabet_size)
    : size_(pattern.size()),
      words_((pattern.size() + 63) / 64),
      alphabet_size_(alphabet_size),
      last_bit_(uint64_t{1} << ((pattern.size() + 63) % 64)),
      peq_((alphabet_size + 1) * ((pattern.size() + 63) / 64), 0) {
  assert(!pattern.empty());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const uint32_t code = pattern[i];
    if (code < alphabet_size_) {
      peq_[code * words_ + i / 64] |= uint64_t{1} << (i % 64);
    }
  }
}

void PatternMatcher::PrefixDistances(std::span<const uint32_t> text,
                                     std::span<uint32_t> out) const {
  Run<1>(text, out);
}

void PatternMatcher::SearchDistances(std::span<const uint32_t> text,
                                     std::span<uint32_t> out) const {
  Run<0>(text, out);
}

// kTopDelta is the horizontal delta entering row 0: +1 pins the alignment to
// the start of the text, 0 lets it start anywhere.
template <int kTopDelta>
void PatternMatcher::Run(std::span<const uint32_t> text,
                         std::span<uint32_t> out) const {
  assert(out.size() >= text.size());
  constexpr uint64_t kHigh = uint64_t{1} << 63;
  const std::size_t words = words_;
  uint64_t pv_small[4];
  uint64_t mv_small[4];
  std::vector<uint64_t> pv_large;
  std::vector<uint64_t> mv_large;
  uint64_t* pv = pv_small;
  uint64_t* mv = mv_small;
  if (words > 4) {
    pv_large.assign(words, ~uint64_t{0});
    mv_large.assign(words, 0);
    pv = pv_large.data();
    mv = mv_large.data();
  } else {
    for (std::size_t w = 0; w < words; ++w) {
      pv[w] = ~uint64_t{0};
      mv[w] = 0;
    }
  }
  int64_t score = static_cast<int64_t>(size_);
  for (std::size_t j = 0; j < text.size(); ++j) {
    const uint32_t code = text[j];
    // The extra all-zero row at alphabet_size_ serves unknown text symbols.
    const uint64_t* eq_row =
        &peq_[(code < alphabet_size_ ? code : alphabet_size_) * words];
    int hin = kTopDelta;
    for (std::size_t w = 0; w < words; ++w) {
      uint64_t eq = eq_row[w];
      const uint64_t pvw = pv[w];
      const uint64_t mvw = mv[w];
      const uint64_t hin_neg = hin < 0 ? 1 : 0;
      const uint64_t xv = eq | mvw;
      eq |= hin_neg;
      const uint64_t xh = (((eq & pvw) + pvw) ^ pvw) | eq;
      uint64_t ph = mvw | ~(xh | pvw);
      uint64_t mh = pvw & xh;
      const uint64_t out_bit = (w + 1 == words) ? last_bit_ : kHigh;
      const int hout = ((ph & out_bit) ? 1 : 0) - ((mh & out_bit) ? 1 : 0);
      ph <<= 1;
      mh <<= 1;
      mh |= hin_neg;
      ph |= hin > 0 ? 1 : 0;
      pv[w] = mh | ~(xv | ph);
      mv[w] = ph & xv;
      hin = hout;
    }
    score += hin;
    out[j] = static_cast<uint32_t>(score);
  }
}

template void PatternMatcher::Run<0>(std::span<const uint32_t>,
                                     std::span<uint32_t>) const;
template void PatternMatcher::Run<1>(std::span<const uint32_t>,
                                     std::span<uint32_t>) const;

}  // namespace corpusalign::internal
