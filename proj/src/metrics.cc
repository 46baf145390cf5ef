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

#include "corpusalign/metrics.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "corpusalign/errors.h"

namespace corpusalign {

std::strong_ordering CompareRate(const CerValue& a, const CerValue& b) {
  // a.d / a.n <=> b.d / b.n with positive denominators. Products of two
  // size_t values below 2^32 cannot overflow 64 bits; wider inputs go
  // through 128-bit arithmetic.
  const unsigned __int128 lhs =
      static_cast<unsigned __int128>(a.edit_distance) * b.ref_len;
  const unsigned __int128 rhs =
      static_cast<unsigned __int128>(b.edit_distance) * a.ref_len;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool IsRetained(const CerValue& cer, double threshold) {
  return cer.value() < threshold;
}

std::size_t Levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + cost});
      diagonal = above;
    }
  }
  return row[b.size()];
}

std::optional<std::size_t> BandedLevenshtein(std::u32string_view a,
                                             std::u32string_view b,
                                             std::size_t band) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if ((n > m ? n - m : m - n) > band) return std::nullopt;
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
  // Only cells with |i - j| <= band are live; everything else is kInf.
  std::vector<std::size_t> prev(m + 1, kInf);
  std::vector<std::size_t> cur(m + 1, kInf);
  for (std::size_t j = 0; j <= std::min(m, band); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > band ? i - band : 0;
    const std::size_t hi = std::min(m, i + band);
    std::fill(cur.begin(), cur.end(), kInf);
    std::size_t row_min = kInf;
    if (lo == 0) {
      cur[0] = i;
      row_min = i;
    }
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      const std::size_t v =
          std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    // Row minima never decrease, so the band is already exceeded.
    if (row_min > band) return std::nullopt;
    prev.swap(cur);
  }
  if (prev[m] > band) return std::nullopt;
  return prev[m];
}

CerValue Cer(std::u32string_view hyp, std::u32string_view ref) {
  if (ref.empty()) {
    throw ValidationError("CER is undefined for an empty reference");
  }
  return CerValue{Levenshtein(hyp, ref), ref.size()};
}

}  // namespace corpusalign
