// Copyright 2026 The convaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Brute-force metric references used by unit and acceptance tests.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace convaug::fixtures {

/// Quadratic AP: item j ranks at or above item i when s[j] > s[i], or the
/// scores tie and j <= i. Precision at a positive i is the positive fraction
/// of the items ranked at or above it.
inline double oracle_ap(const std::vector<double>& s, const std::vector<std::uint8_t>& r) {
  double sum = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!r[i]) continue;
    ++positives;
    std::size_t above = 0, hits = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] > s[i] || (s[j] == s[i] && j <= i)) {
        ++above;
        hits += r[j];
      }
    }
    sum += static_cast<double>(hits) / static_cast<double>(above);
  }
  return positives ? sum / static_cast<double>(positives) : -1.0;
}

/// Mean of per-column oracle_ap over columns with a positive.
inline double oracle_map(const std::vector<double>& s, const std::vector<std::uint8_t>& r, std::size_t k) {
  const std::size_t n = s.size() / k;
  double sum = 0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> cs(n);
    std::vector<std::uint8_t> cr(n);
    for (std::size_t i = 0; i < n; ++i) {
      cs[i] = s[i * k + c];
      cr[i] = r[i * k + c];
    }
    const double ap = oracle_ap(cs, cr);
    if (ap >= 0) {
      sum += ap;
      ++used;
    }
  }
  return sum / static_cast<double>(used);
}

}  // namespace convaug::fixtures
