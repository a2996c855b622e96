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

// Challenge metrics: mAP (multi-label), accuracy (single-label) and UAR.
//
// Average precision is the non-interpolated prefix-precision form
//   AP = (1/P) * sum over ranks k holding a positive of precision@k,
// with samples ranked by descending score and ties broken by ascending
// original index.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "convaug/core/error.hpp"

namespace convaug {

/// Argument problem in a metric call; lists every offending item.
class MetricError : public InvalidArgument {
 public:
  MetricError(const std::string& what, std::vector<std::string> offenders = {})
      : InvalidArgument(format(what, offenders)), offenders_(std::move(offenders)) {}

  const std::vector<std::string>& offenders() const noexcept { return offenders_; }

 private:
  static std::string format(const std::string& what, const std::vector<std::string>& o) {
    std::string s = what;
    for (std::size_t i = 0; i < o.size() && i < 10; ++i) s += (i ? ", " : ": ") + o[i];
    if (o.size() > 10) s += ", ... (" + std::to_string(o.size()) + " total)";
    return s;
  }
  std::vector<std::string> offenders_;
};

/// Ranking order used by average_precision: descending score, ties by
/// ascending index.
inline std::vector<std::size_t> rank_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

/// Returns std::nullopt when `relevance` has no positive (AP undefined).
inline std::optional<double> average_precision(std::span<const double> scores,
                                               std::span<const std::uint8_t> relevance) {
  if (scores.size() != relevance.size()) {
    throw MetricError("scores and relevance differ in length (" + std::to_string(scores.size()) +
                      " vs " + std::to_string(relevance.size()) + ")");
  }
  if (scores.empty()) throw MetricError("average precision needs at least one sample");
  for (double s : scores) {
    if (std::isnan(s)) throw MetricError("NaN score");
  }
  const auto order = rank_by_score(scores);
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (relevance[order[k]]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

struct MapResult {
  double value = 0.0;
  std::vector<std::optional<double>> per_class;  // nullopt: class skipped
  std::size_t skipped_classes = 0;
};

/// mAP over a samples x classes layout (row-major, `n_classes` columns).
/// Classes with no positive are skipped and counted.
inline MapResult mean_average_precision(std::span<const double> scores,
                                        std::span<const std::uint8_t> relevance,
                                        std::size_t n_classes) {
  if (n_classes == 0) throw MetricError("n_classes must be >= 1");
  if (scores.size() != relevance.size() || scores.size() % n_classes != 0 || scores.empty()) {
    throw MetricError("score/relevance matrices must be non-empty, equal in size and have " +
                      std::to_string(n_classes) + " columns");
  }
  const std::size_t n = scores.size() / n_classes;
  MapResult r;
  r.per_class.resize(n_classes);
  std::vector<double> col_s(n);
  std::vector<std::uint8_t> col_r(n);
  double sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      col_s[i] = scores[i * n_classes + c];
      col_r[i] = relevance[i * n_classes + c];
    }
    r.per_class[c] = average_precision(col_s, col_r);
    if (r.per_class[c]) {
      sum += *r.per_class[c];
      ++scored;
    } else {
      ++r.skipped_classes;
    }
  }
  if (scored == 0) throw MetricError("mAP undefined: no class has a positive sample");
  r.value = sum / static_cast<double>(scored);
  return r;
}

struct ScoredPrediction {
  std::string sample_id;
  std::vector<double> scores;
};

struct BinaryTruth {
  std::string sample_id;
  std::vector<std::uint8_t> bits;
};

/// mAP with predictions and ground truth matched by sample_id.
inline MapResult mean_average_precision(const std::vector<ScoredPrediction>& predictions,
                                        const std::vector<BinaryTruth>& truth) {
  if (truth.empty()) throw MetricError("no ground-truth samples");
  const std::size_t k = truth.front().bits.size();
  std::unordered_map<std::string, const ScoredPrediction*> by_id;
  std::vector<std::string> dup, unknown, missing, arity;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.sample_id, &p).second) dup.push_back(p.sample_id);
  }
  if (!dup.empty()) throw MetricError("duplicate prediction ids", dup);
  std::unordered_map<std::string, bool> truth_ids;
  for (const auto& t : truth) {
    truth_ids.emplace(t.sample_id, true);
    if (t.bits.size() != k) arity.push_back(t.sample_id);
  }
  for (const auto& p : predictions) {
    if (!truth_ids.contains(p.sample_id)) unknown.push_back(p.sample_id);
    else if (p.scores.size() != k) arity.push_back(p.sample_id);
  }
  for (const auto& t : truth) {
    if (!by_id.contains(t.sample_id)) missing.push_back(t.sample_id);
  }
  if (!unknown.empty()) throw MetricError("predictions for unknown sample ids", unknown);
  if (!missing.empty()) throw MetricError("missing predictions for sample ids", missing);
  if (!arity.empty()) throw MetricError("class-count mismatch (expected " + std::to_string(k) + ")", arity);

  std::vector<double> s;
  std::vector<std::uint8_t> r;
  s.reserve(truth.size() * k);
  r.reserve(truth.size() * k);
  for (const auto& t : truth) {
    const auto& p = *by_id.at(t.sample_id);
    s.insert(s.end(), p.scores.begin(), p.scores.end());
    r.insert(r.end(), t.bits.begin(), t.bits.end());
  }
  return mean_average_precision(s, r, k);
}

/// n x n counts; rows are ground truth, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes) : n_(n_classes), cells_(n_classes * n_classes, 0) {
    if (n_classes == 0) throw MetricError("confusion matrix needs >= 1 class");
  }

  void add(int truth, int predicted) {
    if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= n_ ||
        static_cast<std::size_t>(predicted) >= n_) {
      throw MetricError("label outside [0, " + std::to_string(n_) + "): truth " +
                        std::to_string(truth) + ", predicted " + std::to_string(predicted));
    }
    ++cells_[static_cast<std::size_t>(truth) * n_ + static_cast<std::size_t>(predicted)];
  }

  std::size_t n_classes() const noexcept { return n_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return cells_[truth * n_ + predicted]; }

  std::size_t row_sum(std::size_t truth) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < n_; ++p) s += at(truth, p);
    return s;
  }

  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < n_; ++c) s += at(c, c);
    return s;
  }

  std::size_t total() const { return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0}); }

 private:
  std::size_t n_;
  std::vector<std::size_t> cells_;
};

inline ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> truth,
                                        std::size_t n_classes) {
  if (predicted.size() != truth.size()) {
    throw MetricError("predicted and truth differ in length (" + std::to_string(predicted.size()) +
                      " vs " + std::to_string(truth.size()) + ")");
  }
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

inline double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw MetricError("predicted and truth differ in length (" + std::to_string(predicted.size()) +
                      " vs " + std::to_string(truth.size()) + ")");
  }
  if (truth.empty()) throw MetricError("accuracy needs at least one sample");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

struct UarResult {
  double value = 0.0;
  std::vector<std::optional<double>> recall;  // nullopt: class absent from truth
  std::size_t absent_classes = 0;
  ConfusionMatrix confusion{1};
};

/// Macro-averaged recall over classes present in `truth`.
inline UarResult uar(std::span<const int> predicted, std::span<const int> truth, std::size_t n_classes) {
  UarResult r;
  r.confusion = confusion_matrix(predicted, truth, n_classes);
  r.recall.resize(n_classes);
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::size_t support = r.confusion.row_sum(c);
    if (support == 0) {
      ++r.absent_classes;
      continue;
    }
    r.recall[c] = static_cast<double>(r.confusion.at(c, c)) / static_cast<double>(support);
    sum += *r.recall[c];
    ++present;
  }
  if (present == 0) throw MetricError("UAR undefined: no ground-truth samples");
  r.value = sum / static_cast<double>(present);
  return r;
}

}  // namespace convaug
