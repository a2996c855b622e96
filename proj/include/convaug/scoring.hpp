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

// Submission scorer.
//
// Prediction CSV, one of:
//   sample_id,s0,...,s{K-1}   scores (bodily: K = 14; next_speaker: one per
//                             seat, cells past a group's size may be empty;
//                             eye_contact: K = 4, argmax is the prediction)
//   sample_id,label           single class (eye_contact only; 0..3 or name)
//
// Next-speaker scores are thresholded (>= 0.5 is speaking) and every
// (sample, participant) pair is one binary instance for UAR.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "convaug/core/error.hpp"
#include "convaug/core/text.hpp"
#include "convaug/manifest.hpp"
#include "convaug/metrics.hpp"

namespace convaug {

/// Scoring aborted; one entry per problem (malformed rows carry line numbers).
class ScoringError : public Error {
 public:
  explicit ScoringError(std::vector<std::string> diagnostics)
      : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<std::string>& d) {
    std::string s = "scoring aborted with " + std::to_string(d.size()) + " problem(s)";
    if (!d.empty()) s += "; first: " + d.front();
    return s;
  }
  std::vector<std::string> diagnostics_;
};

struct ScoreOptions {
  std::optional<Split> split;           // restrict to one split; default: all labeled rows
  bool strict_participants = false;     // error on scores for seats a group does not have
  double speaker_threshold = 0.5;
};

struct ScoreReport {
  Task task = Task::kBodily;
  std::string metric_name;
  double value = 0.0;
  std::vector<std::pair<std::string, std::optional<double>>> per_class;
  std::vector<std::string> warnings;
  std::size_t samples = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["task"] = to_string(task);
    j["metric_name"] = metric_name;
    j["value"] = value;
    nlohmann::ordered_json pc = nlohmann::ordered_json::object();
    for (const auto& [name, v] : per_class) {
      pc[name] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    }
    j["per_class"] = pc;
    j["warnings"] = warnings;
    return j;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << std::setprecision(6) << std::fixed;
    out << "task:    " << to_string(task) << "\n";
    out << "samples: " << samples << "\n";
    out << metric_name << ": " << value << "\n";
    for (const auto& [name, v] : per_class) {
      out << "  " << std::left << std::setw(16) << name;
      if (v) out << *v; else out << "skipped";
      out << "\n";
    }
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
  }
};

struct PredictionTable {
  enum class Form { kScores, kLabel };
  struct Row {
    std::string sample_id;
    std::size_t line = 0;
    std::vector<std::optional<double>> scores;  // kScores; empty cell -> nullopt
    int label = -1;                             // kLabel
  };
  Form form = Form::kScores;
  std::size_t columns = 0;  // K for kScores
  std::vector<Row> rows;
};

/// Parses a prediction CSV, throwing ScoringError listing every malformed row.
inline PredictionTable parse_predictions(std::istream& in, const std::string& name = "<predictions>") {
  PredictionTable t;
  std::vector<std::string> diags;
  text::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ScoringError({name + ":1: empty predictions file"});
  const auto header = text::split(line, ',');
  if (header.size() == 2 && header[0] == "sample_id" && header[1] == "label") {
    t.form = PredictionTable::Form::kLabel;
  } else {
    bool ok = header.size() >= 2 && header[0] == "sample_id";
    for (std::size_t i = 1; ok && i < header.size(); ++i) ok = header[i] == "s" + std::to_string(i - 1);
    if (!ok) {
      throw ScoringError({name + ":1: header must be sample_id,label or sample_id,s0,...,s{K-1}"});
    }
    t.form = PredictionTable::Form::kScores;
    t.columns = header.size() - 1;
  }
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    if (text::trim(line).empty()) continue;
    const std::string where = name + ":" + std::to_string(ln) + ": ";
    const auto cols = text::split(line, ',');
    const std::size_t want = t.form == PredictionTable::Form::kLabel ? 2 : t.columns + 1;
    if (cols.size() != want) {
      diags.push_back(where + "expected " + std::to_string(want) + " columns, got " +
                      std::to_string(cols.size()));
      continue;
    }
    PredictionTable::Row row;
    row.sample_id = std::string(text::trim(cols[0]));
    row.line = ln;
    if (row.sample_id.empty()) {
      diags.push_back(where + "empty sample_id");
      continue;
    }
    bool bad = false;
    if (t.form == PredictionTable::Form::kLabel) {
      const auto c = detail::parse_eye_class(text::trim(cols[1]));
      if (!c) {
        diags.push_back(where + "bad label \"" + std::string(cols[1]) + "\"");
        bad = true;
      } else {
        row.label = *c;
      }
    } else {
      for (std::size_t i = 1; i < cols.size(); ++i) {
        const auto cell = text::trim(cols[i]);
        if (cell.empty()) {
          row.scores.emplace_back();
          continue;
        }
        const auto v = text::parse_double(cell);
        if (!v || !std::isfinite(*v)) {
          diags.push_back(where + "bad score \"" + std::string(cell) + "\" in column s" +
                          std::to_string(i - 1));
          bad = true;
          break;
        }
        row.scores.emplace_back(*v);
      }
    }
    if (!bad) t.rows.push_back(std::move(row));
  }
  if (!diags.empty()) throw ScoringError(std::move(diags));
  return t;
}

inline PredictionTable load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open predictions " + path.string());
  return parse_predictions(in, path.string());
}

inline const char* metric_name(Task task) {
  switch (task) {
    case Task::kBodily: return "mAP";
    case Task::kEyeContact: return "accuracy";
    case Task::kNextSpeaker: return "UAR";
  }
  return "?";
}

/// Aligns predictions with labeled manifest rows of `task` and computes the
/// task metric. Aborts with ScoringError on malformed, unknown, duplicate or
/// missing samples.
inline ScoreReport score_submission(const std::vector<ManifestEntry>& manifest,
                                    const PredictionTable& table, Task task,
                                    const ScoreOptions& options = {}) {
  std::vector<const ManifestEntry*> evaluated;
  for (const auto& e : manifest) {
    if (e.task != task || !e.has_labels()) continue;
    if (options.split && e.split != *options.split) continue;
    evaluated.push_back(&e);
  }
  if (evaluated.empty()) {
    throw ScoringError({std::string("manifest has no labeled ") + to_string(task) + " rows" +
                        (options.split ? std::string(" in split ") + to_string(*options.split) : "")});
  }

  std::vector<std::string> diags;
  std::unordered_map<std::string, const ManifestEntry*> wanted;
  for (const auto* e : evaluated) wanted.emplace(e->sample_id, e);
  std::unordered_map<std::string, const PredictionTable::Row*> rows;
  for (const auto& r : table.rows) {
    const std::string where = "line " + std::to_string(r.line) + ": ";
    if (!wanted.contains(r.sample_id)) {
      diags.push_back(where + "unknown sample_id \"" + r.sample_id + "\"");
    } else if (!rows.emplace(r.sample_id, &r).second) {
      diags.push_back(where + "duplicate prediction for \"" + r.sample_id + "\"");
    }
  }
  for (const auto* e : evaluated) {
    if (!rows.contains(e->sample_id)) diags.push_back("missing prediction for sample \"" + e->sample_id + "\"");
  }

  const bool scores_form = table.form == PredictionTable::Form::kScores;
  if (task == Task::kBodily && (!scores_form || table.columns != kBodilyClasses)) {
    diags.push_back("bodily predictions need header sample_id,s0,...,s13");
  }
  if (task == Task::kEyeContact && scores_form && table.columns != kEyeContactClasses) {
    diags.push_back("eye_contact predictions need sample_id,label or sample_id,s0,...,s3");
  }
  if (task == Task::kNextSpeaker && !scores_form) {
    diags.push_back("next_speaker predictions need header sample_id,s0,...,s{K-1}");
  }
  if (!diags.empty()) throw ScoringError(std::move(diags));

  ScoreReport report;
  report.task = task;
  report.metric_name = metric_name(task);
  report.samples = evaluated.size();

  auto require_all = [&](const PredictionTable::Row& r, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.scores[i]) {
        diags.push_back("line " + std::to_string(r.line) + ": empty score s" + std::to_string(i) +
                        " for \"" + r.sample_id + "\"");
        return false;
      }
    }
    return true;
  };

  switch (task) {
    case Task::kBodily: {
      std::vector<double> s;
      std::vector<std::uint8_t> rel;
      for (const auto* e : evaluated) {
        const auto& r = *rows.at(e->sample_id);
        if (!require_all(r, kBodilyClasses)) continue;
        for (const auto& v : r.scores) s.push_back(*v);
        const auto& bits = std::get<LabelVector>(e->labels).bits;
        rel.insert(rel.end(), bits.begin(), bits.end());
      }
      if (!diags.empty()) throw ScoringError(std::move(diags));
      const auto m = mean_average_precision(s, rel, kBodilyClasses);
      report.value = m.value;
      for (std::size_t c = 0; c < kBodilyClasses; ++c) {
        report.per_class.emplace_back("class_" + std::string(c < 10 ? "0" : "") + std::to_string(c),
                                      m.per_class[c]);
      }
      if (m.skipped_classes) {
        report.warnings.push_back(std::to_string(m.skipped_classes) +
                                  " class(es) without positives skipped");
      }
      break;
    }
    case Task::kEyeContact: {
      std::vector<int> pred, truth;
      for (const auto* e : evaluated) {
        const auto& r = *rows.at(e->sample_id);
        int label = r.label;
        if (scores_form) {
          if (!require_all(r, kEyeContactClasses)) continue;
          label = 0;
          for (std::size_t c = 1; c < kEyeContactClasses; ++c) {
            if (*r.scores[c] > *r.scores[static_cast<std::size_t>(label)]) label = static_cast<int>(c);
          }
        }
        pred.push_back(label);
        truth.push_back(std::get<ClassLabel>(e->labels).class_id);
      }
      if (!diags.empty()) throw ScoringError(std::move(diags));
      report.value = accuracy(pred, truth);
      const auto u = uar(pred, truth, kEyeContactClasses);
      for (std::size_t c = 0; c < kEyeContactClasses; ++c) {
        report.per_class.emplace_back(std::string("recall_") + kEyeContactNames[c], u.recall[c]);
      }
      break;
    }
    case Task::kNextSpeaker: {
      std::vector<int> pred, truth;
      std::size_t ignored = 0;
      for (const auto* e : evaluated) {
        const auto& r = *rows.at(e->sample_id);
        const auto& bits = std::get<SpeakerBits>(e->labels).bits;
        if (r.scores.size() < bits.size()) {
          diags.push_back("line " + std::to_string(r.line) + ": \"" + e->sample_id + "\" has " +
                          std::to_string(bits.size()) + " participants but only " +
                          std::to_string(r.scores.size()) + " score columns");
          continue;
        }
        if (!require_all(r, bits.size())) continue;
        for (std::size_t i = bits.size(); i < r.scores.size(); ++i) {
          if (!r.scores[i]) continue;
          if (options.strict_participants) {
            diags.push_back("line " + std::to_string(r.line) + ": score s" + std::to_string(i) +
                            " given for absent participant of \"" + e->sample_id + "\"");
          } else {
            ++ignored;
          }
        }
        for (std::size_t i = 0; i < bits.size(); ++i) {
          pred.push_back(*r.scores[i] >= options.speaker_threshold ? 1 : 0);
          truth.push_back(bits[i]);
        }
      }
      if (!diags.empty()) throw ScoringError(std::move(diags));
      const auto u = uar(pred, truth, 2);
      report.value = u.value;
      report.per_class.emplace_back("recall_not_speaking", u.recall[0]);
      report.per_class.emplace_back("recall_speaking", u.recall[1]);
      if (u.absent_classes) {
        report.warnings.push_back(std::to_string(u.absent_classes) +
                                  " class(es) absent from ground truth excluded from UAR");
      }
      if (ignored) {
        report.warnings.push_back(std::to_string(ignored) +
                                  " score(s) for absent participants ignored");
      }
      break;
    }
  }
  return report;
}

}  // namespace convaug
