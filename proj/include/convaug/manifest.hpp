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

// Dataset manifest: one CSV row per labeled sample.
//
//   sample_id,task,split,view_order,media,labels
//   g01_p2_0001,bodily,train,front,front=g01/p2/0001,0|1|0|0|0|0|0|0|0|0|0|0|0|0
//   g01_0001,next_speaker,val,A|B|C,A=g01/A/0001|B=g01/B/0001|C=g01/C/0001,0|1|0
//
// view_order and media are '|'-joined; media entries are tag=path. labels
// are '|'-joined bits (bodily: 14, next_speaker: one per view) or a single
// class token (eye_contact: 0..3 or left/frontal/right/none), and are empty
// exactly on test rows.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "convaug/core/error.hpp"
#include "convaug/core/text.hpp"

namespace convaug {

enum class Task { kBodily, kEyeContact, kNextSpeaker };
enum class Split { kTrain, kVal, kTest };

inline constexpr std::size_t kBodilyClasses = 14;
inline constexpr std::size_t kEyeContactClasses = 4;

inline const char* to_string(Task t) {
  switch (t) {
    case Task::kBodily: return "bodily";
    case Task::kEyeContact: return "eye_contact";
    case Task::kNextSpeaker: return "next_speaker";
  }
  return "?";
}

inline const char* to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

/// Accepts the manifest tokens and the short CLI aliases (eye, speaker).
inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "bodily") return Task::kBodily;
  if (s == "eye_contact" || s == "eye") return Task::kEyeContact;
  if (s == "next_speaker" || s == "speaker") return Task::kNextSpeaker;
  return std::nullopt;
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  return std::nullopt;
}

/// 14 binary bodily-behavior indicators. The background category is the
/// all-zero vector.
struct LabelVector {
  std::array<std::uint8_t, kBodilyClasses> bits{};
  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

/// Eye-contact target: 0 left, 1 frontal, 2 right, 3 no eye contact.
struct ClassLabel {
  int class_id = 0;
  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

inline constexpr std::array<const char*, kEyeContactClasses> kEyeContactNames = {
    "left", "frontal", "right", "none"};

/// Per-participant speaking indicators, aligned with view_order.
struct SpeakerBits {
  std::vector<std::uint8_t> bits;
  friend bool operator==(const SpeakerBits&, const SpeakerBits&) = default;
};

using Labels = std::variant<std::monostate, LabelVector, ClassLabel, SpeakerBits>;

struct MediaRef {
  std::string tag;
  std::string path;
  friend bool operator==(const MediaRef&, const MediaRef&) = default;
};

struct ManifestEntry {
  std::string sample_id;
  Task task = Task::kBodily;
  Split split = Split::kTrain;
  std::vector<MediaRef> media;
  std::vector<std::string> view_order;
  Labels labels;
  std::size_t line = 0;  // 1-based source line, 0 when built in memory

  bool has_labels() const noexcept { return !std::holds_alternative<std::monostate>(labels); }
};

enum class DiagnosticKind {
  kHeader,
  kColumnCount,
  kEmptyId,
  kBadTask,
  kBadSplit,
  kBadMedia,
  kViewArity,
  kViewMismatch,
  kLabelPresence,
  kLabelArity,
  kBadLabel,
  kDuplicateId,
};

inline const char* to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::kHeader: return "header";
    case DiagnosticKind::kColumnCount: return "column-count";
    case DiagnosticKind::kEmptyId: return "empty-id";
    case DiagnosticKind::kBadTask: return "bad-task";
    case DiagnosticKind::kBadSplit: return "bad-split";
    case DiagnosticKind::kBadMedia: return "bad-media";
    case DiagnosticKind::kViewArity: return "view-arity";
    case DiagnosticKind::kViewMismatch: return "view-mismatch";
    case DiagnosticKind::kLabelPresence: return "label-presence";
    case DiagnosticKind::kLabelArity: return "label-arity";
    case DiagnosticKind::kBadLabel: return "bad-label";
    case DiagnosticKind::kDuplicateId: return "duplicate-id";
  }
  return "?";
}

struct Diagnostic {
  std::size_t line = 0;
  DiagnosticKind kind = DiagnosticKind::kHeader;
  std::string message;

  std::string format() const {
    return "line " + std::to_string(line) + ": [" + to_string(kind) + "] " + message;
  }
};

/// Thrown by load_manifest; carries every diagnostic found.
class ManifestError : public FormatError {
 public:
  explicit ManifestError(std::vector<Diagnostic> diags)
      : FormatError(summarize(diags)), diagnostics_(std::move(diags)) {}

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& d) {
    std::string s = std::to_string(d.size()) + " manifest error(s)";
    if (!d.empty()) s += "; first: " + d.front().format();
    return s;
  }
  std::vector<Diagnostic> diagnostics_;
};

struct ManifestParse {
  std::vector<ManifestEntry> entries;
  std::vector<Diagnostic> diagnostics;
  bool ok() const noexcept { return diagnostics.empty(); }
};

inline constexpr std::string_view kManifestHeader = "sample_id,task,split,view_order,media,labels";

namespace detail {

inline std::optional<int> parse_eye_class(std::string_view tok) {
  if (auto v = text::parse_int<int>(tok); v && *v >= 0 && *v < 4) return v;
  for (std::size_t i = 0; i < kEyeContactNames.size(); ++i) {
    if (tok == kEyeContactNames[i]) return static_cast<int>(i);
  }
  if (tok == "no_eye_contact") return 3;
  return std::nullopt;
}

inline bool parse_bits(std::string_view field, std::vector<std::uint8_t>& out) {
  out.clear();
  for (auto tok : text::split(field, '|')) {
    if (tok == "0") {
      out.push_back(0);
    } else if (tok == "1") {
      out.push_back(1);
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Parses and validates a manifest. Rows with any violation are reported
/// and left out of `entries`; parsing continues so all problems surface.
inline ManifestParse parse_manifest(std::istream& in) {
  ManifestParse result;
  auto diag = [&](std::size_t line, DiagnosticKind k, std::string msg) {
    result.diagnostics.push_back({line, k, std::move(msg)});
  };

  text::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) {
    diag(1, DiagnosticKind::kHeader, "empty file, expected header");
    return result;
  }
  if (line != kManifestHeader) {
    diag(1, DiagnosticKind::kHeader,
         "expected header \"" + std::string(kManifestHeader) + "\", got \"" + line + "\"");
    return result;
  }

  std::map<std::tuple<Task, Split, std::string>, std::size_t> seen;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, ',');
    if (cols.size() != 6) {
      diag(ln, DiagnosticKind::kColumnCount,
           "expected 6 columns, got " + std::to_string(cols.size()));
      continue;
    }
    const std::size_t before = result.diagnostics.size();
    ManifestEntry e;
    e.line = ln;
    e.sample_id = std::string(cols[0]);
    if (e.sample_id.empty()) diag(ln, DiagnosticKind::kEmptyId, "empty sample_id");

    const auto task = parse_task(cols[1]);
    if (!task || cols[1] == "eye" || cols[1] == "speaker") {
      diag(ln, DiagnosticKind::kBadTask,
           "unknown task \"" + std::string(cols[1]) +
               "\" (expected bodily, eye_contact or next_speaker)");
    } else {
      e.task = *task;
    }
    const auto split = parse_split(cols[2]);
    if (!split) {
      diag(ln, DiagnosticKind::kBadSplit,
           "unknown split \"" + std::string(cols[2]) + "\" (expected train, val or test)");
    } else {
      e.split = *split;
    }

    std::set<std::string> media_tags;
    for (auto item : text::split(cols[4], '|')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
        diag(ln, DiagnosticKind::kBadMedia,
             "media item \"" + std::string(item) + "\" is not tag=path");
        continue;
      }
      MediaRef m{std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))};
      if (!media_tags.insert(m.tag).second) {
        diag(ln, DiagnosticKind::kBadMedia, "media tag \"" + m.tag + "\" listed twice");
        continue;
      }
      e.media.push_back(std::move(m));
    }

    std::set<std::string> order_tags;
    for (auto tag : text::split(cols[3], '|')) {
      if (tag.empty()) {
        diag(ln, DiagnosticKind::kViewMismatch, "empty tag in view_order");
        continue;
      }
      if (!order_tags.insert(std::string(tag)).second) {
        diag(ln, DiagnosticKind::kViewMismatch,
             "view_order repeats tag \"" + std::string(tag) + "\"");
        continue;
      }
      e.view_order.emplace_back(tag);
      if (!media_tags.contains(std::string(tag))) {
        diag(ln, DiagnosticKind::kViewMismatch,
             "view_order tag \"" + std::string(tag) + "\" has no media entry");
      }
    }
    for (const auto& m : e.media) {
      if (!order_tags.contains(m.tag)) {
        diag(ln, DiagnosticKind::kViewMismatch,
             "media tag \"" + m.tag + "\" missing from view_order");
      }
    }

    const bool multi_view = task && *task != Task::kBodily;
    if (multi_view && (e.view_order.size() < 3 || e.view_order.size() > 4)) {
      diag(ln, DiagnosticKind::kViewArity,
           std::string(to_string(*task)) + " rows need 3 or 4 views, got " +
               std::to_string(e.view_order.size()));
    }
    if (!multi_view && e.view_order.empty()) {
      diag(ln, DiagnosticKind::kViewArity, "at least one view is required");
    }

    const std::string_view label_field = cols[5];
    if (split && task) {
      if (*split == Split::kTest) {
        if (!label_field.empty()) {
          diag(ln, DiagnosticKind::kLabelPresence, "test rows must not carry labels");
        }
      } else if (label_field.empty()) {
        diag(ln, DiagnosticKind::kLabelPresence,
             std::string(to_string(*split)) + " rows require labels");
      } else if (*task == Task::kEyeContact) {
        if (auto c = detail::parse_eye_class(label_field)) {
          e.labels = ClassLabel{*c};
        } else {
          diag(ln, DiagnosticKind::kBadLabel,
               "eye_contact label \"" + std::string(label_field) +
                   "\" is not 0..3 or left/frontal/right/none");
        }
      } else {
        std::vector<std::uint8_t> bits;
        if (!detail::parse_bits(label_field, bits)) {
          diag(ln, DiagnosticKind::kBadLabel,
               "label bits must be '|'-joined 0/1, got \"" + std::string(label_field) + "\"");
        } else if (*task == Task::kBodily) {
          if (bits.size() != kBodilyClasses) {
            diag(ln, DiagnosticKind::kLabelArity,
                 "bodily rows need 14 label bits, got " + std::to_string(bits.size()));
          } else {
            LabelVector lv;
            std::copy(bits.begin(), bits.end(), lv.bits.begin());
            e.labels = lv;
          }
        } else if (bits.size() != e.view_order.size()) {
          diag(ln, DiagnosticKind::kLabelArity,
               "next_speaker rows need one bit per view (" +
                   std::to_string(e.view_order.size()) + "), got " + std::to_string(bits.size()));
        } else {
          e.labels = SpeakerBits{std::move(bits)};
        }
      }
    }

    if (task && split && !e.sample_id.empty()) {
      auto [it, inserted] = seen.emplace(std::make_tuple(*task, *split, e.sample_id), ln);
      if (!inserted) {
        diag(ln, DiagnosticKind::kDuplicateId,
             "duplicate sample_id \"" + e.sample_id + "\" in " + to_string(*task) + "/" +
                 to_string(*split) + " (first seen on line " + std::to_string(it->second) + ")");
      }
    }

    if (result.diagnostics.size() == before) result.entries.push_back(std::move(e));
  }
  return result;
}

inline ManifestParse parse_manifest_text(const std::string& text) {
  std::istringstream in(text);
  return parse_manifest(in);
}

/// Loads a manifest, throwing ManifestError if any row is invalid.
inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  auto parsed = parse_manifest(in);
  if (!parsed.ok()) throw ManifestError(std::move(parsed.diagnostics));
  return std::move(parsed.entries);
}

/// Canonical re-emit: long task names, numeric eye-contact classes.
inline void save_manifest(const std::vector<ManifestEntry>& entries, std::ostream& out) {
  out << kManifestHeader << '\n';
  for (const auto& e : entries) {
    std::vector<std::string> media;
    for (const auto& m : e.media) media.push_back(m.tag + "=" + m.path);
    std::string labels;
    if (const auto* lv = std::get_if<LabelVector>(&e.labels)) {
      for (std::size_t i = 0; i < lv->bits.size(); ++i) {
        if (i) labels += '|';
        labels += static_cast<char>('0' + lv->bits[i]);
      }
    } else if (const auto* cl = std::get_if<ClassLabel>(&e.labels)) {
      labels = std::to_string(cl->class_id);
    } else if (const auto* sb = std::get_if<SpeakerBits>(&e.labels)) {
      for (std::size_t i = 0; i < sb->bits.size(); ++i) {
        if (i) labels += '|';
        labels += static_cast<char>('0' + sb->bits[i]);
      }
    }
    out << e.sample_id << ',' << to_string(e.task) << ',' << to_string(e.split) << ','
        << text::join(e.view_order, '|') << ',' << text::join(media, '|') << ',' << labels
        << '\n';
  }
}

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  std::size_t total() const noexcept { return train + val + test; }
  std::size_t operator[](Split s) const noexcept {
    return s == Split::kTrain ? train : s == Split::kVal ? val : test;
  }
  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

inline SplitCounts split_counts(const std::vector<ManifestEntry>& entries) {
  SplitCounts c;
  for (const auto& e : entries) {
    switch (e.split) {
      case Split::kTrain: ++c.train; break;
      case Split::kVal: ++c.val; break;
      case Split::kTest: ++c.test; break;
    }
  }
  return c;
}

/// Media reordered to follow view_order exactly.
inline std::vector<MediaRef> enumerate_views(const ManifestEntry& entry) {
  std::vector<MediaRef> out;
  out.reserve(entry.view_order.size());
  for (const auto& tag : entry.view_order) {
    auto it = std::find_if(entry.media.begin(), entry.media.end(),
                           [&](const MediaRef& m) { return m.tag == tag; });
    if (it == entry.media.end()) {
      throw InvalidArgument("sample " + entry.sample_id + ": view tag \"" + tag +
                            "\" has no media entry");
    }
    out.push_back(*it);
  }
  return out;
}

}  // namespace convaug
