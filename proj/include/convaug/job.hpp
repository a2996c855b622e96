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

// Batch preprocessing: manifest -> frames -> crop -> augment -> tensor blobs.
//
// Output: <out>/<task>/<split>/<sample_id>.ctns, u8 payload.
//   bodily        [T, H, W - L - R, 3]   first view, strip-cropped frames
//   eye_contact   [S, S, 3]              face crop of the first view; when the
//                                        policy samples several frames each one
//                                        is its own sample <sample_id>__fNNNNNN
//   next_speaker  [V, H, W, 3]           one frame per view in view order
//                 [K, V, H, W, 3]        when the policy samples K > 1 frames
//
// Media paths are clip directories relative to the frames root. Face boxes
// for eye_contact are read from faces.csv inside the clip directory.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "convaug/augment.hpp"
#include "convaug/augment_config.hpp"
#include "convaug/core/image_io.hpp"
#include "convaug/core/tensor_blob.hpp"
#include "convaug/manifest.hpp"
#include "convaug/preprocess.hpp"

namespace convaug {

inline constexpr const char* kFaceSidecarName = "faces.csv";

struct JobConfig {
  std::filesystem::path manifest_path;
  Task task = Task::kBodily;
  std::optional<Split> split;                 // all splits when unset
  std::filesystem::path frames_root;
  std::filesystem::path out_root;
  std::optional<CropSpec> crop;               // bodily; default 200/200
  std::optional<SamplingPolicy> sampling;     // default per task
  std::optional<std::filesystem::path> aug_config;
  std::optional<std::uint64_t> seed;          // overrides the config's global_seed
  std::size_t workers = 1;
  bool allow_partial = false;
  bool augment_all_splits = false;            // default: train split only
  std::size_t face_size = 224;

  CropSpec effective_crop() const { return crop.value_or(CropSpec{200, 200}); }

  SamplingPolicy effective_sampling() const {
    if (sampling) return *sampling;
    return task == Task::kBodily ? SamplingPolicy::uniform_n(64) : SamplingPolicy::last_one();
  }

  void validate() const {
    if (workers < 1) throw InvalidArgument("worker count must be >= 1");
    if (face_size < 1) throw InvalidArgument("face size must be >= 1");
    namespace fs = std::filesystem;
    if (fs::weakly_canonical(out_root) == fs::weakly_canonical(frames_root)) {
      throw InvalidArgument("output root must differ from the frames root");
    }
  }
};

struct SampleOutcome {
  std::string sample_id;
  bool ok = false;
  std::size_t blobs = 0;
  std::size_t black_filled = 0;
  std::size_t degenerate_boxes = 0;
  std::string diagnostic;
};

struct RunSummary {
  std::size_t selected = 0;
  std::size_t processed = 0;
  std::size_t skipped = 0;
  std::size_t blobs_written = 0;
  std::size_t black_filled = 0;
  std::size_t degenerate_boxes = 0;
  std::vector<std::string> diagnostics;  // in manifest order
};

namespace detail {

inline bool safe_sample_id(const std::string& id) {
  return !id.empty() && id.find('/') == std::string::npos && id.find('\\') == std::string::npos &&
         id != "." && id != "..";
}

inline std::string frame_suffix(std::int64_t frame_number) {
  std::string n = std::to_string(frame_number);
  if (n.size() < 6) n.insert(0, 6 - n.size(), '0');
  return "__f" + n;
}

inline void write_blob_file(const std::filesystem::path& path, const Tensor& t) {
  auto tmp = path;
  tmp += ".tmp";
  save_tensor_blob(tmp, t);
  std::filesystem::rename(tmp, path);
}

class SampleProcessor {
 public:
  SampleProcessor(const JobConfig& cfg, const AugmentPipeline* pipeline)
      : cfg_(cfg), pipeline_(pipeline), policy_(cfg.effective_sampling()) {}

  SampleOutcome run(const ManifestEntry& e) const {
    SampleOutcome out;
    out.sample_id = e.sample_id;
    try {
      if (!safe_sample_id(e.sample_id)) {
        throw InvalidArgument("sample_id is not usable as a file name");
      }
      const auto dir = cfg_.out_root / to_string(e.task) / to_string(e.split);
      std::filesystem::create_directories(dir);
      const bool augment = pipeline_ && !pipeline_->ops.empty() &&
                           (cfg_.augment_all_splits || e.split == Split::kTrain);
      switch (e.task) {
        case Task::kBodily: bodily(e, dir, augment, out); break;
        case Task::kEyeContact: eye(e, dir, augment, out); break;
        case Task::kNextSpeaker: speaker(e, dir, augment, out); break;
      }
      out.ok = true;
    } catch (const std::exception& ex) {
      out.ok = false;
      out.diagnostic = "sample \"" + e.sample_id + "\" skipped: " + ex.what();
    }
    return out;
  }

 private:
  Clip clip_for(const ManifestEntry& e, const MediaRef& m) const {
    Clip clip = scan_clip(cfg_.frames_root / m.path, e.sample_id, m.tag);
    if (clip.frame_count() == 0) {
      throw IoError("no frame_NNNNNN.png/.ppm files in " + (cfg_.frames_root / m.path).string());
    }
    return clip;
  }

  ImageBuffer maybe_augment(const ImageBuffer& img, bool augment, const std::string& id) const {
    return augment ? apply_pipeline(img, *pipeline_, id) : img;
  }

  void bodily(const ManifestEntry& e, const std::filesystem::path& dir, bool augment,
              SampleOutcome& out) const {
    const auto views = enumerate_views(e);
    const Clip clip = clip_for(e, views.front());
    const CropSpec crop = cfg_.effective_crop();
    std::vector<ImageBuffer> frames;
    for (auto idx : sample_frames(clip, policy_)) {
      const ImageBuffer cropped = strip_crop(read_image(clip.frames[idx]), crop);
      frames.push_back(maybe_augment(cropped, augment, e.sample_id));
    }
    write_blob_file(dir / (e.sample_id + ".ctns"), stack_images(frames));
    out.blobs = 1;
  }

  void eye(const ManifestEntry& e, const std::filesystem::path& dir, bool augment,
           SampleOutcome& out) const {
    const auto views = enumerate_views(e);
    const Clip clip = clip_for(e, views.front());
    const auto boxes = load_face_sidecar(cfg_.frames_root / views.front().path / kFaceSidecarName);
    const auto picks = sample_frames(clip, policy_);
    FaceCropCounters counters;
    std::vector<std::pair<std::string, Tensor>> blobs;
    for (auto idx : picks) {
      const std::int64_t number = clip.frame_numbers[idx];
      FaceBox box;
      box.frame_index = number;
      if (auto it = boxes.find(number); it != boxes.end()) box = it->second;
      const ImageBuffer face = face_crop(read_image(clip.frames[idx]), box, cfg_.face_size, &counters);
      const std::string id = picks.size() == 1 ? e.sample_id : e.sample_id + frame_suffix(number);
      const ImageBuffer final_img = maybe_augment(face, augment, id);
      Tensor t;
      t.shape = {static_cast<std::uint32_t>(final_img.height()),
                 static_cast<std::uint32_t>(final_img.width()), 3};
      t.payload.assign(final_img.data().begin(), final_img.data().end());
      blobs.emplace_back(id, std::move(t));
    }
    for (const auto& [id, t] : blobs) write_blob_file(dir / (id + ".ctns"), t);
    out.blobs = blobs.size();
    out.black_filled = counters.black_filled;
    out.degenerate_boxes = counters.degenerate;
  }

  void speaker(const ManifestEntry& e, const std::filesystem::path& dir, bool augment,
               SampleOutcome& out) const {
    const auto views = enumerate_views(e);
    std::vector<Clip> clips;
    std::vector<std::vector<std::size_t>> picks;
    for (const auto& v : views) {
      clips.push_back(clip_for(e, v));
      picks.push_back(sample_frames(clips.back(), policy_));
      if (picks.back().size() != picks.front().size()) {
        throw InvalidArgument("views sample different frame counts; clip lengths differ");
      }
    }
    const std::size_t steps = picks.front().size();
    Tensor result;
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<std::pair<std::string, ImageBuffer>> frames;
      for (std::size_t v = 0; v < views.size(); ++v) {
        frames.emplace_back(views[v].tag,
                            maybe_augment(read_image(clips[v].frames[picks[v][s]]), augment, e.sample_id));
      }
      Tensor step = concat_views(frames);
      if (steps == 1) {
        result = std::move(step);
      } else {
        if (s == 0) {
          result.shape = step.shape;
          result.shape.insert(result.shape.begin(), static_cast<std::uint32_t>(steps));
        } else if (!std::equal(step.shape.begin(), step.shape.end(), result.shape.begin() + 1)) {
          throw InvalidArgument("frame size changes across sampled time steps");
        }
        result.payload.insert(result.payload.end(), step.payload.begin(), step.payload.end());
      }
    }
    write_blob_file(dir / (e.sample_id + ".ctns"), result);
    out.blobs = 1;
  }

  const JobConfig& cfg_;
  const AugmentPipeline* pipeline_;
  SamplingPolicy policy_;
};

}  // namespace detail

/// Runs the preprocessing job. Samples are processed by `workers` threads,
/// each claiming the next unprocessed sample; results are gathered per
/// sample and summarized in manifest order, so output bytes and the summary
/// do not depend on the worker count.
inline RunSummary run_preprocess(const JobConfig& cfg,
                                 const std::function<void(const SampleOutcome&)>& on_sample = {}) {
  cfg.validate();
  const auto entries = load_manifest(cfg.manifest_path);
  std::optional<AugmentPipeline> pipeline;
  if (cfg.aug_config) {
    pipeline = load_pipeline_config(*cfg.aug_config);
    if (cfg.seed) pipeline->global_seed = *cfg.seed;
  }

  std::vector<const ManifestEntry*> selected;
  for (const auto& e : entries) {
    if (e.task != cfg.task) continue;
    if (cfg.split && e.split != *cfg.split) continue;
    selected.push_back(&e);
  }

  const detail::SampleProcessor processor(cfg, pipeline ? &*pipeline : nullptr);
  std::vector<SampleOutcome> outcomes(selected.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < selected.size(); i = next.fetch_add(1)) {
      outcomes[i] = processor.run(*selected[i]);
    }
  };
  const std::size_t n_threads = std::min(cfg.workers, std::max<std::size_t>(selected.size(), 1));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }

  RunSummary s;
  s.selected = selected.size();
  for (const auto& o : outcomes) {
    if (on_sample) on_sample(o);
    if (o.ok) {
      ++s.processed;
    } else {
      ++s.skipped;
      s.diagnostics.push_back(o.diagnostic);
    }
    s.blobs_written += o.blobs;
    s.black_filled += o.black_filled;
    s.degenerate_boxes += o.degenerate_boxes;
  }
  return s;
}

}  // namespace convaug
