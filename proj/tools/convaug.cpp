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

// convaug command line: preprocess | evaluate | validate | fit-pca
//
// Exit codes: 0 success, 1 validation or scoring failure, 2 I/O failure.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "convaug/convaug.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("convaug");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("CONVAUG_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("CONVAUG_LOG={} not recognized, keeping info", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

convaug::Task task_from_flag(const std::string& s) {
  const auto t = convaug::parse_task(s);
  if (!t) throw convaug::InvalidArgument("unknown task \"" + s + "\"");
  return *t;
}

std::optional<convaug::Split> split_from_flag(const std::string& s) {
  if (s.empty() || s == "all") return std::nullopt;
  const auto sp = convaug::parse_split(s);
  if (!sp) throw convaug::InvalidArgument("unknown split \"" + s + "\" (train, val, test or all)");
  return sp;
}

convaug::CropSpec crop_from_flag(const std::string& s) {
  const auto parts = convaug::text::split(s, ',');
  if (parts.size() == 2) {
    const auto l = convaug::text::parse_int<std::size_t>(convaug::text::trim(parts[0]));
    const auto r = convaug::text::parse_int<std::size_t>(convaug::text::trim(parts[1]));
    if (l && r) return {*l, *r};
  }
  throw convaug::InvalidArgument("--crop expects L,R (pixels), got \"" + s + "\"");
}

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const convaug::ManifestError& e) {
    for (const auto& d : e.diagnostics()) spdlog::error("{}", d.format());
    spdlog::error("{} error(s)", e.diagnostics().size());
    return kExitInvalid;
  } catch (const convaug::ScoringError& e) {
    for (const auto& d : e.diagnostics()) spdlog::error("{}", d);
    return kExitInvalid;
  } catch (const convaug::IoError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  }
}

struct PreprocessArgs {
  std::string manifest, task, split, frames_root, out, crop, sample, aug_config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::size_t face_size = 224;
  bool allow_partial = false;
  bool augment_all = false;
};

int cmd_preprocess(const PreprocessArgs& a) {
  convaug::JobConfig cfg;
  cfg.manifest_path = a.manifest;
  cfg.task = task_from_flag(a.task);
  cfg.split = split_from_flag(a.split);
  cfg.frames_root = a.frames_root;
  cfg.out_root = a.out;
  if (!a.crop.empty()) cfg.crop = crop_from_flag(a.crop);
  if (!a.sample.empty()) cfg.sampling = convaug::SamplingPolicy::parse(a.sample);
  if (!a.aug_config.empty()) cfg.aug_config = fs::path(a.aug_config);
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  cfg.face_size = a.face_size;
  cfg.allow_partial = a.allow_partial;
  cfg.augment_all_splits = a.augment_all;

  spdlog::info("preprocess task={} sampling={} workers={}", convaug::to_string(cfg.task),
               cfg.effective_sampling().to_string(), cfg.workers);
  const auto summary = convaug::run_preprocess(cfg, [](const convaug::SampleOutcome& o) {
    if (o.ok) spdlog::debug("{}: {} blob(s)", o.sample_id, o.blobs);
  });
  for (const auto& d : summary.diagnostics) spdlog::warn("{}", d);
  std::cout << "selected:     " << summary.selected << "\n"
            << "processed:    " << summary.processed << "\n"
            << "skipped:      " << summary.skipped << "\n"
            << "blobs:        " << summary.blobs_written << "\n"
            << "black-filled: " << summary.black_filled << "\n"
            << "degenerate:   " << summary.degenerate_boxes << "\n";
  if (summary.skipped > 0 && !cfg.allow_partial) {
    spdlog::error("{} sample(s) skipped (pass --allow-partial to accept)", summary.skipped);
    return kExitIo;
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string manifest, predictions, task, split, report;
  bool json = false;
  bool strict = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto entries = convaug::load_manifest(a.manifest);
  const auto table = convaug::load_predictions(a.predictions);
  convaug::ScoreOptions opts;
  opts.split = split_from_flag(a.split);
  opts.strict_participants = a.strict;
  const auto report = convaug::score_submission(entries, table, task_from_flag(a.task), opts);
  if (a.json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << report.to_text();
  }
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw convaug::IoError("cannot write report " + a.report);
    out << report.to_json().dump(2) << "\n";
  }
  return kExitOk;
}

struct ValidateArgs {
  std::string manifest, emit;
};

int cmd_validate(const ValidateArgs& a) {
  std::ifstream in(a.manifest, std::ios::binary);
  if (!in) throw convaug::IoError("cannot open manifest " + a.manifest);
  const auto parsed = convaug::parse_manifest(in);
  for (const auto& d : parsed.diagnostics) std::cout << d.format() << "\n";
  const auto counts = convaug::split_counts(parsed.entries);
  std::cout << "entries: " << parsed.entries.size() << " (train " << counts.train << ", val "
            << counts.val << ", test " << counts.test << ")\n";
  std::cout << parsed.diagnostics.size() << " errors\n";
  if (!parsed.ok()) return kExitInvalid;
  if (!a.emit.empty()) {
    std::ofstream out(a.emit, std::ios::binary);
    if (!out) throw convaug::IoError("cannot write " + a.emit);
    convaug::save_manifest(parsed.entries, out);
  }
  return kExitOk;
}

struct FitPcaArgs {
  std::vector<std::string> inputs;
  std::string out;
  double alpha_std = 0.1;
};

int cmd_fit_pca(const FitPcaArgs& a) {
  convaug::RgbCovariance cov;
  std::size_t images = 0;
  auto add = [&](const fs::path& p) {
    cov.add(convaug::read_image(p));
    ++images;
  };
  for (const auto& in : a.inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> files;
      for (const auto& ent : fs::recursive_directory_iterator(in)) {
        const auto ext = ent.path().extension();
        if (ent.is_regular_file() && (ext == ".png" || ext == ".ppm")) files.push_back(ent.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add(f);
    } else {
      add(in);
    }
  }
  if (images == 0) throw convaug::InvalidArgument("no images found");
  const auto spec = convaug::fit_pca_lighting(cov, a.alpha_std);
  spdlog::info("fitted RGB PCA over {} image(s), {} pixel(s)", images, cov.count());
  const std::string text = convaug::lighting_to_json(spec).dump(2);
  if (a.out.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(a.out);
    if (!out) throw convaug::IoError("cannot write " + a.out);
    out << text << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"convaug: deterministic preprocessing, augmentation and scoring for "
               "conversation-analysis video tasks"};
  app.require_subcommand(1);
  int rc = kExitOk;
  const std::vector<std::string> tasks = {"bodily", "eye", "speaker", "eye_contact", "next_speaker"};

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Emit one tensor blob per manifest sample");
  p->add_option("--manifest", pre.manifest, "Manifest CSV")->required();
  p->add_option("--task", pre.task, "bodily | eye | speaker")->required()->check(CLI::IsMember(tasks));
  p->add_option("--split", pre.split, "train | val | test | all (default all)");
  p->add_option("--frames-root", pre.frames_root, "Root of the per-clip frame directories")->required();
  p->add_option("--out", pre.out, "Output root")->required();
  p->add_option("--crop", pre.crop, "Strip crop margins L,R for bodily (default 200,200)");
  p->add_option("--sample", pre.sample, "last1 | lastK:k | uniform:n (default per task)");
  p->add_option("--aug-config", pre.aug_config, "Augmentation pipeline JSON");
  p->add_option("--seed", pre.seed, "Global seed (overrides the config's global_seed)");
  p->add_option("--workers", pre.workers, "Worker threads")->check(CLI::PositiveNumber);
  p->add_option("--face-size", pre.face_size, "Face crop edge length")->check(CLI::PositiveNumber);
  p->add_flag("--allow-partial", pre.allow_partial, "Exit 0 even if samples were skipped");
  p->add_flag("--augment-all-splits", pre.augment_all, "Augment val/test samples too");
  p->callback([&] { rc = run_guarded([&] { return cmd_preprocess(pre); }); });

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score a prediction CSV against the manifest");
  e->add_option("--manifest", ev.manifest, "Manifest CSV")->required();
  e->add_option("--predictions", ev.predictions, "Prediction CSV")->required();
  e->add_option("--task", ev.task, "bodily | eye | speaker")->required()->check(CLI::IsMember(tasks));
  e->add_option("--split", ev.split, "Restrict to one split (default: all labeled rows)");
  e->add_option("--report", ev.report, "Write the JSON report here");
  e->add_flag("--json", ev.json, "Print JSON instead of text");
  e->add_flag("--strict-participants", ev.strict, "Reject scores for seats a group does not have");
  e->callback([&] { rc = run_guarded([&] { return cmd_evaluate(ev); }); });

  ValidateArgs va;
  auto* v = app.add_subcommand("validate", "Check a manifest and report every violation");
  v->add_option("--manifest", va.manifest, "Manifest CSV")->required();
  v->add_option("--emit", va.emit, "Write the canonicalized manifest here when clean");
  v->callback([&] { rc = run_guarded([&] { return cmd_validate(va); }); });

  FitPcaArgs fp;
  auto* f = app.add_subcommand("fit-pca", "Fit a lighting basis from RGB covariance of images");
  f->add_option("inputs", fp.inputs, "Image files or directories")->required();
  f->add_option("--out", fp.out, "Write the lighting JSON here (default stdout)");
  f->add_option("--alpha-std", fp.alpha_std, "alpha_std to place in the emitted spec");
  f->callback([&] { rc = run_guarded([&] { return cmd_fit_pca(fp); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  return rc;
}
