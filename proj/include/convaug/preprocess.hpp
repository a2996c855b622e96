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

// Geometry and sampling: strip crops, bilinear resizing, face crops from a
// detector sidecar, frame sampling policies, and multi-view stacking.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convaug/core/error.hpp"
#include "convaug/core/image.hpp"
#include "convaug/core/tensor_blob.hpp"
#include "convaug/core/text.hpp"

namespace convaug {

// ---------------------------------------------------------------------------
// Strip crop
// ---------------------------------------------------------------------------

struct CropSpec {
  std::size_t left_margin = 0;
  std::size_t right_margin = 0;
};

/// Drops `left_margin` columns on the left and `right_margin` on the right.
/// Retained pixels are copied verbatim.
inline ImageBuffer strip_crop(const ImageBuffer& img, const CropSpec& spec) {
  if (spec.left_margin + spec.right_margin >= img.width()) {
    throw InvalidArgument("invalid crop: margins " + std::to_string(spec.left_margin) + "+" +
                          std::to_string(spec.right_margin) + " consume width " +
                          std::to_string(img.width()));
  }
  const std::size_t out_w = img.width() - spec.left_margin - spec.right_margin;
  ImageBuffer out(img.height(), out_w);
  for (std::size_t r = 0; r < img.height(); ++r) {
    const auto src = img.row(r).subspan(spec.left_margin * 3, out_w * 3);
    std::memcpy(out.row(r).data(), src.data(), src.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bilinear resize
// ---------------------------------------------------------------------------

namespace detail {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;  // weight of `hi`
};

// Half-pixel-center mapping: src = (dst + 0.5) * in/out - 0.5, clamped to
// [0, in - 1].
inline std::vector<Tap> bilinear_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const double max_src = static_cast<double>(in - 1);
  for (std::size_t d = 0; d < out; ++d) {
    double s = (static_cast<double>(d) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, max_src);
    const auto lo = static_cast<std::size_t>(std::floor(s));
    const std::size_t hi = std::min(lo + 1, in - 1);
    taps[d] = {lo, hi, s - static_cast<double>(lo)};
  }
  return taps;
}

}  // namespace detail

inline ImageBuffer bilinear_resize(const ImageBuffer& img, std::size_t out_h, std::size_t out_w) {
  if (out_h == 0 || out_w == 0) throw InvalidArgument("resize target must be >= 1x1");
  if (out_h == img.height() && out_w == img.width()) return img;
  const auto ys = detail::bilinear_taps(img.height(), out_h);
  const auto xs = detail::bilinear_taps(img.width(), out_w);
  ImageBuffer out(out_h, out_w);
  for (std::size_t r = 0; r < out_h; ++r) {
    const auto& ty = ys[r];
    const auto top = img.row(ty.lo);
    const auto bottom = img.row(ty.hi);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < out_w; ++c) {
      const auto& tx = xs[c];
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double p00 = top[tx.lo * 3 + ch];
        const double p01 = top[tx.hi * 3 + ch];
        const double p10 = bottom[tx.lo * 3 + ch];
        const double p11 = bottom[tx.hi * 3 + ch];
        const double upper = p00 + (p01 - p00) * tx.frac;
        const double lower = p10 + (p11 - p10) * tx.frac;
        dst[c * 3 + ch] = quantize(upper + (lower - upper) * ty.frac);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Face crops
// ---------------------------------------------------------------------------

/// Detector output for one frame. Coordinates form a half-open box
/// [x0, x1) x [y0, y1) in source-image pixels.
struct FaceBox {
  std::int64_t frame_index = 0;
  bool detected = false;
  std::int64_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct FaceCropCounters {
  std::size_t black_filled = 0;   // frames without a usable detection
  std::size_t degenerate = 0;     // detected boxes that clamp to zero area
};

/// Crops a detected face and resizes it to out_size x out_size. Frames
/// without a detection, or whose box is empty after clamping to the image,
/// become an all-black image of the same size.
inline ImageBuffer face_crop(const ImageBuffer& img, const FaceBox& box, std::size_t out_size,
                             FaceCropCounters* counters = nullptr) {
  if (out_size == 0) throw InvalidArgument("face crop size must be >= 1");
  if (box.detected) {
    const auto h = static_cast<std::int64_t>(img.height());
    const auto w = static_cast<std::int64_t>(img.width());
    const std::int64_t x0 = std::clamp<std::int64_t>(box.x0, 0, w);
    const std::int64_t x1 = std::clamp<std::int64_t>(box.x1, 0, w);
    const std::int64_t y0 = std::clamp<std::int64_t>(box.y0, 0, h);
    const std::int64_t y1 = std::clamp<std::int64_t>(box.y1, 0, h);
    if (x1 > x0 && y1 > y0) {
      const auto cw = static_cast<std::size_t>(x1 - x0);
      const auto chh = static_cast<std::size_t>(y1 - y0);
      ImageBuffer region(chh, cw);
      for (std::size_t r = 0; r < chh; ++r) {
        const auto src = img.row(static_cast<std::size_t>(y0) + r)
                             .subspan(static_cast<std::size_t>(x0) * 3, cw * 3);
        std::memcpy(region.row(r).data(), src.data(), src.size());
      }
      return bilinear_resize(region, out_size, out_size);
    }
    if (counters) ++counters->degenerate;
  }
  if (counters) ++counters->black_filled;
  return ImageBuffer(out_size, out_size);
}

/// Sidecar CSV `frame_index,detected,x0,y0,x1,y1`. Coordinates may be real
/// valued; the box is widened to whole pixels (floor of the start, ceil of
/// the end). Returns boxes keyed by frame_index.
inline std::map<std::int64_t, FaceBox> parse_face_sidecar(std::istream& in,
                                                          const std::string& name = "<sidecar>") {
  std::map<std::int64_t, FaceBox> boxes;
  text::LineReader reader(in);
  std::string line;
  auto fail = [&](const std::string& msg) {
    throw FormatError(name + ":" + std::to_string(reader.line_number()) + ": " + msg);
  };
  if (!reader.next(line) || text::trim(line) != "frame_index,detected,x0,y0,x1,y1") {
    fail("expected header frame_index,detected,x0,y0,x1,y1");
  }
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, ',');
    if (cols.size() != 6) fail("expected 6 columns, got " + std::to_string(cols.size()));
    FaceBox b;
    const auto idx = text::parse_int<std::int64_t>(text::trim(cols[0]));
    if (!idx || *idx < 0) fail("bad frame_index \"" + std::string(cols[0]) + "\"");
    b.frame_index = *idx;
    const auto det = text::trim(cols[1]);
    if (det != "0" && det != "1") fail("detected must be 0 or 1");
    b.detected = det == "1";
    double v[4];
    for (int k = 0; k < 4; ++k) {
      const auto d = text::parse_double(text::trim(cols[2 + k]));
      if (!d || !std::isfinite(*d)) fail("bad coordinate \"" + std::string(cols[2 + k]) + "\"");
      v[k] = *d;
    }
    b.x0 = static_cast<std::int64_t>(std::floor(v[0]));
    b.y0 = static_cast<std::int64_t>(std::floor(v[1]));
    b.x1 = static_cast<std::int64_t>(std::ceil(v[2]));
    b.y1 = static_cast<std::int64_t>(std::ceil(v[3]));
    if (b.detected && !(b.x0 >= 0 && b.x0 < b.x1 && b.y0 >= 0 && b.y0 < b.y1)) {
      fail("detected box must satisfy 0 <= x0 < x1 and 0 <= y0 < y1");
    }
    if (!boxes.emplace(b.frame_index, b).second) {
      fail("frame_index " + std::to_string(b.frame_index) + " listed twice");
    }
  }
  return boxes;
}

inline std::map<std::int64_t, FaceBox> load_face_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open face sidecar " + path.string());
  return parse_face_sidecar(in, path.string());
}

// ---------------------------------------------------------------------------
// Clips and frame sampling
// ---------------------------------------------------------------------------

/// Ordered frames of one view of one sample.
struct Clip {
  std::string sample_id;
  std::string view;
  std::vector<std::filesystem::path> frames;
  std::vector<std::int64_t> frame_numbers;  // parsed from frame_%06d, ascending

  std::size_t frame_count() const noexcept { return frames.size(); }
};

/// Collects `frame_NNNNNN.png` / `.ppm` files from a clip directory, sorted
/// by frame number. Other files are ignored.
inline Clip scan_clip(const std::filesystem::path& dir, std::string sample_id, std::string view) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("clip directory not found: " + dir.string());
  std::vector<std::pair<std::int64_t, fs::path>> found;
  for (const auto& ent : fs::directory_iterator(dir)) {
    if (!ent.is_regular_file()) continue;
    const std::string name = ent.path().filename().string();
    const std::string ext = ent.path().extension().string();
    if (!name.starts_with("frame_") || (ext != ".png" && ext != ".ppm")) continue;
    const std::string digits = name.substr(6, name.size() - 6 - ext.size());
    if (digits.size() < 6) continue;
    const auto n = text::parse_int<std::int64_t>(digits);
    if (!n) continue;
    found.emplace_back(*n, ent.path());
  }
  std::sort(found.begin(), found.end());
  Clip clip{std::move(sample_id), std::move(view), {}, {}};
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (i > 0 && found[i].first == found[i - 1].first) {
      throw FormatError("clip " + dir.string() + " has two files for frame " +
                        std::to_string(found[i].first));
    }
    clip.frame_numbers.push_back(found[i].first);
    clip.frames.push_back(std::move(found[i].second));
  }
  return clip;
}

struct SamplingPolicy {
  enum class Kind { kLastOne, kLastK, kUniformN };
  Kind kind = Kind::kLastOne;
  std::size_t count = 1;  // k for kLastK, n for kUniformN

  static SamplingPolicy last_one() { return {Kind::kLastOne, 1}; }
  static SamplingPolicy last_k(std::size_t k) {
    if (k == 0) throw InvalidArgument("last_k requires k >= 1");
    return {Kind::kLastK, k};
  }
  static SamplingPolicy uniform_n(std::size_t n) {
    if (n == 0) throw InvalidArgument("uniform_n requires n >= 1");
    return {Kind::kUniformN, n};
  }

  /// Parses `last1`, `lastK:<k>` or `uniform:<n>`.
  static SamplingPolicy parse(std::string_view s) {
    if (s == "last1") return last_one();
    auto tail = [&](std::string_view prefix) -> std::size_t {
      const auto v = text::parse_int<std::size_t>(s.substr(prefix.size()));
      if (!v) throw InvalidArgument("bad sampling policy \"" + std::string(s) + "\"");
      return *v;
    };
    if (s.starts_with("lastK:")) return last_k(tail("lastK:"));
    if (s.starts_with("uniform:")) return uniform_n(tail("uniform:"));
    throw InvalidArgument("bad sampling policy \"" + std::string(s) +
                          "\" (expected last1, lastK:k or uniform:n)");
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::kLastOne: return "last1";
      case Kind::kLastK: return "lastK:" + std::to_string(count);
      case Kind::kUniformN: return "uniform:" + std::to_string(count);
    }
    return "?";
  }
};

/// Positions (0-based, into the clip's ordered frame list) selected by `policy`.
inline std::vector<std::size_t> sample_frames(std::size_t frame_count, const SamplingPolicy& policy) {
  if (frame_count == 0) throw InvalidArgument("cannot sample from an empty clip");
  std::vector<std::size_t> idx;
  switch (policy.kind) {
    case SamplingPolicy::Kind::kLastOne:
      idx.push_back(frame_count - 1);
      break;
    case SamplingPolicy::Kind::kLastK: {
      const std::size_t first = frame_count > policy.count ? frame_count - policy.count : 0;
      for (std::size_t i = first; i < frame_count; ++i) idx.push_back(i);
      break;
    }
    case SamplingPolicy::Kind::kUniformN: {
      const std::size_t n = policy.count;
      if (frame_count >= n) {
        for (std::size_t i = 0; i < n; ++i) idx.push_back(i * frame_count / n);
      } else {
        for (std::size_t i = 0; i < frame_count; ++i) idx.push_back(i);
        while (idx.size() < n) idx.push_back(frame_count - 1);
      }
      break;
    }
  }
  return idx;
}

inline std::vector<std::size_t> sample_frames(const Clip& clip, const SamplingPolicy& policy) {
  return sample_frames(clip.frame_count(), policy);
}

// ---------------------------------------------------------------------------
// Stacking
// ---------------------------------------------------------------------------

/// Stacks equally sized images into a u8 tensor [N, H, W, 3].
inline Tensor stack_images(std::span<const ImageBuffer> images) {
  if (images.empty()) throw InvalidArgument("cannot stack zero images");
  const auto& first = images.front();
  Tensor t;
  t.dtype = DType::kU8;
  t.shape = {static_cast<std::uint32_t>(images.size()), static_cast<std::uint32_t>(first.height()),
             static_cast<std::uint32_t>(first.width()), 3};
  t.payload.reserve(images.size() * first.size_bytes());
  for (const auto& img : images) {
    if (!img.same_shape(first)) throw InvalidArgument("cannot stack images of different sizes");
    t.payload.insert(t.payload.end(), img.data().begin(), img.data().end());
  }
  return t;
}

/// Temporal stack of one frame per view, in the given (view_order) order.
inline Tensor concat_views(const std::vector<std::pair<std::string, ImageBuffer>>& frames) {
  if (frames.empty()) throw InvalidArgument("concat_views needs at least one view");
  const auto& ref = frames.front().second;
  std::vector<ImageBuffer> images;
  images.reserve(frames.size());
  for (const auto& [tag, img] : frames) {
    if (!img.same_shape(ref)) {
      throw InvalidArgument("view \"" + tag + "\" is " + std::to_string(img.height()) + "x" +
                            std::to_string(img.width()) + ", expected " +
                            std::to_string(ref.height()) + "x" + std::to_string(ref.width()));
    }
    images.push_back(img);
  }
  return stack_images(images);
}

/// Image `index` of an [N, H, W, 3] u8 tensor.
inline ImageBuffer tensor_slice(const Tensor& t, std::size_t index) {
  if (t.dtype != DType::kU8 || t.shape.size() != 4 || t.shape[3] != 3 || index >= t.shape[0]) {
    throw InvalidArgument("tensor_slice expects a u8 [N,H,W,3] tensor and index < N");
  }
  const std::size_t h = t.shape[1], w = t.shape[2];
  const std::size_t stride = h * w * 3;
  const auto begin = t.payload.begin() + static_cast<std::ptrdiff_t>(index * stride);
  return ImageBuffer(h, w, std::vector<std::uint8_t>(begin, begin + static_cast<std::ptrdiff_t>(stride)));
}

}  // namespace convaug
