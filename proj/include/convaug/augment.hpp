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

// Seeded augmentation operators over 8-bit RGB images.
//
// Every operator is a pure function of (image, spec, RngStream). Random
// draws happen in a fixed, documented order so that a given seed produces
// the same output everywhere. Pixel results are re-quantized with
// convaug::quantize after each elementary step.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "convaug/core/error.hpp"
#include "convaug/core/image.hpp"
#include "convaug/core/rng.hpp"

namespace convaug {

// ---------------------------------------------------------------------------
// Photometric primitives
// ---------------------------------------------------------------------------

/// v <- v * factor
inline ImageBuffer adjust_brightness(const ImageBuffer& img, double factor) {
  ImageBuffer out = img;
  for (auto& v : out.data()) v = quantize(static_cast<double>(v) * factor);
  return out;
}

/// Mean BT.601 luma over the whole image, summed in raster order.
inline double mean_luma(const ImageBuffer& img) {
  const auto px = img.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < px.size(); i += 3) sum += luma(px[i], px[i + 1], px[i + 2]);
  return sum / static_cast<double>(img.height() * img.width());
}

/// v <- mean + (v - mean) * factor, mean being the image's mean luma.
inline ImageBuffer adjust_contrast(const ImageBuffer& img, double factor) {
  const double mean = mean_luma(img);
  ImageBuffer out = img;
  for (auto& v : out.data()) v = quantize(mean + (static_cast<double>(v) - mean) * factor);
  return out;
}

/// v <- y + (v - y) * factor, y being the pixel's own luma.
inline ImageBuffer adjust_saturation(const ImageBuffer& img, double factor) {
  ImageBuffer out = img;
  auto px = out.data();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    const double y = luma(px[i], px[i + 1], px[i + 2]);
    for (std::size_t c = 0; c < 3; ++c) {
      px[i + c] = quantize(y + (static_cast<double>(px[i + c]) - y) * factor);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ColorJitter
// ---------------------------------------------------------------------------

/// Maximum relative deltas; each factor is drawn from [max(0, 1-x), 1+x].
struct ColorJitterSpec {
  double brightness = 0.4;
  double contrast = 0.4;
  double saturation = 0.4;

  void validate() const {
    if (!(brightness >= 0.0) || !(contrast >= 0.0) || !(saturation >= 0.0)) {
      throw InvalidArgument("color jitter deltas must be >= 0");
    }
  }
};

enum class JitterStep : std::uint8_t { kBrightness, kContrast, kSaturation };

/// Concrete factors and application order for one ColorJitter call.
struct ColorJitterDraw {
  double brightness = 1.0;
  double contrast = 1.0;
  double saturation = 1.0;
  std::array<JitterStep, 3> order = {JitterStep::kBrightness, JitterStep::kContrast,
                                     JitterStep::kSaturation};
};

/// Draw order: brightness, contrast, saturation factors, then a
/// Fisher-Yates shuffle of the three steps.
inline ColorJitterDraw draw_color_jitter(const ColorJitterSpec& spec, RngStream& rng) {
  spec.validate();
  auto factor = [&](double x) { return rng.uniform(std::max(0.0, 1.0 - x), 1.0 + x); };
  ColorJitterDraw d;
  d.brightness = factor(spec.brightness);
  d.contrast = factor(spec.contrast);
  d.saturation = factor(spec.saturation);
  for (std::size_t i = d.order.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(d.order[i], d.order[j]);
  }
  return d;
}

/// Applies the drawn steps in order. A factor of exactly 1 is a no-op.
inline ImageBuffer apply_color_jitter(const ImageBuffer& img, const ColorJitterDraw& d) {
  ImageBuffer out = img;
  for (auto step : d.order) {
    switch (step) {
      case JitterStep::kBrightness:
        if (d.brightness != 1.0) out = adjust_brightness(out, d.brightness);
        break;
      case JitterStep::kContrast:
        if (d.contrast != 1.0) out = adjust_contrast(out, d.contrast);
        break;
      case JitterStep::kSaturation:
        if (d.saturation != 1.0) out = adjust_saturation(out, d.saturation);
        break;
    }
  }
  return out;
}

inline ImageBuffer color_jitter(const ImageBuffer& img, const ColorJitterSpec& spec, RngStream& rng) {
  return apply_color_jitter(img, draw_color_jitter(spec, rng));
}

// ---------------------------------------------------------------------------
// PCA lighting
// ---------------------------------------------------------------------------

/// Additive RGB shift along principal color directions. eigenvectors[c][j]
/// is component c (R, G, B) of principal direction j; eigenvalues are on the
/// [0, 1] intensity scale, so shifts are multiplied by 255.
struct LightingSpec {
  double alpha_std = 0.1;
  std::array<double, 3> eigenvalues{};
  std::array<std::array<double, 3>, 3> eigenvectors{};

  void validate() const {
    if (!(alpha_std >= 0.0)) throw InvalidArgument("lighting alpha_std must be >= 0");
    for (std::size_t j = 0; j < 3; ++j) {
      double norm2 = 0.0;
      for (std::size_t c = 0; c < 3; ++c) norm2 += eigenvectors[c][j] * eigenvectors[c][j];
      if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6) {
        throw InvalidArgument("lighting eigenvector column " + std::to_string(j) +
                              " is not unit norm (|v| = " + std::to_string(std::sqrt(norm2)) + ")");
      }
    }
  }
};

/// The customary ImageNet RGB PCA basis (columns renormalized to unit length,
/// the published four-digit values are off by up to 1e-5).
inline LightingSpec imagenet_lighting(double alpha_std = 0.1) {
  LightingSpec s;
  s.alpha_std = alpha_std;
  s.eigenvalues = {0.2175, 0.0188, 0.0045};
  s.eigenvectors = {{{-0.5675, 0.7192, 0.4009},
                     {-0.5808, -0.0045, -0.8140},
                     {-0.5836, -0.6948, 0.4203}}};
  for (std::size_t j = 0; j < 3; ++j) {
    double n = 0.0;
    for (std::size_t c = 0; c < 3; ++c) n += s.eigenvectors[c][j] * s.eigenvectors[c][j];
    n = std::sqrt(n);
    for (std::size_t c = 0; c < 3; ++c) s.eigenvectors[c][j] /= n;
  }
  return s;
}

/// Per-channel shift: sum_j eigenvectors[c][j] * alphas[j] * eigenvalues[j] * 255.
inline std::array<double, 3> lighting_shift(const LightingSpec& spec, const std::array<double, 3>& alphas) {
  std::array<double, 3> shift{};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t j = 0; j < 3; ++j) {
      shift[c] += spec.eigenvectors[c][j] * alphas[j] * spec.eigenvalues[j] * 255.0;
    }
  }
  return shift;
}

inline ImageBuffer apply_channel_shift(const ImageBuffer& img, const std::array<double, 3>& shift) {
  if (shift == std::array<double, 3>{}) return img;
  ImageBuffer out = img;
  auto px = out.data();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    for (std::size_t c = 0; c < 3; ++c) px[i + c] = quantize(px[i + c] + shift[c]);
  }
  return out;
}

/// Draws alpha_j ~ N(0, alpha_std), j = 0..2 in order.
inline std::array<double, 3> draw_lighting_alphas(const LightingSpec& spec, RngStream& rng) {
  std::array<double, 3> a{};
  for (auto& v : a) v = spec.alpha_std * rng.normal();
  return a;
}

inline ImageBuffer pca_lighting(const ImageBuffer& img, const LightingSpec& spec, RngStream& rng) {
  spec.validate();
  const auto alphas = draw_lighting_alphas(spec, rng);
  return apply_channel_shift(img, lighting_shift(spec, alphas));
}

// ---------------------------------------------------------------------------
// RandomErasing
// ---------------------------------------------------------------------------

struct RandomErasingSpec {
  enum class Fill { kRandomPerPixel, kConstant };

  double probability = 0.5;
  double area_low = 0.02;
  double area_high = 0.33;
  double aspect_low = 0.3;
  double aspect_high = 3.3;
  Fill fill = Fill::kRandomPerPixel;
  std::uint8_t fill_value = 0;

  void validate() const {
    if (!(probability >= 0.0 && probability <= 1.0)) {
      throw InvalidArgument("erasing probability must lie in [0, 1]");
    }
    if (!(area_low > 0.0 && area_low <= area_high && area_high < 1.0)) {
      throw InvalidArgument("erasing area range must satisfy 0 < low <= high < 1");
    }
    if (!(aspect_low > 0.0 && aspect_low <= aspect_high)) {
      throw InvalidArgument("erasing aspect range must satisfy 0 < low <= high");
    }
  }
};

struct EraseRect {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  friend bool operator==(const EraseRect&, const EraseRect&) = default;
};

inline constexpr int kErasingAttempts = 10;

/// Rectangle placement, without the probability coin. Per attempt draws
/// area, log-aspect, then (on success) top and left. Gives up after ten
/// rectangles that do not fit strictly inside the image.
inline std::optional<EraseRect> sample_erasing_rect(std::size_t height, std::size_t width,
                                                    const RandomErasingSpec& spec, RngStream& rng) {
  const double image_area = static_cast<double>(height * width);
  const double log_lo = std::log(spec.aspect_low);
  const double log_hi = std::log(spec.aspect_high);
  for (int attempt = 0; attempt < kErasingAttempts; ++attempt) {
    const double area = rng.uniform(spec.area_low, spec.area_high) * image_area;
    const double aspect = std::exp(rng.uniform(log_lo, log_hi));
    const auto h = static_cast<std::size_t>(std::llround(std::sqrt(area * aspect)));
    const auto w = static_cast<std::size_t>(std::llround(std::sqrt(area / aspect)));
    if (h == 0 || w == 0 || h >= height || w >= width) continue;
    EraseRect r;
    r.height = h;
    r.width = w;
    r.top = static_cast<std::size_t>(rng.below(height - h + 1));
    r.left = static_cast<std::size_t>(rng.below(width - w + 1));
    return r;
  }
  return std::nullopt;
}

/// Overwrites `rect`; random fill draws one value per channel in raster order.
inline ImageBuffer erase_rect(const ImageBuffer& img, const EraseRect& rect,
                              const RandomErasingSpec& spec, RngStream& rng) {
  ImageBuffer out = img;
  for (std::size_t r = rect.top; r < rect.top + rect.height; ++r) {
    auto row = out.row(r);
    for (std::size_t c = rect.left; c < rect.left + rect.width; ++c) {
      for (std::size_t ch = 0; ch < 3; ++ch) {
        row[c * 3 + ch] = spec.fill == RandomErasingSpec::Fill::kConstant
                              ? spec.fill_value
                              : static_cast<std::uint8_t>(rng.below(256));
      }
    }
  }
  return out;
}

inline ImageBuffer random_erasing(const ImageBuffer& img, const RandomErasingSpec& spec, RngStream& rng) {
  spec.validate();
  if (!rng.bernoulli(spec.probability)) return img;
  const auto rect = sample_erasing_rect(img.height(), img.width(), spec, rng);
  if (!rect) return img;
  return erase_rect(img, *rect, spec, rng);
}

// ---------------------------------------------------------------------------
// RandAugment
// ---------------------------------------------------------------------------

enum class RandAugmentOp : std::uint8_t {
  kIdentity,
  kBrightness,
  kContrast,
  kSaturation,
  kPosterize,
  kSolarize,
  kEqualize,
  kRotate,
  kTranslateX,
  kTranslateY,
  kShearX,
  kShearY,
};

inline constexpr std::size_t kRandAugmentOpCount = 12;
inline constexpr int kMaxMagnitude = 10;

inline const char* to_string(RandAugmentOp op) {
  static constexpr const char* names[] = {"identity", "brightness", "contrast", "saturation",
                                          "posterize", "solarize", "equalize", "rotate",
                                          "translate_x", "translate_y", "shear_x", "shear_y"};
  return names[static_cast<std::size_t>(op)];
}

/// v with its (8 - bits) low bits cleared.
inline ImageBuffer posterize(const ImageBuffer& img, int bits) {
  if (bits < 1 || bits > 8) throw InvalidArgument("posterize bits must be in [1, 8]");
  const auto mask = static_cast<std::uint8_t>(0xFFu << (8 - bits));
  ImageBuffer out = img;
  for (auto& v : out.data()) v &= mask;
  return out;
}

/// v if v < threshold, else 255 - v.
inline ImageBuffer solarize(const ImageBuffer& img, int threshold) {
  ImageBuffer out = img;
  for (auto& v : out.data()) {
    if (v >= threshold) v = static_cast<std::uint8_t>(255 - v);
  }
  return out;
}

/// Per-channel histogram equalization with the PIL ImageOps lookup:
/// step = (N - count of the highest occupied bin) / 255, lut[i] = (cum(i) +
/// step/2) / step. Channels with a single occupied level are unchanged.
inline ImageBuffer equalize(const ImageBuffer& img) {
  ImageBuffer out = img;
  auto px = out.data();
  for (std::size_t ch = 0; ch < 3; ++ch) {
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = ch; i < px.size(); i += 3) ++hist[px[i]];
    std::size_t total = 0, last = 0, occupied = 0;
    for (std::size_t v = 0; v < 256; ++v) {
      if (hist[v]) {
        total += hist[v];
        last = hist[v];
        ++occupied;
      }
    }
    if (occupied <= 1) continue;
    const std::size_t step = (total - last) / 255;
    if (step == 0) continue;
    std::array<std::uint8_t, 256> lut{};
    std::size_t n = step / 2;
    for (std::size_t v = 0; v < 256; ++v) {
      lut[v] = static_cast<std::uint8_t>(std::min<std::size_t>(n / step, 255));
      n += hist[v];
    }
    for (std::size_t i = ch; i < px.size(); i += 3) px[i] = lut[px[i]];
  }
  return out;
}

/// Inverse-mapped affine warp about the image center. For each output pixel
/// center p, the source point is inv * (p - c) + c - offset; it is sampled
/// bilinearly with half-pixel centers, and taps outside the image read 0.
inline ImageBuffer warp_affine(const ImageBuffer& img, const std::array<double, 4>& inv,
                               double offset_x = 0.0, double offset_y = 0.0) {
  const std::size_t h = img.height(), w = img.width();
  const double cx = static_cast<double>(w) / 2.0;
  const double cy = static_cast<double>(h) / 2.0;
  ImageBuffer out(h, w);
  auto tap = [&](std::int64_t r, std::int64_t c, std::size_t ch) -> double {
    if (r < 0 || c < 0 || r >= static_cast<std::int64_t>(h) || c >= static_cast<std::int64_t>(w)) return 0.0;
    return img.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), ch);
  };
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double dx = static_cast<double>(c) + 0.5 - cx;
      const double dy = static_cast<double>(r) + 0.5 - cy;
      const double sx = inv[0] * dx + inv[1] * dy + cx - offset_x - 0.5;
      const double sy = inv[2] * dx + inv[3] * dy + cy - offset_y - 0.5;
      const double fx0 = std::floor(sx), fy0 = std::floor(sy);
      const double fx = sx - fx0, fy = sy - fy0;
      const auto x0 = static_cast<std::int64_t>(fx0), y0 = static_cast<std::int64_t>(fy0);
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double t0 = tap(y0, x0, ch), t1 = tap(y0, x0 + 1, ch);
        const double b0 = tap(y0 + 1, x0, ch), b1 = tap(y0 + 1, x0 + 1, ch);
        const double upper = t0 + (t1 - t0) * fx;
        const double lower = b0 + (b1 - b0) * fx;
        out.at(r, c, ch) = quantize(upper + (lower - upper) * fy);
      }
    }
  }
  return out;
}

/// Linear magnitude schedule. `negate` flips the sign of signed parameters.
///   brightness/contrast/saturation  factor = 1 +/- 0.09 * M      (0.1 .. 1.9)
///   posterize                       bits = 8 - round(0.4 * M)    (8 .. 4)
///   solarize                        threshold = 256 - round(25.6 * M)
///   equalize, identity              no parameter
///   rotate                          +/- 3 * M degrees            (<= 30)
///   translate_x / translate_y       +/- 0.03 * M of width/height (<= 0.3)
///   shear_x / shear_y               +/- 0.03 * M                 (<= 0.3)
struct RandAugmentParams {
  static double color_factor(int m, bool negate) { return 1.0 + (negate ? -0.09 : 0.09) * m; }
  static int posterize_bits(int m) { return 8 - static_cast<int>(std::lround(0.4 * m)); }
  static int solarize_threshold(int m) { return 256 - static_cast<int>(std::lround(25.6 * m)); }
  static double rotate_degrees(int m, bool negate) { return (negate ? -3.0 : 3.0) * m; }
  static double translate_fraction(int m, bool negate) { return (negate ? -0.03 : 0.03) * m; }
  static double shear(int m, bool negate) { return (negate ? -0.03 : 0.03) * m; }
};

inline ImageBuffer apply_rand_augment_op(const ImageBuffer& img, RandAugmentOp op, int magnitude,
                                         bool negate = false) {
  if (magnitude < 0 || magnitude > kMaxMagnitude) {
    throw InvalidArgument("RandAugment magnitude must be in [0, 10]");
  }
  using P = RandAugmentParams;
  const int m = magnitude;
  switch (op) {
    case RandAugmentOp::kIdentity:
      return img;
    case RandAugmentOp::kBrightness:
      return adjust_brightness(img, P::color_factor(m, negate));
    case RandAugmentOp::kContrast:
      return adjust_contrast(img, P::color_factor(m, negate));
    case RandAugmentOp::kSaturation:
      return adjust_saturation(img, P::color_factor(m, negate));
    case RandAugmentOp::kPosterize:
      return posterize(img, P::posterize_bits(m));
    case RandAugmentOp::kSolarize:
      return solarize(img, P::solarize_threshold(m));
    case RandAugmentOp::kEqualize:
      return equalize(img);
    case RandAugmentOp::kRotate: {
      const double t = P::rotate_degrees(m, negate) * std::numbers::pi / 180.0;
      if (t == 0.0) return img;
      const double cs = std::cos(t), sn = std::sin(t);
      return warp_affine(img, {cs, sn, -sn, cs});
    }
    case RandAugmentOp::kTranslateX: {
      const double dx = P::translate_fraction(m, negate) * static_cast<double>(img.width());
      return dx == 0.0 ? img : warp_affine(img, {1, 0, 0, 1}, dx, 0.0);
    }
    case RandAugmentOp::kTranslateY: {
      const double dy = P::translate_fraction(m, negate) * static_cast<double>(img.height());
      return dy == 0.0 ? img : warp_affine(img, {1, 0, 0, 1}, 0.0, dy);
    }
    case RandAugmentOp::kShearX: {
      const double s = P::shear(m, negate);
      return s == 0.0 ? img : warp_affine(img, {1, -s, 0, 1});
    }
    case RandAugmentOp::kShearY: {
      const double s = P::shear(m, negate);
      return s == 0.0 ? img : warp_affine(img, {1, 0, -s, 1});
    }
  }
  return img;
}

struct RandAugmentSpec {
  int n_ops = 2;
  int magnitude = 9;

  void validate() const {
    if (n_ops < 1) throw InvalidArgument("RandAugment n_ops must be >= 1");
    if (magnitude < 0 || magnitude > kMaxMagnitude) {
      throw InvalidArgument("RandAugment magnitude must be in [0, 10]");
    }
  }
};

/// Per step draws the operator (uniform over the 12, with replacement) then
/// a sign bit.
inline ImageBuffer rand_augment(const ImageBuffer& img, int n_ops, int magnitude, RngStream& rng) {
  RandAugmentSpec{n_ops, magnitude}.validate();
  ImageBuffer out = img;
  for (int i = 0; i < n_ops; ++i) {
    const auto op = static_cast<RandAugmentOp>(rng.below(kRandAugmentOpCount));
    const bool negate = rng.below(2) == 1;
    out = apply_rand_augment_op(out, op, magnitude, negate);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

using AugmentOp = std::variant<ColorJitterSpec, LightingSpec, RandomErasingSpec, RandAugmentSpec>;

struct AugmentPipeline {
  std::vector<AugmentOp> ops;
  std::uint64_t global_seed = 0;

  void validate() const {
    for (const auto& op : ops) std::visit([](const auto& s) { s.validate(); }, op);
  }
};

inline ImageBuffer apply_op(const ImageBuffer& img, const AugmentOp& op, RngStream& rng) {
  return std::visit(
      [&](const auto& spec) -> ImageBuffer {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ColorJitterSpec>) {
          return color_jitter(img, spec, rng);
        } else if constexpr (std::is_same_v<T, LightingSpec>) {
          return pca_lighting(img, spec, rng);
        } else if constexpr (std::is_same_v<T, RandomErasingSpec>) {
          return random_erasing(img, spec, rng);
        } else {
          return rand_augment(img, spec.n_ops, spec.magnitude, rng);
        }
      },
      op);
}

/// Applies the operators in order; operator i draws from a stream seeded
/// with derive_sample_seed(global_seed, sample_id, i).
inline ImageBuffer apply_pipeline(const ImageBuffer& img, const AugmentPipeline& pipeline,
                                  std::string_view sample_id) {
  ImageBuffer out = img;
  for (std::size_t i = 0; i < pipeline.ops.size(); ++i) {
    RngStream rng(derive_sample_seed(pipeline.global_seed, sample_id, static_cast<std::uint32_t>(i)));
    out = apply_op(out, pipeline.ops[i], rng);
  }
  return out;
}

}  // namespace convaug
