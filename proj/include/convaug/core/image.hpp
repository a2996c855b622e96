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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "convaug/core/error.hpp"

namespace convaug {

/// Re-quantizes a real sample to 8 bits: round half away from zero, then
/// clamp to [0, 255]. Every pixel-producing operation funnels through here.
inline std::uint8_t quantize(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  const double r = std::round(v);
  return r >= 255.0 ? std::uint8_t{255} : static_cast<std::uint8_t>(r);
}

/// BT.601 luma of one RGB triple, unrounded.
inline double luma(double r, double g, double b) noexcept {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

/// 8-bit interleaved RGB raster, row-major, always three channels.
class ImageBuffer {
 public:
  static constexpr std::size_t kChannels = 3;

  ImageBuffer(std::size_t height, std::size_t width)
      : ImageBuffer(height, width,
                    std::vector<std::uint8_t>(checked_size(height, width), 0)) {}

  ImageBuffer(std::size_t height, std::size_t width,
              std::vector<std::uint8_t> data)
      : height_(height), width_(width), data_(std::move(data)) {
    const std::size_t expected = checked_size(height, width);
    if (data_.size() != expected) {
      throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                            " does not equal height*width*3 = " +
                            std::to_string(expected));
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return kChannels; }
  std::size_t size_bytes() const noexcept { return data_.size(); }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t at(std::size_t row, std::size_t col, std::size_t ch) const {
    return data_[index(row, col, ch)];
  }
  std::uint8_t& at(std::size_t row, std::size_t col, std::size_t ch) {
    return data_[index(row, col, ch)];
  }

  /// Mutable view of one row (width*3 bytes).
  std::span<std::uint8_t> row(std::size_t r) noexcept {
    return std::span<std::uint8_t>(data_).subspan(r * width_ * kChannels,
                                                  width_ * kChannels);
  }
  std::span<const std::uint8_t> row(std::size_t r) const noexcept {
    return std::span<const std::uint8_t>(data_).subspan(r * width_ * kChannels,
                                                        width_ * kChannels);
  }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  static std::size_t checked_size(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) {
      throw InvalidArgument("image dimensions must be >= 1, got " +
                            std::to_string(height) + "x" + std::to_string(width));
    }
    return height * width * kChannels;
  }

  std::size_t index(std::size_t row, std::size_t col, std::size_t ch) const noexcept {
    return (row * width_ + col) * kChannels + ch;
  }

  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> data_;
};

/// Single-color image.
inline ImageBuffer filled_image(std::size_t height, std::size_t width,
                                std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  ImageBuffer img(height, width);
  auto px = img.data();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    px[i] = r;
    px[i + 1] = g;
    px[i + 2] = b;
  }
  return img;
}

}  // namespace convaug
