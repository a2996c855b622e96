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

// Frame ingestion: 8-bit RGB PNG and binary PPM (P6) only.

#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "convaug/core/error.hpp"
#include "convaug/core/image.hpp"

namespace convaug {

namespace detail {

inline std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool has_png_signature(const std::vector<std::uint8_t>& b) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return b.size() >= 8 && std::equal(sig, sig + 8, b.begin());
}

struct PngImage {
  png_image img{};
  PngImage() {
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace detail

inline ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes,
                              const std::string& name = "<memory>") {
  detail::PngImage png;
  if (!png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size())) {
    throw FormatError(name + ": cannot decode PNG: " + png.img.message);
  }
  if (png.img.format != PNG_FORMAT_RGB) {
    throw FormatError(name + ": unsupported PNG pixel format (only 8-bit RGB "
                      "without alpha or palette is accepted)");
  }
  std::vector<std::uint8_t> data(static_cast<std::size_t>(png.img.height) *
                                 png.img.width * 3);
  if (!png_image_finish_read(&png.img, nullptr, data.data(), 0, nullptr)) {
    throw FormatError(name + ": PNG decode failed: " + png.img.message);
  }
  return ImageBuffer(png.img.height, png.img.width, std::move(data));
}

inline ImageBuffer decode_ppm(const std::vector<std::uint8_t>& bytes,
                              const std::string& name = "<memory>") {
  std::size_t pos = 2;
  auto read_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) tok += static_cast<char>(bytes[pos++]);
    return tok;
  };
  auto read_int = [&](const char* what) -> std::size_t {
    const std::string tok = read_token();
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw FormatError(name + ": malformed PPM " + what + " \"" + tok + "\"");
    }
    return std::stoull(tok);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw FormatError(name + ": not a binary PPM (P6)");
  }
  const std::size_t width = read_int("width");
  const std::size_t height = read_int("height");
  const std::size_t maxval = read_int("maxval");
  if (maxval != 255) {
    throw FormatError(name + ": PPM maxval " + std::to_string(maxval) +
                      " unsupported (only 8-bit, maxval 255)");
  }
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = width * height * 3;
  if (bytes.size() < pos || bytes.size() - pos < need) {
    throw FormatError(name + ": truncated PPM raster, expected " + std::to_string(need) +
                      " bytes");
  }
  return ImageBuffer(height, width,
                     std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                               bytes.begin() + static_cast<std::ptrdiff_t>(pos + need)));
}

/// Reads a PNG or P6 PPM, chosen by file signature.
inline ImageBuffer read_image(const std::filesystem::path& path) {
  const auto bytes = detail::slurp(path);
  if (detail::has_png_signature(bytes)) return decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes, path.string());
  throw FormatError(path.string() + ": unsupported image format (expected 8-bit RGB PNG or "
                    "binary PPM P6)");
}

inline void write_ppm(const std::filesystem::path& path, const ImageBuffer& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()),
            static_cast<std::streamsize>(img.size_bytes()));
  if (!out) throw IoError("failed writing " + path.string());
}

inline void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  detail::PngImage png;
  png.img.width = static_cast<png_uint_32>(img.width());
  png.img.height = static_cast<png_uint_32>(img.height());
  png.img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png.img, path.c_str(), 0, img.data().data(), 0, nullptr)) {
    throw IoError(path.string() + ": PNG encode failed: " + png.img.message);
  }
}

}  // namespace convaug
