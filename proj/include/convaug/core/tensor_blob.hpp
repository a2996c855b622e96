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

// CTNS tensor container.
//
//   offset  size      field
//   0       4         magic "CTNS"
//   4       1         version (= 1)
//   5       1         dtype (0 = u8, 1 = f32 little-endian)
//   6       1         ndim, 1..5
//   7       4*ndim    shape, u32 little-endian each
//   7+4n    ...       payload, row-major, product(shape) * element size bytes

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "convaug/core/error.hpp"

namespace convaug {

enum class DType : std::uint8_t { kU8 = 0, kF32 = 1 };

inline constexpr std::array<char, 4> kBlobMagic = {'C', 'T', 'N', 'S'};
inline constexpr std::uint8_t kBlobVersion = 1;
inline constexpr std::size_t kBlobMaxDims = 5;
inline constexpr std::size_t kBlobFixedHeader = 7;

inline std::size_t element_size(DType t) {
  switch (t) {
    case DType::kU8:
      return 1;
    case DType::kF32:
      return 4;
  }
  throw FormatError("unknown dtype code " +
                    std::to_string(static_cast<int>(t)));
}

/// Dense tensor as handed to external trainers.
struct Tensor {
  DType dtype = DType::kU8;
  std::vector<std::uint32_t> shape;
  std::vector<std::uint8_t> payload;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Which part of a blob failed to parse.
enum class BlobField { kMagic, kVersion, kDType, kNdim, kShape, kPayload };

inline const char* to_string(BlobField f) {
  switch (f) {
    case BlobField::kMagic: return "magic";
    case BlobField::kVersion: return "version";
    case BlobField::kDType: return "dtype";
    case BlobField::kNdim: return "ndim";
    case BlobField::kShape: return "shape";
    case BlobField::kPayload: return "payload";
  }
  return "?";
}

class BlobError : public FormatError {
 public:
  enum class Kind { kBadMagic, kBadVersion, kBadDType, kBadNdim, kTruncated, kLengthMismatch };

  BlobError(Kind kind, BlobField field, const std::string& what)
      : FormatError(std::string("tensor blob ") + to_string(field) + ": " + what),
        kind_(kind),
        field_(field) {}

  Kind kind() const noexcept { return kind_; }
  BlobField field() const noexcept { return field_; }

 private:
  Kind kind_;
  BlobField field_;
};

namespace detail {

inline void put_u32le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline std::uint32_t get_u32le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void check_ndim(std::size_t ndim) {
  if (ndim < 1 || ndim > kBlobMaxDims) {
    throw BlobError(BlobError::Kind::kBadNdim, BlobField::kNdim,
                    "ndim " + std::to_string(ndim) + " outside [1, 5]");
  }
}

}  // namespace detail

/// Serializes a tensor; returns the number of bytes written
/// (7 + 4*ndim + payload length).
inline std::size_t write_tensor_blob(std::span<const std::uint32_t> shape, DType dtype,
                                     std::span<const std::uint8_t> payload,
                                     std::ostream& sink) {
  detail::check_ndim(shape.size());
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  const std::size_t expected = count * element_size(dtype);
  if (payload.size() != expected) {
    throw BlobError(BlobError::Kind::kLengthMismatch, BlobField::kPayload,
                    "expected " + std::to_string(expected) + " bytes for shape, got " +
                        std::to_string(payload.size()));
  }
  sink.write(kBlobMagic.data(), kBlobMagic.size());
  sink.put(static_cast<char>(kBlobVersion));
  sink.put(static_cast<char>(dtype));
  sink.put(static_cast<char>(shape.size()));
  for (auto d : shape) detail::put_u32le(sink, d);
  sink.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
  if (!sink) throw IoError("short write while emitting tensor blob");
  return kBlobFixedHeader + 4 * shape.size() + payload.size();
}

inline std::size_t write_tensor_blob(const Tensor& t, std::ostream& sink) {
  return write_tensor_blob(t.shape, t.dtype, t.payload, sink);
}

inline Tensor read_tensor_blob(std::istream& source) {
  using K = BlobError::Kind;
  unsigned char head[kBlobFixedHeader];
  source.read(reinterpret_cast<char*>(head), kBlobFixedHeader);
  const auto got_head = static_cast<std::size_t>(source.gcount());
  if (got_head < 4) {
    throw BlobError(K::kTruncated, BlobField::kMagic,
                    "truncated: expected 4 bytes, got " + std::to_string(got_head));
  }
  if (std::memcmp(head, kBlobMagic.data(), 4) != 0) {
    throw BlobError(K::kBadMagic, BlobField::kMagic,
                    "bad magic \"" + std::string(reinterpret_cast<char*>(head), 4) +
                        "\", expected \"CTNS\"");
  }
  if (got_head < kBlobFixedHeader) {
    throw BlobError(K::kTruncated, BlobField::kNdim,
                    "truncated header: expected 7 bytes, got " + std::to_string(got_head));
  }
  if (head[4] != kBlobVersion) {
    throw BlobError(K::kBadVersion, BlobField::kVersion,
                    "unsupported version " + std::to_string(head[4]));
  }
  if (head[5] > static_cast<unsigned char>(DType::kF32)) {
    throw BlobError(K::kBadDType, BlobField::kDType,
                    "unknown dtype code " + std::to_string(head[5]));
  }
  Tensor t;
  t.dtype = static_cast<DType>(head[5]);
  const std::size_t ndim = head[6];
  detail::check_ndim(ndim);

  std::vector<unsigned char> dims(4 * ndim);
  source.read(reinterpret_cast<char*>(dims.data()), static_cast<std::streamsize>(dims.size()));
  if (static_cast<std::size_t>(source.gcount()) != dims.size()) {
    throw BlobError(K::kTruncated, BlobField::kShape,
                    "truncated: expected " + std::to_string(dims.size()) + " bytes, got " +
                        std::to_string(source.gcount()));
  }
  t.shape.resize(ndim);
  for (std::size_t i = 0; i < ndim; ++i) t.shape[i] = detail::get_u32le(&dims[4 * i]);

  const std::size_t expected = t.element_count() * element_size(t.dtype);
  t.payload.resize(expected);
  source.read(reinterpret_cast<char*>(t.payload.data()), static_cast<std::streamsize>(expected));
  const auto got = static_cast<std::size_t>(source.gcount());
  if (got != expected) {
    throw BlobError(K::kTruncated, BlobField::kPayload,
                    "truncated: expected " + std::to_string(expected) + " bytes, got " +
                        std::to_string(got));
  }
  return t;
}

inline std::vector<std::uint8_t> encode_tensor_blob(const Tensor& t) {
  std::ostringstream out(std::ios::binary);
  write_tensor_blob(t, out);
  const std::string s = std::move(out).str();
  return {s.begin(), s.end()};
}

inline Tensor decode_tensor_blob(std::span<const std::uint8_t> bytes) {
  std::istringstream in(std::string(bytes.begin(), bytes.end()), std::ios::binary);
  return read_tensor_blob(in);
}

inline void save_tensor_blob(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_tensor_blob(t, out);
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

inline Tensor load_tensor_blob(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_tensor_blob(in);
}

/// Packs floats as little-endian f32 payload bytes.
inline std::vector<std::uint8_t> f32_payload(std::span<const float> values) {
  std::vector<std::uint8_t> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return out;
}

}  // namespace convaug
