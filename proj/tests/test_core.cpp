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

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>

#include "convaug/core/image.hpp"
#include "convaug/core/rng.hpp"
#include "convaug/core/tensor_blob.hpp"

using namespace convaug;

TEST(Quantize, RoundsHalfAwayFromZeroAndClamps) {
  EXPECT_EQ(quantize(0.5), 1);
  EXPECT_EQ(quantize(1.5), 2);
  EXPECT_EQ(quantize(2.5), 3);
  EXPECT_EQ(quantize(2.4999), 2);
  EXPECT_EQ(quantize(-0.4), 0);
  EXPECT_EQ(quantize(-7.0), 0);
  EXPECT_EQ(quantize(254.5), 255);
  EXPECT_EQ(quantize(1e9), 255);
  EXPECT_EQ(quantize(std::nan("")), 0);
}

TEST(ImageBuffer, RejectsWrongLength) {
  EXPECT_THROW(ImageBuffer(2, 2, std::vector<std::uint8_t>(11)), InvalidArgument);
  EXPECT_THROW(ImageBuffer(2, 2, std::vector<std::uint8_t>(13)), InvalidArgument);
  EXPECT_NO_THROW(ImageBuffer(2, 2, std::vector<std::uint8_t>(12)));
}

TEST(ImageBuffer, RejectsZeroDimensions) {
  EXPECT_THROW(ImageBuffer(0, 4), InvalidArgument);
  EXPECT_THROW(ImageBuffer(4, 0), InvalidArgument);
}

TEST(ImageBuffer, RowMajorInterleaved) {
  std::vector<std::uint8_t> data(2 * 3 * 3);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(i);
  ImageBuffer img(2, 3, data);
  EXPECT_EQ(img.at(0, 0, 0), 0);
  EXPECT_EQ(img.at(0, 1, 2), 5);
  EXPECT_EQ(img.at(1, 0, 0), 9);
  EXPECT_EQ(img.at(1, 2, 2), 17);
}

// Reference values computed once with an independent Python implementation
// of FNV-1a-64 and SplitMix64 (published constants).
TEST(Seeding, Fnv1aPublishedVector) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Seeding, SplitMixSequenceFromZero) {
  RngStream rng(0);
  EXPECT_EQ(rng.next_u64(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next_u64(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next_u64(), 0x06c45d188009454fULL);
}

TEST(Seeding, DeriveSampleSeedGolden) {
  EXPECT_EQ(derive_sample_seed(0, "a", 0), 0x5f29c2aadd9b8527ULL);
  EXPECT_EQ(derive_sample_seed(0, "a", 1), 0xc0fc99fea7ab959cULL);
  EXPECT_EQ(derive_sample_seed(42, "sample_000001", 3), 0x62dfd26f28a8e663ULL);
  EXPECT_EQ(derive_sample_seed(0xdeadbeefcafebabeULL, "eye/7", 2), 0xf60670b16d8e8421ULL);
}

TEST(Seeding, DeriveSampleSeedIsPure) {
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(derive_sample_seed(7, "clip_x", 4), derive_sample_seed(7, "clip_x", 4));
  }
}

TEST(Seeding, EmptySampleIdRejected) {
  EXPECT_THROW(derive_sample_seed(0, "", 0), InvalidArgument);
}

TEST(Seeding, OperatorIndexSeparatesStreams) {
  std::mt19937_64 gen(12345);
  std::uniform_int_distribution<int> len(1, 24), ch(33, 126);
  int differ = 0;
  constexpr int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    const std::uint64_t s = gen();
    std::string id(static_cast<std::size_t>(len(gen)), ' ');
    for (auto& c : id) c = static_cast<char>(ch(gen));
    differ += derive_sample_seed(s, id, 0) != derive_sample_seed(s, id, 1);
  }
  EXPECT_GE(differ, kTrials * 999 / 1000);
}

TEST(RngStream, UniformStaysInRange) {
  RngStream rng(99);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
  }
}

TEST(RngStream, DegenerateUniformIsExact) {
  RngStream rng(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.uniform(1.0, 1.0), 1.0);
}

TEST(RngStream, NormalMoments) {
  RngStream rng(2024);
  double sum = 0, sq = 0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(TensorBlob, SmallBlobSize) {
  std::ostringstream out(std::ios::binary);
  const std::uint32_t shape[] = {2, 2};
  const std::uint8_t payload[] = {1, 2, 3, 4};
  EXPECT_EQ(write_tensor_blob(shape, DType::kU8, payload, out), 19u);
  const std::string bytes = out.str();
  ASSERT_EQ(bytes.size(), 19u);
  EXPECT_EQ(bytes.substr(0, 4), "CTNS");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 2);
  EXPECT_EQ(bytes.substr(7, 4), std::string("\x02\x00\x00\x00", 4));
  EXPECT_EQ(bytes.substr(15), std::string("\x01\x02\x03\x04", 4));
}

TEST(TensorBlob, FaceCropBlobSize) {
  Tensor t;
  t.shape = {224, 224, 3};
  t.payload.assign(224 * 224 * 3, 0);
  EXPECT_EQ(t.payload.size(), 150528u);
  std::ostringstream out(std::ios::binary);
  EXPECT_EQ(write_tensor_blob(t, out), 150547u);
  EXPECT_EQ(out.str().size(), 150547u);
}

TEST(TensorBlob, ShapeIsLittleEndian) {
  Tensor t;
  t.shape = {0x01020304};
  t.payload.assign(0x01020304, 0);
  const auto bytes = encode_tensor_blob(t);
  EXPECT_EQ(bytes[7], 0x04);
  EXPECT_EQ(bytes[8], 0x03);
  EXPECT_EQ(bytes[9], 0x02);
  EXPECT_EQ(bytes[10], 0x01);
}

TEST(TensorBlob, RoundTripProperty) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor t;
    t.dtype = gen() % 2 ? DType::kF32 : DType::kU8;
    const std::size_t ndim = 1 + gen() % 5;
    for (std::size_t d = 0; d < ndim; ++d) t.shape.push_back(static_cast<std::uint32_t>(gen() % 5));
    t.payload.resize(t.element_count() * element_size(t.dtype));
    for (auto& b : t.payload) b = static_cast<std::uint8_t>(gen());
    const auto bytes = encode_tensor_blob(t);
    ASSERT_EQ(bytes.size(), 7 + 4 * ndim + t.payload.size());
    EXPECT_EQ(decode_tensor_blob(bytes), t);
  }
}

TEST(TensorBlob, F32PayloadLittleEndian) {
  const float values[] = {1.0f, -2.5f};
  const auto payload = f32_payload(values);
  ASSERT_EQ(payload.size(), 8u);
  // 1.0f = 0x3f800000
  EXPECT_EQ(payload[0], 0x00);
  EXPECT_EQ(payload[3], 0x3f);
  Tensor t{DType::kF32, {2}, payload};
  EXPECT_EQ(decode_tensor_blob(encode_tensor_blob(t)), t);
}

TEST(TensorBlob, WriteRejectsLengthMismatch) {
  std::ostringstream out(std::ios::binary);
  const std::uint32_t shape[] = {2, 2};
  const std::uint8_t payload[] = {1, 2, 3};
  EXPECT_THROW(write_tensor_blob(shape, DType::kU8, payload, out), FormatError);
  const std::uint8_t f32_short[] = {0, 0, 0, 0};
  EXPECT_THROW(write_tensor_blob(shape, DType::kF32, f32_short, out), FormatError);
}

TEST(TensorBlob, WriteRejectsNdimOutOfRange) {
  std::ostringstream out(std::ios::binary);
  EXPECT_THROW(write_tensor_blob(std::span<const std::uint32_t>{}, DType::kU8, {}, out), FormatError);
  const std::uint32_t six[] = {1, 1, 1, 1, 1, 1};
  const std::uint8_t one[] = {0};
  EXPECT_THROW(write_tensor_blob(six, DType::kU8, one, out), FormatError);
}

namespace {

BlobError read_error(std::vector<std::uint8_t> bytes) {
  try {
    decode_tensor_blob(bytes);
  } catch (const BlobError& e) {
    return e;
  }
  ADD_FAILURE() << "expected BlobError";
  return BlobError(BlobError::Kind::kBadMagic, BlobField::kMagic, "none");
}

Tensor sample_tensor() {
  Tensor t;
  t.shape = {3, 4};
  for (int i = 0; i < 12; ++i) t.payload.push_back(static_cast<std::uint8_t>(i));
  return t;
}

}  // namespace

TEST(TensorBlob, BadMagic) {
  auto bytes = encode_tensor_blob(sample_tensor());
  bytes[0] = 'X';
  const auto e = read_error(bytes);
  EXPECT_EQ(e.kind(), BlobError::Kind::kBadMagic);
  EXPECT_EQ(e.field(), BlobField::kMagic);
  EXPECT_NE(std::string(e.what()).find("XTNS"), std::string::npos);
}

TEST(TensorBlob, BadVersion) {
  auto bytes = encode_tensor_blob(sample_tensor());
  bytes[4] = 2;
  EXPECT_EQ(read_error(bytes).kind(), BlobError::Kind::kBadVersion);
}

TEST(TensorBlob, BadDType) {
  auto bytes = encode_tensor_blob(sample_tensor());
  bytes[5] = 7;
  EXPECT_EQ(read_error(bytes).kind(), BlobError::Kind::kBadDType);
}

TEST(TensorBlob, BadNdim) {
  auto bytes = encode_tensor_blob(sample_tensor());
  bytes[6] = 6;
  EXPECT_EQ(read_error(bytes).kind(), BlobError::Kind::kBadNdim);
  bytes[6] = 0;
  EXPECT_EQ(read_error(bytes).kind(), BlobError::Kind::kBadNdim);
}

TEST(TensorBlob, TruncatedPayloadReportsCounts) {
  auto bytes = encode_tensor_blob(sample_tensor());
  bytes.resize(bytes.size() - 5);  // 12-byte payload, 7 left
  const auto e = read_error(bytes);
  EXPECT_EQ(e.kind(), BlobError::Kind::kTruncated);
  EXPECT_EQ(e.field(), BlobField::kPayload);
  const std::string msg = e.what();
  EXPECT_NE(msg.find("expected 12"), std::string::npos) << msg;
  EXPECT_NE(msg.find("got 7"), std::string::npos) << msg;
}

TEST(TensorBlob, TruncatedShapeAndHeader) {
  auto bytes = encode_tensor_blob(sample_tensor());
  bytes.resize(9);
  EXPECT_EQ(read_error(bytes).field(), BlobField::kShape);
  bytes.resize(5);
  EXPECT_EQ(read_error(bytes).kind(), BlobError::Kind::kTruncated);
  bytes.resize(2);
  EXPECT_EQ(read_error(bytes).kind(), BlobError::Kind::kTruncated);
}
