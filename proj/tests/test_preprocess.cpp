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

#include <sstream>

#include "convaug/preprocess.hpp"
#include "test_support.hpp"

using namespace convaug;

namespace {

ImageBuffer checkerboard(std::size_t n) {
  ImageBuffer img(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t ch = 0; ch < 3; ++ch) img.at(r, c, ch) = (r + c) % 2 ? 255 : 0;
  return img;
}

bool all_zero(const ImageBuffer& img) {
  for (auto v : img.data())
    if (v) return false;
  return true;
}

}  // namespace

TEST(StripCrop, PaperFrameShape) {
  const auto img = fixtures::pattern_image(1000, 1000, 1);
  const auto out = strip_crop(img, {200, 200});
  EXPECT_EQ(out.height(), 1000u);
  EXPECT_EQ(out.width(), 600u);
  EXPECT_EQ(out.at(0, 0, 1), img.at(0, 200, 1));
  EXPECT_EQ(out.at(999, 599, 2), img.at(999, 799, 2));
}

TEST(StripCrop, ZeroMarginsIsIdentity) {
  std::mt19937_64 gen(4);
  const auto img = fixtures::random_image(13, 17, gen);
  EXPECT_EQ(strip_crop(img, {0, 0}), img);
}

TEST(StripCrop, IndexOracle) {
  std::mt19937_64 gen(5);
  const auto img = fixtures::random_image(10, 10, gen);
  const auto out = strip_crop(img, {2, 2});
  ASSERT_EQ(out.width(), 6u);
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t c = 0; c < 6; ++c)
      for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_EQ(out.at(r, c, ch), img.at(r, c + 2, ch));
}

TEST(StripCrop, RandomMarginsProperty) {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 50; ++t) {
    const std::size_t h = 1 + gen() % 12, w = 1 + gen() % 20;
    const auto img = fixtures::random_image(h, w, gen);
    const std::size_t left = gen() % w;
    const std::size_t right = gen() % (w - left);
    const auto out = strip_crop(img, {left, right});
    ASSERT_EQ(out.width(), w - left - right);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < out.width(); ++c)
        for (std::size_t ch = 0; ch < 3; ++ch) ASSERT_EQ(out.at(r, c, ch), img.at(r, c + left, ch));
  }
}

TEST(StripCrop, MarginsConsumingWidthRejected) {
  ImageBuffer img(4, 10);
  EXPECT_THROW(strip_crop(img, {5, 5}), InvalidArgument);
  EXPECT_THROW(strip_crop(img, {10, 0}), InvalidArgument);
  EXPECT_NO_THROW(strip_crop(img, {5, 4}));
}

TEST(BilinearResize, IdentityDims) {
  std::mt19937_64 gen(7);
  const auto img = fixtures::random_image(6, 9, gen);
  EXPECT_EQ(bilinear_resize(img, 6, 9), img);
}

TEST(BilinearResize, HandEvaluatedWeights) {
  // src x = (d + 0.5) * 2 / 4 - 0.5 -> -0.25, 0.25, 0.75, 1.25 -> clamp to [0, 1]
  // values: 0, 0.25*255 = 63.75, 0.75*255 = 191.25, 255
  ImageBuffer img(1, 2);
  for (std::size_t ch = 0; ch < 3; ++ch) img.at(0, 1, ch) = 255;
  const auto out = bilinear_resize(img, 1, 4);
  EXPECT_EQ(out.at(0, 0, 0), 0);
  EXPECT_EQ(out.at(0, 1, 0), 64);
  EXPECT_EQ(out.at(0, 2, 0), 191);
  EXPECT_EQ(out.at(0, 3, 0), 255);
}

TEST(BilinearResize, CheckerboardDownscale) {
  // Every output sample sits at source (0.5|2.5, 0.5|2.5): the mean of a
  // 2x2 checkerboard cell, 127.5, which rounds to 128.
  const auto out = bilinear_resize(checkerboard(4), 2, 2);
  for (auto v : out.data()) EXPECT_EQ(v, 128);
}

TEST(BilinearResize, ConstantStaysConstant) {
  for (std::size_t oh : {1u, 3u, 17u}) {
    for (std::size_t ow : {1u, 5u, 33u}) {
      const auto img = filled_image(7, 4, 12, 200, 99);
      const auto out = bilinear_resize(img, oh, ow);
      for (std::size_t r = 0; r < oh; ++r)
        for (std::size_t c = 0; c < ow; ++c) {
          EXPECT_EQ(out.at(r, c, 0), 12);
          EXPECT_EQ(out.at(r, c, 1), 200);
          EXPECT_EQ(out.at(r, c, 2), 99);
        }
    }
  }
}

TEST(BilinearResize, MatchesFourTapOracle) {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 40; ++t) {
    const auto img = fixtures::random_image(1 + gen() % 20, 1 + gen() % 20, gen);
    const std::size_t oh = 1 + gen() % 30, ow = 1 + gen() % 30;
    EXPECT_LE(fixtures::max_abs_diff(bilinear_resize(img, oh, ow), fixtures::oracle_bilinear(img, oh, ow)), 1);
  }
}

TEST(FaceCrop, UndetectedIsBlack) {
  const auto img = fixtures::pattern_image(50, 60, 3);
  FaceCropCounters counters;
  const auto out = face_crop(img, FaceBox{0, false, 1, 1, 20, 20}, 224, &counters);
  EXPECT_EQ(out.height(), 224u);
  EXPECT_EQ(out.width(), 224u);
  EXPECT_TRUE(all_zero(out));
  EXPECT_EQ(counters.black_filled, 1u);
  EXPECT_EQ(counters.degenerate, 0u);
}

TEST(FaceCrop, FullBoxSameSizeIsIdentity) {
  std::mt19937_64 gen(10);
  const auto img = fixtures::random_image(32, 32, gen);
  EXPECT_EQ(face_crop(img, FaceBox{0, true, 0, 0, 32, 32}, 32), img);
}

TEST(FaceCrop, CheckerboardAgainstOracle) {
  const auto out = face_crop(checkerboard(4), FaceBox{0, true, 0, 0, 4, 4}, 2);
  for (auto v : out.data()) EXPECT_EQ(v, 128);
}

TEST(FaceCrop, ClampsBoxToImage) {
  std::mt19937_64 gen(11);
  const auto img = fixtures::random_image(20, 30, gen);
  const auto clamped = face_crop(img, FaceBox{0, true, -5, -5, 10, 12}, 16);
  const auto inside = face_crop(img, FaceBox{0, true, 0, 0, 10, 12}, 16);
  EXPECT_EQ(clamped, inside);
}

TEST(FaceCrop, ZeroAreaAfterClampIsBlackAndCounted) {
  const auto img = fixtures::pattern_image(20, 30, 2);
  FaceCropCounters counters;
  const auto out = face_crop(img, FaceBox{0, true, 40, 0, 50, 10}, 8, &counters);
  EXPECT_TRUE(all_zero(out));
  EXPECT_EQ(counters.degenerate, 1u);
  EXPECT_EQ(counters.black_filled, 1u);
}

TEST(FaceCrop, RegionResizeMatchesOracle) {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 30; ++t) {
    const auto img = fixtures::random_image(40, 50, gen);
    const std::int64_t x0 = gen() % 40, y0 = gen() % 30;
    const std::int64_t x1 = x0 + 1 + gen() % (50 - x0), y1 = y0 + 1 + gen() % (40 - y0);
    ImageBuffer region(static_cast<std::size_t>(y1 - y0), static_cast<std::size_t>(x1 - x0));
    for (std::size_t r = 0; r < region.height(); ++r)
      for (std::size_t c = 0; c < region.width(); ++c)
        for (std::size_t ch = 0; ch < 3; ++ch) region.at(r, c, ch) = img.at(y0 + r, x0 + c, ch);
    const auto out = face_crop(img, FaceBox{0, true, x0, y0, x1, y1}, 24);
    EXPECT_LE(fixtures::max_abs_diff(out, fixtures::oracle_bilinear(region, 24, 24)), 1);
  }
}

TEST(FaceSidecar, ParsesAndRoundsOutward) {
  std::istringstream in(
      "frame_index,detected,x0,y0,x1,y1\n"
      "0,1,1.7,2.2,10.1,12.0\n"
      "1,0,0,0,0,0\n");
  const auto boxes = parse_face_sidecar(in);
  ASSERT_EQ(boxes.size(), 2u);
  const auto& b = boxes.at(0);
  EXPECT_TRUE(b.detected);
  EXPECT_EQ(b.x0, 1);
  EXPECT_EQ(b.y0, 2);
  EXPECT_EQ(b.x1, 11);
  EXPECT_EQ(b.y1, 12);
  EXPECT_FALSE(boxes.at(1).detected);
}

TEST(FaceSidecar, RejectsInvalidRows) {
  auto parse = [](const std::string& body) {
    std::istringstream in("frame_index,detected,x0,y0,x1,y1\n" + body);
    return parse_face_sidecar(in, "f.csv");
  };
  EXPECT_THROW(parse("0,1,5,5,5,9\n"), FormatError);
  EXPECT_THROW(parse("0,2,0,0,1,1\n"), FormatError);
  EXPECT_THROW(parse("0,1,0,0,1\n"), FormatError);
  EXPECT_THROW(parse("0,1,0,0,1,1\n0,0,0,0,0,0\n"), FormatError);
  try {
    parse("0,0,0,0,0,0\nx,1,0,0,1,1\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos) << e.what();
  }
}

TEST(SampleFrames, LastOne) {
  EXPECT_EQ(sample_frames(250, SamplingPolicy::last_one()), (std::vector<std::size_t>{249}));
}

TEST(SampleFrames, LastFive) {
  EXPECT_EQ(sample_frames(250, SamplingPolicy::last_k(5)),
            (std::vector<std::size_t>{245, 246, 247, 248, 249}));
  EXPECT_EQ(sample_frames(3, SamplingPolicy::last_k(5)), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(SampleFrames, UniformFloorFormula) {
  const auto idx = sample_frames(128, SamplingPolicy::uniform_n(64));
  ASSERT_EQ(idx.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(idx[i], 2 * i);
}

TEST(SampleFrames, UniformPadsShortClip) {
  EXPECT_EQ(sample_frames(3, SamplingPolicy::uniform_n(6)),
            (std::vector<std::size_t>{0, 1, 2, 2, 2, 2}));
}

TEST(SampleFrames, MonotoneProperty) {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 500; ++t) {
    const std::size_t T = 1 + gen() % 300, n = 1 + gen() % 100;
    for (const auto& p : {SamplingPolicy::last_k(n), SamplingPolicy::uniform_n(n)}) {
      const auto idx = sample_frames(T, p);
      for (std::size_t i = 1; i < idx.size(); ++i) {
        const bool tail = p.kind == SamplingPolicy::Kind::kUniformN && T < n && idx[i] == T - 1;
        ASSERT_TRUE(idx[i] > idx[i - 1] || tail);
      }
      for (auto v : idx) ASSERT_LT(v, T);
      if (p.kind == SamplingPolicy::Kind::kUniformN) {
        ASSERT_EQ(idx.size(), n);
        if (T >= n) {
          for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(idx[i], i * T / n);
        }
      }
    }
  }
}

TEST(SampleFrames, EmptyClipRejected) {
  EXPECT_THROW(sample_frames(0, SamplingPolicy::last_one()), InvalidArgument);
}

TEST(SamplingPolicy, ParseAndPrint) {
  EXPECT_EQ(SamplingPolicy::parse("last1").kind, SamplingPolicy::Kind::kLastOne);
  EXPECT_EQ(SamplingPolicy::parse("lastK:5").count, 5u);
  EXPECT_EQ(SamplingPolicy::parse("uniform:64").to_string(), "uniform:64");
  EXPECT_THROW(SamplingPolicy::parse("lastK:0"), InvalidArgument);
  EXPECT_THROW(SamplingPolicy::parse("middle"), InvalidArgument);
  EXPECT_THROW(SamplingPolicy::parse("uniform:x"), InvalidArgument);
}

TEST(ScanClip, SortsFramesAndIgnoresOthers) {
  fixtures::ScratchDir dir("clip");
  std::vector<ImageBuffer> frames;
  for (std::uint32_t i = 0; i < 4; ++i) frames.push_back(fixtures::pattern_image(3, 3, i));
  fixtures::write_clip(dir.path(), frames);
  fixtures::write_text(dir / "faces.csv", "x");
  fixtures::write_text(dir / "frame_12.ppm", "x");
  const auto clip = scan_clip(dir.path(), "s", "A");
  ASSERT_EQ(clip.frame_count(), 4u);
  EXPECT_EQ(clip.frame_numbers, (std::vector<std::int64_t>{0, 1, 2, 3}));
  EXPECT_EQ(read_image(clip.frames[2]), frames[2]);
  EXPECT_THROW(scan_clip(dir / "missing", "s", "A"), IoError);
}

TEST(ConcatViews, ShapeAndSlices) {
  for (std::size_t views : {3u, 4u}) {
    std::vector<std::pair<std::string, ImageBuffer>> frames;
    for (std::size_t v = 0; v < views; ++v) {
      frames.emplace_back(std::string(1, static_cast<char>('A' + v)),
                          fixtures::pattern_image(5, 7, static_cast<std::uint32_t>(v)));
    }
    const auto t = concat_views(frames);
    EXPECT_EQ(t.shape, (std::vector<std::uint32_t>{static_cast<std::uint32_t>(views), 5, 7, 3}));
    for (std::size_t v = 0; v < views; ++v) EXPECT_EQ(tensor_slice(t, v), frames[v].second);
  }
}

TEST(ConcatViews, FollowsViewOrderPermutationOracle) {
  ManifestEntry e;
  e.sample_id = "g";
  e.media = {{"C", "c"}, {"A", "a"}, {"D", "d"}, {"B", "b"}};
  e.view_order = {"B", "D", "A", "C"};
  std::map<std::string, ImageBuffer> by_path;
  for (std::uint32_t i = 0; i < 4; ++i) by_path.emplace(e.media[i].path, fixtures::pattern_image(4, 4, 10 + i));
  std::vector<std::pair<std::string, ImageBuffer>> frames;
  for (const auto& m : enumerate_views(e)) frames.emplace_back(m.tag, by_path.at(m.path));
  const auto t = concat_views(frames);
  const std::vector<std::string> expected_paths = {"b", "d", "a", "c"};
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(tensor_slice(t, j), by_path.at(expected_paths[j]));
}

TEST(ConcatViews, MismatchNamesView) {
  std::vector<std::pair<std::string, ImageBuffer>> frames = {
      {"A", ImageBuffer(4, 4)}, {"B", ImageBuffer(4, 4)}, {"seat3", ImageBuffer(4, 5)}};
  try {
    concat_views(frames);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("seat3"), std::string::npos);
  }
}
