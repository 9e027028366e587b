#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "hudtrace/core/error.hpp"
#include "hudtrace/core/log.hpp"
#include "hudtrace/core/png_io.hpp"
#include "hudtrace/ingest.hpp"
#include "test_util.hpp"

using namespace hudtrace;

namespace {

RgbImage pattern(int w, int h, int seed) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, (x + seed) & 255, (y * 3 + seed) & 255, (x ^ y) & 255);
  return img;
}

std::vector<Frame> drain(FrameStream& s) {
  std::vector<Frame> out;
  while (auto f = s.next()) out.push_back(std::move(*f));
  return out;
}

std::unique_ptr<FrameStream> tiny_stream(std::int64_t n, Rational fps) {
  return make_generated_stream(n, fps, "gen", [](std::int64_t) { return RgbImage(1280, 720); });
}

}  // namespace

TEST(Ingest, DirectoryStreamTimestamps) {
  testutil::TempDir dir("frames");
  const RgbImage img(1920, 1080, 9);
  for (int i = 0; i < 60; ++i) write_png(dir / frame_file_name(i), img, 0);
  auto s = open_frame_source(dir.path().string(), Rational(30));
  const auto frames = drain(*s);
  ASSERT_EQ(frames.size(), 60u);
  EXPECT_EQ(frames.front().timestamp, Rational(0));
  EXPECT_EQ(frames.back().timestamp, Rational(59, 30));
  EXPECT_NEAR(frames.back().timestamp.to_double(), 1.967, 5e-4);
  EXPECT_TRUE(s->warnings().empty());
}

TEST(Ingest, StreamMetaSuppliesFpsAndId) {
  testutil::TempDir dir("meta");
  write_png(dir / frame_file_name(0), RgbImage(1920, 1080), 0);
  write_stream_meta(dir / "stream.meta", {Rational(30000, 1001), "vod-7"});
  auto s = open_frame_source(dir.path().string());
  EXPECT_EQ(s->fps(), Rational(30000, 1001));
  EXPECT_EQ(s->source_id(), "vod-7");
}

TEST(Ingest, BelowFullHdWarns) {
  testutil::TempDir dir("small");
  write_png(dir / frame_file_name(0), RgbImage(1280, 720), 0);
  std::vector<std::string> logged;
  set_log_sink([&](LogLevel, const std::string& m) { logged.push_back(m); });
  auto s = open_frame_source(dir.path().string(), Rational(30));
  EXPECT_EQ(drain(*s).size(), 1u);
  set_log_sink(nullptr);
  ASSERT_EQ(s->warnings().size(), 1u);
  EXPECT_EQ(s->warnings()[0], below_1080p_warning(1280, 720));
  EXPECT_NE(s->warnings()[0].find("below 1920x1080"), std::string::npos);
  ASSERT_FALSE(logged.empty());
}

TEST(Ingest, MissingAndEmptySourcesFail) {
  testutil::TempDir dir("empty");
  EXPECT_THROW(open_frame_source((dir / "nope").string(), Rational(30)), InputError);
  try {
    open_frame_source(dir.path().string(), Rational(30));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("no frames found"), std::string::npos);
  }
}

TEST(Ingest, InconsistentDimensionsMidStream) {
  testutil::TempDir dir("mixed");
  write_png(dir / frame_file_name(0), RgbImage(1920, 1080), 0);
  write_png(dir / frame_file_name(1), RgbImage(1280, 720), 0);
  auto s = open_frame_source(dir.path().string(), Rational(30));
  EXPECT_TRUE(s->next().has_value());
  EXPECT_THROW(s->next(), InputError);
}

TEST(Ingest, FramesPipeRoundTripIsBitExact) {
  std::stringstream pipe;
  write_frames_header(pipe, 1920, 1080, Rational(30000, 1001));
  std::vector<RgbImage> imgs = {pattern(1920, 1080, 1), pattern(1920, 1080, 2), pattern(1920, 1080, 3)};
  for (const auto& i : imgs) write_frame_raw(pipe, i);
  const auto bytes = pipe.str();
  EXPECT_EQ(bytes.size() - bytes.find('\n') - 1, 3u * 6220800u);
  std::istringstream in(bytes);
  auto s = open_frames_pipe(in);
  EXPECT_EQ(s->fps(), Rational(30000, 1001));
  const auto frames = drain(*s);
  ASSERT_EQ(frames.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(frames[i].image.pixels.size(), 6220800u);
    EXPECT_EQ(frames[i].image, imgs[i]);
    EXPECT_EQ(frames[i].timestamp, Rational(i) / Rational(30000, 1001));
  }
}

TEST(Ingest, MalformedPipeHeaders) {
  for (const char* header : {"FRAMES/2 w=4 h=4 fps=1 fmt=rgb24\n", "FRAMES/1 w=4 h=4 fps=1 fmt=yuv\n",
                             "FRAMES/1 w=4 fps=1 fmt=rgb24\n", "garbage"}) {
    std::istringstream in(header);
    EXPECT_THROW(
        {
          auto s = open_frames_pipe(in);
          (void)s->next();
        },
        InputError)
        << header;
  }
  std::istringstream truncated("FRAMES/1 w=1280 h=720 fps=1 fmt=rgb24\nabc");
  auto s = open_frames_pipe(truncated);
  EXPECT_THROW((void)s->next(), InputError);
}

TEST(Ingest, SampleAtRate) {
  auto idx = [](std::unique_ptr<FrameStream> s) {
    std::vector<std::int64_t> v;
    while (auto f = s->next()) v.push_back(f->index);
    return v;
  };
  EXPECT_EQ(idx(sample_at_rate(tiny_stream(90, Rational(30)))), (std::vector<std::int64_t>{0, 30, 60}));
  std::vector<std::int64_t> all(90);
  for (int i = 0; i < 90; ++i) all[i] = i;
  EXPECT_EQ(idx(sample_at_rate(tiny_stream(90, Rational(30)), Rational(30))), all);

  // Brute-force oracle for 29.97 fps: first index with i / fps >= k.
  const Rational fps(30000, 1001);
  std::vector<std::int64_t> expect;
  for (std::int64_t k = 0;; ++k) {
    std::int64_t i = 0;
    while (i < 300 && Rational(i) / fps < Rational(k)) ++i;
    if (i >= 300) break;
    expect.push_back(i);
  }
  const auto got = idx(sample_at_rate(tiny_stream(300, fps)));
  EXPECT_EQ(got, expect);
  EXPECT_EQ(got[1], 30);
  EXPECT_EQ(got[3], 90);

  // Idempotent at equal rates.
  auto once = sample_at_rate(tiny_stream(90, Rational(30)));
  std::vector<RgbImage> imgs;
  while (auto f = once->next()) imgs.push_back(f->image);
  EXPECT_EQ(idx(sample_at_rate(make_memory_stream(imgs, Rational(1)))), (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_TRUE(idx(sample_at_rate(tiny_stream(0, Rational(30)))).empty());
  EXPECT_THROW(sample_at_rate(tiny_stream(3, Rational(1)), Rational(2)), std::invalid_argument);
}

TEST(Ingest, CropRoi) {
  Frame f;
  f.image = pattern(1920, 1080, 5);
  const auto full = crop_roi(f, {0, 0, 1, 1});
  EXPECT_EQ(full.pixels, f.image);
  const auto q = crop_roi(f, {0.5, 0.5, 0.25, 0.25});
  EXPECT_EQ(q.rect_px, (PixelRect{960, 540, 480, 270}));
  for (int y = 0; y < 270; y += 7)
    for (int x = 0; x < 480; x += 5)
      for (int c = 0; c < 3; ++c) EXPECT_EQ(q.pixels.at(x, y)[c], f.image.at(960 + x, 540 + y)[c]);
  EXPECT_THROW(crop_roi(f, {0.999, 0.999, 0.0001, 0.0001}), ConfigError);
  EXPECT_THROW(crop_roi(f, {0.9, 0.9, 0.2, 0.2}), ConfigError);
}

TEST(Ingest, LayoutValidationAndRoundTrip) {
  testutil::TempDir dir("layout");
  HudLayout l;
  l.minimap = {0.85, 0.02, 0.12, 0.2};
  l.phase_icon = {0.85, 0.22, 0.02, 0.03};
  l.kill_counter = {0.9, 0.22, 0.03, 0.02};
  l.player_counter = {0.94, 0.22, 0.03, 0.02};
  l.minimap_scale = 1.5;
  l.minimap_mask_radius = 0.05;
  l.glyph_atlas = "glyphs";
  l.phase_atlas = "phases";
  l.map_image = "map.png";
  EXPECT_NO_THROW(l.validate());
  {
    std::ofstream(dir / "layout.txt") << format_hud_layout(l);
  }
  const auto back = load_hud_layout(dir / "layout.txt");
  EXPECT_DOUBLE_EQ(back.minimap.w, 0.12);
  EXPECT_DOUBLE_EQ(back.minimap_scale, 1.5);
  EXPECT_EQ(back.map_image, dir / "map.png");

  auto bad = l;
  bad.kill_counter = {0.86, 0.1, 0.05, 0.05};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = l;
  bad.minimap_mask_radius = 0.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = l;
  bad.minimap_scale = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  {
    std::ofstream(dir / "broken.txt") << "minimap.x=0.1\nminimap.bogus=3\n";
  }
  try {
    load_hud_layout(dir / "broken.txt");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("minimap.bogus"), std::string::npos);
  }
}
