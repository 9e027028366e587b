#include "hudtrace/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "hudtrace/core/error.hpp"
#include "hudtrace/core/kv.hpp"
#include "hudtrace/core/log.hpp"
#include "hudtrace/core/png_io.hpp"

namespace hudtrace {

namespace fs = std::filesystem;

std::string below_1080p_warning(int width, int height) {
  return "frame resolution " + std::to_string(width) + "x" + std::to_string(height) +
         " is below 1920x1080; OCR and minimap matching may be unreliable";
}

void FrameStream::warn(std::string message) {
  log_warn(source_id() + ": " + message);
  warnings_.push_back(std::move(message));
}

void FrameStream::check_frame(const Frame& f) {
  const int w = f.width();
  const int h = f.height();
  if (f.image.pixels.size() != static_cast<std::size_t>(w) * h * 3) {
    throw InputError(source_id() + ": frame " + std::to_string(f.index) + " buffer size mismatch");
  }
  if (width_ == 0) {
    if (w < kMinFrameWidth || h < kMinFrameHeight) {
      throw InputError(source_id() + ": frame size " + std::to_string(w) + "x" +
                       std::to_string(h) + " below minimum 1280x720");
    }
    width_ = w;
    height_ = h;
    if (w < kRecommendedWidth || h < kRecommendedHeight) warn(below_1080p_warning(w, h));
  } else if (w != width_ || h != height_) {
    throw InputError(source_id() + ": frame " + std::to_string(f.index) + " is " +
                     std::to_string(w) + "x" + std::to_string(h) + ", stream is " +
                     std::to_string(width_) + "x" + std::to_string(height_));
  }
}

std::string frame_file_name(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%08lld.png", static_cast<long long>(index));
  return buf;
}

StreamMeta read_stream_meta(const fs::path& file) {
  const auto kv = KeyValueFile::load(file);
  kv.reject_unknown({"fps", "source_id"});
  StreamMeta meta;
  try {
    meta.fps = Rational::parse(kv.get("fps"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(file.string() + ": bad fps: " + e.what());
  }
  if (!meta.fps.positive()) throw ConfigError(file.string() + ": fps must be positive");
  meta.source_id = kv.get_or("source_id", file.parent_path().filename().string());
  return meta;
}

void write_stream_meta(const fs::path& file, const StreamMeta& meta) {
  std::ostringstream out;
  out << "fps=" << meta.fps.str() << "\nsource_id=" << meta.source_id << "\n";
  std::ofstream f(file, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + file.string());
  f << out.str();
}

namespace {

class DirectoryStream final : public FrameStream {
 public:
  DirectoryStream(fs::path dir, Rational fps, std::string id)
      : dir_(std::move(dir)), fps_(fps), id_(std::move(id)) {}

  std::optional<Frame> next() override {
    const fs::path file = dir_ / frame_file_name(index_);
    if (!fs::exists(file)) return std::nullopt;
    Frame f;
    f.index = index_;
    f.timestamp = Rational(index_) / fps_;
    f.image = read_png_rgb(file);
    check_frame(f);
    ++index_;
    return f;
  }
  Rational fps() const override { return fps_; }
  std::string source_id() const override { return id_; }

 private:
  fs::path dir_;
  Rational fps_;
  std::string id_;
  std::int64_t index_ = 0;
};

class PipeStream final : public FrameStream {
 public:
  PipeStream(std::istream& in, std::string id) : in_(in), id_(std::move(id)) { read_header(); }
  PipeStream(std::unique_ptr<std::istream> owned, std::string id)
      : owned_(std::move(owned)), in_(*owned_), id_(std::move(id)) {
    read_header();
  }

  std::optional<Frame> next() override {
    Frame f;
    f.image = RgbImage(width_, height_);
    auto& buf = f.image.pixels;
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    const auto got = in_.gcount();
    if (got == 0) return std::nullopt;
    if (static_cast<std::size_t>(got) != buf.size()) {
      throw InputError(id_ + ": truncated frame " + std::to_string(index_) + " (" +
                       std::to_string(got) + " of " + std::to_string(buf.size()) + " bytes)");
    }
    f.index = index_;
    f.timestamp = Rational(index_) / fps_;
    check_frame(f);
    ++index_;
    return f;
  }
  Rational fps() const override { return fps_; }
  std::string source_id() const override { return id_; }

 private:
  void read_header() {
    std::string line;
    if (!std::getline(in_, line)) throw InputError(id_ + ": missing FRAMES/1 header");
    std::istringstream ss(line);
    std::string magic;
    ss >> magic;
    if (magic != "FRAMES/1") throw InputError(id_ + ": malformed pipe header (magic)");
    std::string tok;
    bool have_w = false, have_h = false, have_fps = false, have_fmt = false;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw InputError(id_ + ": malformed pipe header token " + tok);
      const auto key = tok.substr(0, eq);
      const auto val = tok.substr(eq + 1);
      try {
        if (key == "w") {
          width_ = static_cast<int>(parse_long(val));
          have_w = true;
        } else if (key == "h") {
          height_ = static_cast<int>(parse_long(val));
          have_h = true;
        } else if (key == "fps") {
          fps_ = Rational::parse(val);
          have_fps = true;
        } else if (key == "fmt") {
          if (val != "rgb24") throw InputError(id_ + ": unsupported pixel format " + val);
          have_fmt = true;
        } else {
          throw InputError(id_ + ": unknown pipe header key " + key);
        }
      } catch (const std::invalid_argument&) {
        throw InputError(id_ + ": malformed pipe header value " + tok);
      }
    }
    if (!(have_w && have_h && have_fps && have_fmt) || width_ <= 0 || height_ <= 0 ||
        !fps_.positive()) {
      throw InputError(id_ + ": malformed pipe header");
    }
  }

  std::unique_ptr<std::istream> owned_;
  std::istream& in_;
  std::string id_;
  int width_ = 0;
  int height_ = 0;
  Rational fps_;
  std::int64_t index_ = 0;
};

class GeneratedStream final : public FrameStream {
 public:
  GeneratedStream(std::int64_t count, Rational fps, std::string id,
                  std::function<RgbImage(std::int64_t)> produce)
      : count_(count), fps_(fps), id_(std::move(id)), produce_(std::move(produce)) {}

  std::optional<Frame> next() override {
    if (index_ >= count_) return std::nullopt;
    Frame f;
    f.index = index_;
    f.timestamp = Rational(index_) / fps_;
    f.image = produce_(index_);
    check_frame(f);
    ++index_;
    return f;
  }
  Rational fps() const override { return fps_; }
  std::string source_id() const override { return id_; }

 private:
  std::int64_t count_;
  Rational fps_;
  std::string id_;
  std::function<RgbImage(std::int64_t)> produce_;
  std::int64_t index_ = 0;
};

class SampledStream final : public FrameStream {
 public:
  SampledStream(std::unique_ptr<FrameStream> inner, Rational rate)
      : inner_(std::move(inner)), rate_(rate) {}

  std::optional<Frame> next() override {
    while (auto f = inner_->next()) {
      // k / rate <= t  <=>  k <= t * rate
      const Rational scaled = f->timestamp * rate_;
      if (Rational(next_k_) <= scaled) {
        next_k_ = scaled.floor() + 1;
        return f;
      }
    }
    return std::nullopt;
  }
  Rational fps() const override { return rate_; }
  std::string source_id() const override { return inner_->source_id(); }

 private:
  std::unique_ptr<FrameStream> inner_;
  Rational rate_;
  std::int64_t next_k_ = 0;
};

}  // namespace

std::unique_ptr<FrameStream> open_frames_pipe(std::istream& in, std::string source_id) {
  return std::make_unique<PipeStream>(in, std::move(source_id));
}

std::unique_ptr<FrameStream> open_frame_source(const std::string& uri, std::optional<Rational> fps) {
  if (uri == "-") return open_frames_pipe(std::cin, "stdin");
  const fs::path path(uri);
  if (!fs::exists(path)) throw InputError("frame source not found: " + uri);
  if (fs::is_directory(path)) {
    std::string id = path.filename().string();
    if (id.empty()) id = path.parent_path().filename().string();
    Rational rate;
    if (fs::exists(path / "stream.meta")) {
      const auto meta = read_stream_meta(path / "stream.meta");
      rate = meta.fps;
      id = meta.source_id;
    } else if (fps) {
      rate = *fps;
    } else {
      throw InputError(uri + ": no stream.meta and no fps given");
    }
    if (!rate.positive()) throw InputError(uri + ": fps must be positive");
    if (!fs::exists(path / frame_file_name(0))) throw InputError("no frames found in " + uri);
    return std::make_unique<DirectoryStream>(path, rate, id);
  }
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw InputError("cannot open " + uri);
  return std::make_unique<PipeStream>(std::move(file), path.stem().string());
}

std::unique_ptr<FrameStream> make_generated_stream(std::int64_t count, Rational fps,
                                                   std::string source_id,
                                                   std::function<RgbImage(std::int64_t)> produce) {
  if (!fps.positive()) throw std::invalid_argument("fps must be positive");
  return std::make_unique<GeneratedStream>(count, fps, std::move(source_id), std::move(produce));
}

std::unique_ptr<FrameStream> make_memory_stream(std::vector<RgbImage> images, Rational fps,
                                                std::string source_id) {
  auto shared = std::make_shared<std::vector<RgbImage>>(std::move(images));
  const auto n = static_cast<std::int64_t>(shared->size());
  return make_generated_stream(n, fps, std::move(source_id),
                               [shared](std::int64_t i) { return (*shared)[i]; });
}

std::unique_ptr<FrameStream> sample_at_rate(std::unique_ptr<FrameStream> stream, Rational rate_hz) {
  if (!rate_hz.positive()) throw std::invalid_argument("sampling rate must be positive");
  if (rate_hz > stream->fps()) {
    throw std::invalid_argument("sampling rate " + rate_hz.str() + " exceeds stream fps " +
                                stream->fps().str());
  }
  return std::make_unique<SampledStream>(std::move(stream), rate_hz);
}

void write_frames_header(std::ostream& out, int width, int height, Rational fps) {
  out << "FRAMES/1 w=" << width << " h=" << height << " fps=" << fps.str() << " fmt=rgb24\n";
}

void write_frame_raw(std::ostream& out, const RgbImage& image) {
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

PixelRect rasterize(const NormRect& rect, int frame_width, int frame_height) {
  // The small epsilon keeps decimal layout values such as 1640/1920 from
  // flooring to the previous pixel.
  constexpr double eps = 1e-6;
  PixelRect px;
  px.x = static_cast<int>(std::floor(rect.x * frame_width + eps));
  px.y = static_cast<int>(std::floor(rect.y * frame_height + eps));
  px.w = static_cast<int>(std::lround(rect.w * frame_width));
  px.h = static_cast<int>(std::lround(rect.h * frame_height));
  px.x = std::clamp(px.x, 0, frame_width);
  px.y = std::clamp(px.y, 0, frame_height);
  px.w = std::min(px.w, frame_width - px.x);
  px.h = std::min(px.h, frame_height - px.y);
  if (px.w <= 0 || px.h <= 0) {
    throw ConfigError("degenerate region (" + std::to_string(rect.x) + "," +
                      std::to_string(rect.y) + "," + std::to_string(rect.w) + "," +
                      std::to_string(rect.h) + ") rounds to zero pixels");
  }
  return px;
}

RgbImage crop_rgb(const RgbImage& image, const PixelRect& r) {
  RgbImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    const auto* src = image.at(r.x, r.y + y);
    std::copy(src, src + static_cast<std::size_t>(r.w) * 3, out.at(0, y));
  }
  return out;
}

RoiCrop crop_roi(const Frame& frame, const NormRect& rect) {
  if (!rect.inside_unit()) throw ConfigError("region lies outside the unit square");
  RoiCrop crop;
  crop.source_frame_index = frame.index;
  crop.rect_px = rasterize(rect, frame.width(), frame.height());
  crop.pixels = crop_rgb(frame.image, crop.rect_px);
  return crop;
}

void HudLayout::validate() const {
  const std::pair<const char*, const NormRect*> rects[] = {
      {"minimap", &minimap}, {"phase", &phase_icon}, {"kills", &kill_counter},
      {"players", &player_counter}};
  for (const auto& [name, r] : rects) {
    if (!r->inside_unit()) throw ConfigError(std::string(name) + " rectangle outside [0,1]^2");
  }
  for (const auto& [name, r] : rects) {
    if (r != &minimap && r->overlaps(minimap)) {
      throw ConfigError(std::string(name) + " rectangle overlaps the minimap");
    }
  }
  if (!(minimap_scale > 0)) throw ConfigError("minimap.scale must be positive");
  if (!(minimap_mask_radius >= 0 && minimap_mask_radius < 0.5)) {
    throw ConfigError("minimap.mask_radius must lie in [0, 0.5)");
  }
}

HudLayout load_hud_layout(const fs::path& path) {
  const auto kv = KeyValueFile::load(path);
  std::set<std::string> allowed = {"minimap.scale", "minimap.mask_radius", "atlas.glyphs",
                                   "atlas.phases", "map.image"};
  for (const char* r : {"minimap", "phase", "kills", "players"}) {
    for (const char* c : {".x", ".y", ".w", ".h"}) allowed.insert(std::string(r) + c);
  }
  kv.reject_unknown(allowed);
  auto rect = [&](const std::string& p) {
    return NormRect{kv.get_double(p + ".x"), kv.get_double(p + ".y"), kv.get_double(p + ".w"),
                    kv.get_double(p + ".h")};
  };
  HudLayout l;
  l.minimap = rect("minimap");
  l.phase_icon = rect("phase");
  l.kill_counter = rect("kills");
  l.player_counter = rect("players");
  l.minimap_scale = kv.get_double("minimap.scale");
  l.minimap_mask_radius = kv.get_double_or("minimap.mask_radius", 0.0);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& key) {
    fs::path p(kv.get(key));
    return p.is_absolute() ? p : base / p;
  };
  l.glyph_atlas = resolve("atlas.glyphs");
  l.phase_atlas = resolve("atlas.phases");
  l.map_image = resolve("map.image");
  l.validate();
  return l;
}

std::string format_hud_layout(const HudLayout& l) {
  std::ostringstream out;
  out.precision(12);
  auto rect = [&](const char* p, const NormRect& r) {
    out << p << ".x=" << r.x << "\n" << p << ".y=" << r.y << "\n"
        << p << ".w=" << r.w << "\n" << p << ".h=" << r.h << "\n";
  };
  out << "# HUD regions in normalized frame coordinates\n";
  rect("minimap", l.minimap);
  rect("phase", l.phase_icon);
  rect("players", l.player_counter);
  rect("kills", l.kill_counter);
  out << "minimap.scale=" << l.minimap_scale << "\n";
  out << "minimap.mask_radius=" << l.minimap_mask_radius << "\n";
  out << "atlas.glyphs=" << l.glyph_atlas.string() << "\n";
  out << "atlas.phases=" << l.phase_atlas.string() << "\n";
  out << "map.image=" << l.map_image.string() << "\n";
  return out.str();
}

}  // namespace hudtrace
