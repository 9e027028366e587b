#pragma once

// Frame sources (image directories, FRAMES/1 raw pipes, in-memory), rate
// sampling, HUD layout configuration and region-of-interest crops.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hudtrace/core/geometry.hpp"
#include "hudtrace/core/image.hpp"
#include "hudtrace/core/rational.hpp"

namespace hudtrace {

inline constexpr int kMinFrameWidth = 1280;
inline constexpr int kMinFrameHeight = 720;
inline constexpr int kRecommendedWidth = 1920;
inline constexpr int kRecommendedHeight = 1080;

struct Frame {
  std::int64_t index = 0;
  Rational timestamp;  // index / fps, exact
  RgbImage image;

  [[nodiscard]] int width() const noexcept { return image.width; }
  [[nodiscard]] int height() const noexcept { return image.height; }
};

// Single-consumer sequential frame source.
class FrameStream {
 public:
  virtual ~FrameStream() = default;
  // Next frame in index order, or nullopt at end of stream.
  virtual std::optional<Frame> next() = 0;
  [[nodiscard]] virtual Rational fps() const = 0;
  [[nodiscard]] virtual std::string source_id() const = 0;
  // Warnings raised so far (resolution below 1080p, ...). Also sent to the log.
  [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

 protected:
  // Validates dimensions against the first frame seen; warns once below 1080p.
  void check_frame(const Frame& f);
  void warn(std::string message);

 private:
  std::vector<std::string> warnings_;
  int width_ = 0;
  int height_ = 0;
};

std::string below_1080p_warning(int width, int height);

// `uri` is either a directory of frame_%08d.png files (with optional stream.meta
// carrying fps and source_id), a file holding a FRAMES/1 stream, or "-" for stdin.
// `fps` is required for directories without stream.meta and ignored for pipes,
// whose header declares the rate.
std::unique_ptr<FrameStream> open_frame_source(const std::string& uri,
                                               std::optional<Rational> fps = std::nullopt);

// FRAMES/1 reader over an arbitrary byte stream (the caller keeps `in` alive).
std::unique_ptr<FrameStream> open_frames_pipe(std::istream& in, std::string source_id = "pipe");

// Lazily produced frames; `produce(i)` is called for i = 0..count-1 in order.
std::unique_ptr<FrameStream> make_generated_stream(std::int64_t count, Rational fps,
                                                   std::string source_id,
                                                   std::function<RgbImage(std::int64_t)> produce);

// In-memory frames; images must share dimensions.
std::unique_ptr<FrameStream> make_memory_stream(std::vector<RgbImage> images, Rational fps,
                                                std::string source_id = "memory");

// Yields, for every k = 0,1,2,..., the first frame with timestamp >= k / rate_hz.
std::unique_ptr<FrameStream> sample_at_rate(std::unique_ptr<FrameStream> stream,
                                            Rational rate_hz = Rational(1));

struct StreamMeta {
  Rational fps;
  std::string source_id;
};
StreamMeta read_stream_meta(const std::filesystem::path& file);
void write_stream_meta(const std::filesystem::path& file, const StreamMeta& meta);

// FRAMES/1 writer.
void write_frames_header(std::ostream& out, int width, int height, Rational fps);
void write_frame_raw(std::ostream& out, const RgbImage& image);

std::string frame_file_name(std::int64_t index);

struct RoiCrop {
  std::int64_t source_frame_index = 0;
  PixelRect rect_px;
  RgbImage pixels;
};

// Origin floors to the containing pixel; extent rounds to the nearest pixel count
// and is clipped to the frame. Throws InvalidArgument-style ConfigError on a
// zero-pixel result.
PixelRect rasterize(const NormRect& rect, int frame_width, int frame_height);
RoiCrop crop_roi(const Frame& frame, const NormRect& rect);
RgbImage crop_rgb(const RgbImage& image, const PixelRect& rect);

struct HudLayout {
  NormRect minimap;
  NormRect phase_icon;
  NormRect kill_counter;
  NormRect player_counter;
  double minimap_scale = 1.0;        // map pixels per minimap pixel
  double minimap_mask_radius = 0.0;  // fraction of the minimap width
  std::filesystem::path glyph_atlas;
  std::filesystem::path phase_atlas;
  std::filesystem::path map_image;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;
};

// Relative resource paths resolve against the layout file's directory.
HudLayout load_hud_layout(const std::filesystem::path& path);
std::string format_hud_layout(const HudLayout& layout);

}  // namespace hudtrace
