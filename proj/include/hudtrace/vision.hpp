#pragma once

// Pixel-level primitives: luma conversion, CLAHE, masked zero-normalized
// cross-correlation, coarse-to-fine map localization and fixed-font glyph /
// icon classification.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hudtrace/core/image.hpp"
#include "hudtrace/core/phase.hpp"

namespace hudtrace {

// round(0.299 R + 0.587 G + 0.114 B), evaluated exactly in integers.
GrayImage to_luma(const RgbImage& rgb);

GrayImage resize_nearest(const GrayImage& img, int width, int height);
// 2x2 box average with rounding; odd trailing rows/columns are dropped.
GrayImage downsample2(const GrayImage& img);

struct ClaheParams {
  int tile_px = 64;
  double clip_limit = 2.0;  // multiple of the uniform bin height; <= 0 or inf disables clipping
};

// Contrast-limited adaptive histogram equalization. The image is split into
// floor(dim / tile_px) tiles per axis; each tile's clipped histogram yields a
// transfer curve that maps the mid-point of every level's cumulative mass, so
// the lowest occupied level goes to 0, the highest to 255 and a flat histogram
// is left unchanged. Outputs are bilinearly blended between tile centres.
GrayImage clahe(const GrayImage& img, const ClaheParams& params = {});

// Per-tile transfer curve, exposed for tests.
std::vector<double> clahe_transfer(const std::vector<double>& histogram, double clip_limit);

struct MatchResult {
  int x = 0;
  int y = 0;
  double score = 0.0;
  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

inline constexpr int kMinMaskSupport = 64;

// Template with optional binary support mask (non-zero = used), prepared for
// repeated correlation. All sums are exact 64-bit integers.
class NccTemplate {
 public:
  NccTemplate(const GrayImage& templ, const GrayImage* mask = nullptr);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::int64_t support() const noexcept { return n_; }

 private:
  friend class NccSearchImage;
  struct Run {
    int row, begin, end;
  };
  int width_, height_;
  std::vector<std::int16_t> weights_;  // template value on the support, 0 elsewhere
  std::vector<Run> runs_;
  std::int64_t n_ = 0, sum_ = 0, var_n2_ = 0;  // var_n2_ = n * sum(T^2) - sum(T)^2
};

// Search image with per-row prefix sums of S and S^2.
class NccSearchImage {
 public:
  explicit NccSearchImage(const GrayImage& search);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }

  // Score of the template placed with its top-left corner at (x, y).
  [[nodiscard]] double score(const NccTemplate& t, int x, int y) const;

  // Best offset in [x0, x1] x [y0, y1] (clipped to the valid range); ties go to
  // the smallest y, then the smallest x.
  [[nodiscard]] MatchResult best(const NccTemplate& t, int x0, int y0, int x1, int y1) const;
  [[nodiscard]] MatchResult best(const NccTemplate& t) const;

  // Row-major scores for every valid offset ((W-w+1) x (H-h+1)).
  [[nodiscard]] std::vector<double> score_map(const NccTemplate& t) const;

 private:
  int width_, height_;
  std::vector<std::int16_t> values_;
  std::vector<std::int32_t> prefix_;     // (width + 1) per row
  std::vector<std::int32_t> prefix_sq_;  // (width + 1) per row
};

// Exhaustive zero-normalized cross-correlation over unmasked template pixels.
// Zero-variance template or window scores 0. Throws std::invalid_argument if the
// template does not fit or the mask keeps fewer than kMinMaskSupport pixels.
MatchResult ncc_match(const GrayImage& templ, const GrayImage& search);
MatchResult ncc_match(const GrayImage& templ, const GrayImage& search, const GrayImage& mask);

// Disk of zeros (radius in pixels, centred) inside an otherwise all-ones mask.
GrayImage center_disk_mask(int width, int height, double radius_px);

struct LocatorParams {
  int min_coarse_dim = 12;  // coarsest level keeps template sides >= this
  int candidates = 16;      // coarse peaks refined down the pyramid
  int suppression_px = 3;   // non-maximum suppression radius at the coarse level
  int refine_radius = 2;    // search slack per level when refining
  int min_survivors = 2;    // each finer level keeps the better half, at least this many
};

// Locates a minimap-like template in a large map by exhaustive NCC on a coarse
// pyramid level followed by windowed refinement of the best peaks.
class MapLocator {
 public:
  explicit MapLocator(const GrayImage& map, LocatorParams params = {});

  [[nodiscard]] MatchResult locate(const GrayImage& templ, const GrayImage& mask) const;
  [[nodiscard]] int map_width() const noexcept { return levels_.front().width(); }
  [[nodiscard]] int map_height() const noexcept { return levels_.front().height(); }

 private:
  LocatorParams params_;
  std::vector<NccSearchImage> levels_;
};

struct Glyph {
  char symbol = '0';
  GrayImage bitmap;
};

struct GlyphAtlas {
  std::vector<Glyph> entries;
  int glyph_height = 0;
  int gap_px = 0;

  // Unique symbols, shared height, all ten digits; throws ConfigError.
  void validate() const;
  [[nodiscard]] const Glyph* find(char symbol) const;
};

struct PhaseIcon {
  Phase phase = Phase::Unknown;
  GrayImage bitmap;
};

struct PhaseAtlas {
  std::vector<PhaseIcon> entries;
  void validate() const;
};

GlyphAtlas load_glyph_atlas(const std::filesystem::path& dir);
PhaseAtlas load_phase_atlas(const std::filesystem::path& dir);
void save_glyph_atlas(const std::filesystem::path& dir, const GlyphAtlas& atlas);
void save_phase_atlas(const std::filesystem::path& dir, const PhaseAtlas& atlas);

struct IconClass {
  Phase phase = Phase::Unknown;
  double score = 0.0;
};

// Best atlas icon within +-2 px of centred alignment (overlap-restricted NCC).
IconClass classify_icon(const GrayImage& crop, const PhaseAtlas& atlas, double min_score = 0.55);

struct CounterRead {
  int value = 0;
  double score = 0.0;  // minimum accepted per-glyph score
};

// Greedy left-to-right fixed-font reader; nullopt when nothing is readable.
std::optional<CounterRead> read_counter(const GrayImage& crop, const GlyphAtlas& atlas,
                                        double min_score = 0.6);

// Renders the decimal digits of `value` with the atlas glyphs, separated by the
// atlas gap filled with `background`. Height equals glyph_height.
GrayImage render_counter(int value, const GlyphAtlas& atlas, std::uint8_t background);

}  // namespace hudtrace
