#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace mixens {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kDefaultPad{128, 128, 128};

/// Row-major 8-bit image with 1 (gray) or 3 (RGB) interleaved channels.
class RasterImage {
 public:
  RasterImage(std::size_t width, std::size_t height, std::size_t channels,
              std::vector<std::uint8_t> pixels);
  /// Image filled with `fill` (gray images take fill[0]).
  static RasterImage filled(std::size_t width, std::size_t height, std::size_t channels,
                            const Rgb& fill);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  std::uint8_t at(std::size_t x, std::size_t y, std::size_t ch) const {
    return pixels_[(y * width_ + x) * channels_ + ch];
  }
  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t ch) {
    return pixels_[(y * width_ + x) * channels_ + ch];
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t channels_;
  std::vector<std::uint8_t> pixels_;
};

/// Placement of the scaled content inside a letterboxed canvas.
struct LetterboxLayout {
  std::size_t content_width = 0;
  std::size_t content_height = 0;
  std::size_t offset_x = 0;  // left padding; right gets the extra pixel
  std::size_t offset_y = 0;  // top padding; bottom gets the extra pixel
};

LetterboxLayout letterbox_layout(std::size_t width, std::size_t height, std::size_t target);

/// Aspect-preserving bilinear resize so the longer side equals `target`,
/// centered on a target x target canvas filled with `pad`.
RasterImage resize_pad(const RasterImage& img, std::size_t target, const Rgb& pad = kDefaultPad);

RasterImage flip_h(const RasterImage& img);

/// Rotation about the image center by `degrees` in [-45, 45] (positive is
/// counter-clockwise on screen). Bilinear sampling; taps outside the source
/// read `pad`.
RasterImage rotate(const RasterImage& img, double degrees, const Rgb& pad = kDefaultPad);

/// out = clamp(round(mean + factor * (in - mean))) per channel, factor in [0.7, 1.3].
RasterImage adjust_contrast(const RasterImage& img, double factor);

/// Separable Gaussian, radius ceil(3 sigma), normalized kernel, clamped edges.
RasterImage gaussian_blur(const RasterImage& img, double sigma);

struct AugmentConfig {
  double flip_prob = 0.5;
  double rotation_min = -45.0;
  double rotation_max = 45.0;
  double contrast_min = 0.7;
  double contrast_max = 1.3;
  double blur_sigma_max = 1.0;
  Rgb pad = kDefaultPad;
  std::uint64_t seed = 0;

  void validate() const;

  /// Configuration under which augment() returns its input unchanged.
  static AugmentConfig identity();
};

/// flip -> rotate -> contrast -> blur, each parameter drawn from `config`'s
/// ranges by a generator seeded with `seed`.
RasterImage augment(const RasterImage& img, const AugmentConfig& config, std::uint64_t seed);

// Binary PNM: P6 for RGB, P5 for gray, maxval 255.
RasterImage read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const RasterImage& img);
std::vector<std::uint8_t> encode_pnm(const RasterImage& img);
RasterImage decode_pnm(const std::vector<std::uint8_t>& bytes);

}  // namespace mixens
