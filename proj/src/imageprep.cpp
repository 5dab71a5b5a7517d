#include "mixens/imageprep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "mixens/errors.hpp"
#include "mixens/rng.hpp"

namespace mixens {
namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

std::uint8_t pad_value(const Rgb& pad, std::size_t channels, std::size_t ch) {
  return channels == 1 ? pad[0] : pad[ch];
}

}  // namespace

RasterImage::RasterImage(std::size_t width, std::size_t height, std::size_t channels,
                         std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) throw ConfigError("image dimensions must be positive");
  if (channels_ != 1 && channels_ != 3) throw ConfigError("image must have 1 or 3 channels");
  if (pixels_.size() != width_ * height_ * channels_) {
    throw ShapeError("pixel buffer length does not match width x height x channels");
  }
}

RasterImage RasterImage::filled(std::size_t width, std::size_t height, std::size_t channels,
                                const Rgb& fill) {
  std::vector<std::uint8_t> px(width * height * channels);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = pad_value(fill, channels, i % channels);
  return {width, height, channels, std::move(px)};
}

LetterboxLayout letterbox_layout(std::size_t width, std::size_t height, std::size_t target) {
  if (target == 0) throw ConfigError("target size must be >= 1");
  const auto scaled = [target](std::size_t side, std::size_t longer) {
    const double v = static_cast<double>(side) * static_cast<double>(target) /
                     static_cast<double>(longer);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(v)));
  };
  LetterboxLayout layout;
  if (width >= height) {
    layout.content_width = target;
    layout.content_height = scaled(height, width);
  } else {
    layout.content_height = target;
    layout.content_width = scaled(width, height);
  }
  layout.offset_x = (target - layout.content_width) / 2;
  layout.offset_y = (target - layout.content_height) / 2;
  return layout;
}

RasterImage resize_pad(const RasterImage& img, std::size_t target, const Rgb& pad) {
  const auto layout = letterbox_layout(img.width(), img.height(), target);
  const std::size_t ch = img.channels();
  auto out = RasterImage::filled(target, target, ch, pad);

  const double sx_scale = static_cast<double>(img.width()) / static_cast<double>(layout.content_width);
  const double sy_scale =
      static_cast<double>(img.height()) / static_cast<double>(layout.content_height);
  const double max_x = static_cast<double>(img.width() - 1);
  const double max_y = static_cast<double>(img.height() - 1);

  for (std::size_t y = 0; y < layout.content_height; ++y) {
    const double sy = std::clamp((static_cast<double>(y) + 0.5) * sy_scale - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(sy);
    const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < layout.content_width; ++x) {
      const double sx = std::clamp((static_cast<double>(x) + 0.5) * sx_scale - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(sx);
      const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
      const double fx = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < ch; ++c) {
        const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
        const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
        out.at(x + layout.offset_x, y + layout.offset_y, c) = to_byte(top * (1.0 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

RasterImage flip_h(const RasterImage& img) {
  auto out = img;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      for (std::size_t c = 0; c < img.channels(); ++c) {
        out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
      }
    }
  }
  return out;
}

RasterImage rotate(const RasterImage& img, double degrees, const Rgb& pad) {
  if (!(degrees >= -45.0 && degrees <= 45.0)) {
    throw ConfigError("rotation must lie in [-45, 45] degrees");
  }
  if (degrees == 0.0) return img;

  const double theta = degrees * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double cx = (static_cast<double>(img.width()) - 1.0) / 2.0;
  const double cy = (static_cast<double>(img.height()) - 1.0) / 2.0;
  const auto w = static_cast<long>(img.width());
  const auto h = static_cast<long>(img.height());
  const std::size_t ch = img.channels();

  const auto tap = [&](long x, long y, std::size_t c) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return pad_value(pad, ch, c);
    return img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), c);
  };

  auto out = img;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double dx = static_cast<double>(x) - cx;
      const double dy = static_cast<double>(y) - cy;
      // Inverse mapping: output pixel -> source position.
      const double sx = cx + dx * cos_t - dy * sin_t;
      const double sy = cy + dx * sin_t + dy * cos_t;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const double fx = sx - fx0;
      const double fy = sy - fy0;
      const auto x0 = static_cast<long>(fx0);
      const auto y0 = static_cast<long>(fy0);
      for (std::size_t c = 0; c < ch; ++c) {
        const double top = tap(x0, y0, c) * (1.0 - fx) + tap(x0 + 1, y0, c) * fx;
        const double bottom = tap(x0, y0 + 1, c) * (1.0 - fx) + tap(x0 + 1, y0 + 1, c) * fx;
        out.at(x, y, c) = to_byte(top * (1.0 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

RasterImage adjust_contrast(const RasterImage& img, double factor) {
  if (!(factor >= 0.7 && factor <= 1.3)) {
    throw ConfigError("contrast factor must lie in [0.7, 1.3]");
  }
  const std::size_t ch = img.channels();
  const std::size_t count = img.width() * img.height();
  std::vector<double> mean(ch, 0.0);
  for (std::size_t i = 0; i < img.pixels().size(); ++i) mean[i % ch] += img.pixels()[i];
  for (auto& m : mean) m /= static_cast<double>(count);

  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double m = mean[i % ch];
    px[i] = to_byte(m + factor * (static_cast<double>(px[i]) - m));
  }
  return {img.width(), img.height(), ch, std::move(px)};
}

RasterImage gaussian_blur(const RasterImage& img, double sigma) {
  if (!(sigma >= 0.0)) throw ConfigError("blur sigma must be >= 0");
  if (sigma == 0.0) return img;

  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (long j = -radius; j <= radius; ++j) {
    const double v = std::exp(-static_cast<double>(j * j) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(j + radius)] = v;
    total += v;
  }
  for (auto& v : kernel) v /= total;

  const auto w = static_cast<long>(img.width());
  const auto h = static_cast<long>(img.height());
  const std::size_t ch = img.channels();
  std::vector<double> horizontal(img.pixels().size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (long j = -radius; j <= radius; ++j) {
          const long sx = std::clamp(x + j, 0L, w - 1);
          acc += kernel[static_cast<std::size_t>(j + radius)] *
                 img.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(y), c);
        }
        horizontal[(static_cast<std::size_t>(y * w + x)) * ch + c] = acc;
      }
    }
  }
  std::vector<std::uint8_t> px(img.pixels().size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (long j = -radius; j <= radius; ++j) {
          const long sy = std::clamp(y + j, 0L, h - 1);
          acc += kernel[static_cast<std::size_t>(j + radius)] *
                 horizontal[(static_cast<std::size_t>(sy * w + x)) * ch + c];
        }
        px[(static_cast<std::size_t>(y * w + x)) * ch + c] = to_byte(acc);
      }
    }
  }
  return {img.width(), img.height(), ch, std::move(px)};
}

void AugmentConfig::validate() const {
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw ConfigError("flip_prob outside [0, 1]");
  if (!(rotation_min >= -45.0 && rotation_min <= rotation_max && rotation_max <= 45.0)) {
    throw ConfigError("rotation range must satisfy -45 <= min <= max <= 45");
  }
  if (!(contrast_min >= 0.7 && contrast_min <= contrast_max && contrast_max <= 1.3)) {
    throw ConfigError("contrast range must satisfy 0.7 <= min <= max <= 1.3");
  }
  if (!(blur_sigma_max >= 0.0)) throw ConfigError("blur_sigma_max must be >= 0");
}

AugmentConfig AugmentConfig::identity() {
  AugmentConfig c;
  c.flip_prob = 0.0;
  c.rotation_min = c.rotation_max = 0.0;
  c.contrast_min = c.contrast_max = 1.0;
  c.blur_sigma_max = 0.0;
  return c;
}

RasterImage augment(const RasterImage& img, const AugmentConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const bool flip = rng.uniform01() < config.flip_prob;
  const double angle = rng.uniform(config.rotation_min, config.rotation_max);
  const double contrast = rng.uniform(config.contrast_min, config.contrast_max);
  const double sigma = rng.uniform(0.0, config.blur_sigma_max);

  RasterImage out = flip ? flip_h(img) : img;
  out = rotate(out, angle, config.pad);
  out = adjust_contrast(out, contrast);
  return gaussian_blur(out, sigma);
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> encode_pnm(const RasterImage& img) {
  const std::string header = std::string(img.channels() == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(img.width()) + " " + std::to_string(img.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.pixels().begin(), img.pixels().end());
  return bytes;
}

RasterImage decode_pnm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  const auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  const auto read_number = [&]() -> std::size_t {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      ++pos;
      ++digits;
      if (digits > 9) throw FormatError("PNM header number too large");
    }
    if (digits == 0) throw FormatError("PNM header: expected a number");
    return value;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw FormatError("not a binary PPM/PGM file (expected P5 or P6)");
  }
  const std::size_t channels = bytes[1] == '6' ? 3 : 1;
  pos = 2;
  const std::size_t width = read_number();
  const std::size_t height = read_number();
  const std::size_t maxval = read_number();
  if (maxval != 255) throw FormatError("only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw FormatError("PNM header must end with a single whitespace byte");
  }
  ++pos;
  const std::size_t expected = width * height * channels;
  if (bytes.size() - pos != expected) {
    throw FormatError("PNM pixel data has " + std::to_string(bytes.size() - pos) +
                      " bytes, expected " + std::to_string(expected));
  }
  return {width, height, channels,
          std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end())};
}

RasterImage read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_pnm(bytes);
}

void write_pnm(const std::filesystem::path& path, const RasterImage& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write image '" + path.string() + "'");
  const auto bytes = encode_pnm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace mixens
