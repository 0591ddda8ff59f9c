#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lscl/dataset.hpp"
#include "lscl/error.hpp"

namespace lscl {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::array<std::uint8_t, 3>> pixels;  // row-major
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major, intensities in [0,255]

  double at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct EdgeImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, strictly {0,1}

  std::uint8_t at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Gray = 0.2989 R + 0.5870 G + 0.1140 B, kept in double precision, unrounded.
inline GrayImage to_grayscale(const RgbImage& img) {
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    fail(errc::invalid_argument, "pixel count does not match image size");
  GrayImage gray{img.width, img.height, std::vector<double>(img.pixels.size())};
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const auto& p = img.pixels[i];
    gray.pixels[i] = 0.2989 * p[0] + 0.5870 * p[1] + 0.1140 * p[2];
  }
  return gray;
}

namespace detail {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  const int w = img.width, h = img.height;
  GrayImage tmp{w, h, std::vector<double>(img.pixels.size())};
  GrayImage out{w, h, std::vector<double>(img.pixels.size())};
  // horizontal pass, replicated borders
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(y, clampi(x + i, 0, w - 1));
      tmp.at(y, x) = acc;
    }
  // vertical pass
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(clampi(y + i, 0, h - 1), x);
      out.at(y, x) = acc;
    }
  return out;
}

}  // namespace detail

/// Canny pipeline: Gaussian smoothing (std sigma), Sobel gradients,
/// non-maximum suppression, then double-threshold hysteresis. `low` and
/// `high` are fractions of the maximum gradient magnitude.
inline EdgeImage canny_edges(const GrayImage& img, double sigma, double low, double high) {
  if (img.width < 3 || img.height < 3)
    fail(errc::invalid_argument, "image too small for edge detection (need at least 3x3)");
  if (sigma <= 0) fail(errc::invalid_argument, "sigma must be > 0");
  if (!(0 <= low && low < high)) fail(errc::invalid_argument, "need 0 <= low < high");

  const int w = img.width, h = img.height;
  GrayImage smooth = detail::gaussian_blur(img, sigma);

  std::vector<double> gx(smooth.pixels.size(), 0.0), gy(smooth.pixels.size(), 0.0);
  auto at = [&](int y, int x) {
    return smooth.at(detail::clampi(y, 0, h - 1), detail::clampi(x, 0, w - 1));
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      gx[i] = (at(y - 1, x + 1) + 2.0 * at(y, x + 1) + at(y + 1, x + 1)) -
              (at(y - 1, x - 1) + 2.0 * at(y, x - 1) + at(y + 1, x - 1));
      gy[i] = (at(y + 1, x - 1) + 2.0 * at(y + 1, x) + at(y + 1, x + 1)) -
              (at(y - 1, x - 1) + 2.0 * at(y - 1, x) + at(y - 1, x + 1));
    }

  std::vector<double> magnitude(smooth.pixels.size());
  double max_magnitude = 0.0;
  for (std::size_t i = 0; i < magnitude.size(); ++i) {
    magnitude[i] = std::hypot(gx[i], gy[i]);
    max_magnitude = std::max(max_magnitude, magnitude[i]);
  }

  EdgeImage edges{w, h, std::vector<std::uint8_t>(smooth.pixels.size(), 0)};
  if (max_magnitude == 0.0) return edges;  // flat image, no gradient anywhere

  // Non-maximum suppression along the quantized gradient direction. Plateau
  // ties are broken asymmetrically (strict against the "before" neighbor) so
  // a symmetric two-pixel ridge thins to one pixel.
  std::vector<double> thin(smooth.pixels.size(), 0.0);
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (magnitude[i] == 0.0) continue;
      double angle = std::atan2(gy[i], gx[i]) * 180.0 / 3.14159265358979323846;
      if (angle < 0) angle += 180.0;
      int dx, dy;
      if (angle < 22.5 || angle >= 157.5) {
        dx = 1; dy = 0;
      } else if (angle < 67.5) {
        dx = 1; dy = 1;
      } else if (angle < 112.5) {
        dx = 0; dy = 1;
      } else {
        dx = -1; dy = 1;
      }
      const double before = magnitude[static_cast<std::size_t>(y - dy) * w + (x - dx)];
      const double after = magnitude[static_cast<std::size_t>(y + dy) * w + (x + dx)];
      if (magnitude[i] > before && magnitude[i] >= after) thin[i] = magnitude[i];
    }

  const double threshold_low = low * max_magnitude;
  const double threshold_high = high * max_magnitude;

  // Hysteresis: seed from strong pixels, grow through weak ones (8-connected).
  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (thin[i] >= threshold_high && thin[i] > 0.0) {
        edges.pixels[i] = 1;
        stack.push_back(i);
      }
    }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int y = static_cast<int>(i) / w;
    const int x = static_cast<int>(i) % w;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int ny = y + dy, nx = x + dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (!edges.pixels[j] && thin[j] >= threshold_low && thin[j] > 0.0) {
          edges.pixels[j] = 1;
          stack.push_back(j);
        }
      }
  }
  return edges;
}

/// Crops to the tight bounding box of nonzero pixels and resamples to 32x32
/// with bilinear interpolation. An all-zero image falls back to a full-frame
/// resize. Output intensities are in [0,1].
inline GrayImage crop_resize_32(const EdgeImage& img) {
  constexpr int out_size = 32;
  int x0 = img.width, x1 = -1, y0 = img.height, y1 = -1;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (img.at(y, x)) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) {  // no edge pixels: use the whole frame
    x0 = 0;
    x1 = img.width - 1;
    y0 = 0;
    y1 = img.height - 1;
  }
  const int crop_w = x1 - x0 + 1;
  const int crop_h = y1 - y0 + 1;

  GrayImage out{out_size, out_size, std::vector<double>(out_size * out_size)};
  const double sx = crop_w > 1 ? static_cast<double>(crop_w - 1) / (out_size - 1) : 0.0;
  const double sy = crop_h > 1 ? static_cast<double>(crop_h - 1) / (out_size - 1) : 0.0;
  for (int oy = 0; oy < out_size; ++oy) {
    const double fy = oy * sy;
    const int iy = std::min(static_cast<int>(fy), crop_h - 1);
    const double wy = fy - iy;
    const int iy1 = std::min(iy + 1, crop_h - 1);
    for (int ox = 0; ox < out_size; ++ox) {
      const double fx = ox * sx;
      const int ix = std::min(static_cast<int>(fx), crop_w - 1);
      const double wx = fx - ix;
      const int ix1 = std::min(ix + 1, crop_w - 1);
      const double v00 = img.at(y0 + iy, x0 + ix);
      const double v01 = img.at(y0 + iy, x0 + ix1);
      const double v10 = img.at(y0 + iy1, x0 + ix);
      const double v11 = img.at(y0 + iy1, x0 + ix1);
      out.at(oy, ox) = (1 - wy) * ((1 - wx) * v00 + wx * v01) + wy * ((1 - wx) * v10 + wx * v11);
    }
  }
  return out;
}

/// Row-major concatenation of a 32x32 image into a 1024-vector:
/// values[row*32 + col].
inline FeatureVector vectorize(const GrayImage& img) {
  if (img.width != 32 || img.height != 32)
    fail(errc::dimension_mismatch, "vectorize expects a 32x32 image, got " +
                                       std::to_string(img.width) + "x" + std::to_string(img.height));
  FeatureVector v(1024);
  for (int i = 0; i < 1024; ++i) v[i] = img.pixels[static_cast<std::size_t>(i)];
  return v;
}

/// Scales to unit l2 norm; direction is preserved.
inline FeatureVector unit_normalize(const FeatureVector& v) {
  const double norm = v.norm();
  if (norm == 0.0) fail(errc::zero_norm, "cannot normalize a zero vector");
  return v / norm;
}

struct CannyParams {
  double sigma = 1.4;
  double low = 0.1;   // fraction of max gradient magnitude
  double high = 0.3;  // fraction of max gradient magnitude
};

/// Full feature pipeline: edges -> crop/resize to 32x32 -> row-major
/// vectorization -> unit normalization.
inline FeatureVector image_to_feature(const GrayImage& img, const CannyParams& params = {}) {
  EdgeImage edges = canny_edges(img, params.sigma, params.low, params.high);
  GrayImage small = crop_resize_32(edges);
  FeatureVector v = vectorize(small);
  return unit_normalize(v);
}

// ---------------------------------------------------------------------------
// Binary PNM input/output (P5 grayscale, P6 color; 8-bit only).

namespace detail {

inline int read_pnm_token(std::istream& in, const std::string& path) {
  // skips whitespace and '#' comments
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) fail(errc::io_failure, "malformed PNM header: " + path);
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

struct PnmHeader {
  int width, height, maxval;
};

inline PnmHeader read_pnm_header(std::istream& in, const char* magic, const std::string& path) {
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != magic[0] || m1 != magic[1])
    fail(errc::io_failure, path + ": expected " + magic + " format");
  PnmHeader hdr{};
  hdr.width = read_pnm_token(in, path);
  hdr.height = read_pnm_token(in, path);
  hdr.maxval = read_pnm_token(in, path);
  if (hdr.width < 1 || hdr.height < 1) fail(errc::io_failure, path + ": bad image size");
  if (hdr.maxval != 255) fail(errc::io_failure, path + ": only 8-bit images are supported");
  return hdr;
}

}  // namespace detail

inline GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path.string());
  auto hdr = detail::read_pnm_header(in, "P5", path.string());
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(hdr.width) * hdr.height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    fail(errc::io_failure, path.string() + ": truncated pixel data");
  GrayImage img{hdr.width, hdr.height, std::vector<double>(raw.size())};
  for (std::size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i];
  return img;
}

inline RgbImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path.string());
  auto hdr = detail::read_pnm_header(in, "P6", path.string());
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(hdr.width) * hdr.height * 3);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    fail(errc::io_failure, path.string() + ": truncated pixel data");
  RgbImage img{hdr.width, hdr.height, {}};
  img.pixels.resize(static_cast<std::size_t>(hdr.width) * hdr.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
  return img;
}

/// Reads a PGM or PPM file (color is converted to grayscale).
inline GrayImage read_image_gray(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) fail(errc::io_failure, "cannot open " + path.string());
  char m0 = 0, m1 = 0;
  probe.get(m0);
  probe.get(m1);
  if (m0 == 'P' && m1 == '5') return read_pgm(path);
  if (m0 == 'P' && m1 == '6') return to_grayscale(read_ppm(path));
  fail(errc::io_failure, path.string() + ": unsupported image format (need binary PGM or PPM)");
}

inline void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_failure, "cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  for (double p : img.pixels) {
    const double clamped = std::clamp(p, 0.0, 255.0);
    out.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(clamped))));
  }
}

inline void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_failure, "cannot write " + path.string());
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  for (const auto& p : img.pixels)
    for (std::uint8_t channel : p) out.put(static_cast<char>(channel));
}

}  // namespace lscl
