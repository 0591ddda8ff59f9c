#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <random>

#include "lscl/preprocess.hpp"
#include "test_util.hpp"

using namespace lscl;
using Catch::Matchers::WithinAbs;
using testutil::error_code_of;
using testutil::temp_path;

namespace {

RgbImage solid_rgb(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img{w, h, {}};
  img.pixels.assign(static_cast<std::size_t>(w) * h, {r, g, b});
  return img;
}

GrayImage vertical_step(int w, int h, int first_bright_col, double bright) {
  GrayImage img{w, h, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0)};
  for (int y = 0; y < h; ++y)
    for (int x = first_bright_col; x < w; ++x) img.at(y, x) = bright;
  return img;
}

}  // namespace

TEST_CASE("grayscale conversion uses the fixed channel weights") {
  CHECK(to_grayscale(solid_rgb(1, 1, 0, 0, 0)).pixels[0] == 0.0);
  CHECK_THAT(to_grayscale(solid_rgb(1, 1, 100, 100, 100)).pixels[0], WithinAbs(99.99, 1e-12));
  CHECK_THAT(to_grayscale(solid_rgb(1, 1, 255, 0, 0)).pixels[0], WithinAbs(76.2195, 1e-12));
  CHECK_THAT(to_grayscale(solid_rgb(1, 1, 0, 255, 0)).pixels[0], WithinAbs(149.685, 1e-12));
  CHECK_THAT(to_grayscale(solid_rgb(1, 1, 0, 0, 255)).pixels[0], WithinAbs(29.07, 1e-12));
}

TEST_CASE("grayscale conversion is linear per pixel") {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> channel(0, 127);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = static_cast<std::uint8_t>(channel(rng));
    const auto g = static_cast<std::uint8_t>(channel(rng));
    const auto b = static_cast<std::uint8_t>(channel(rng));
    const double one = to_grayscale(solid_rgb(1, 1, r, g, b)).pixels[0];
    const double two = to_grayscale(solid_rgb(1, 1, static_cast<std::uint8_t>(2 * r),
                                              static_cast<std::uint8_t>(2 * g),
                                              static_cast<std::uint8_t>(2 * b)))
                           .pixels[0];
    CHECK_THAT(two, WithinAbs(2.0 * one, 1e-12));
  }
}

TEST_CASE("canny on a constant image finds nothing") {
  GrayImage img{16, 12, std::vector<double>(16 * 12, 137.0)};
  EdgeImage edges = canny_edges(img, 1.4, 0.1, 0.3);
  for (auto p : edges.pixels) CHECK(p == 0);
}

TEST_CASE("canny traces a vertical step as a one-pixel line") {
  // step between columns 9 and 10; a reference implementation marks one
  // pixel per interior row at column 9 or 10 on this image
  GrayImage img = vertical_step(20, 20, 10, 200.0);
  EdgeImage edges = canny_edges(img, 1.4, 0.1, 0.3);

  for (auto p : edges.pixels) CHECK((p == 0 || p == 1));
  for (int y = 1; y < 19; ++y) {
    int count = 0, column = -1;
    for (int x = 0; x < 20; ++x)
      if (edges.at(y, x)) {
        ++count;
        column = x;
      }
    CHECK(count == 1);
    CHECK((column == 9 || column == 10));
  }
}

TEST_CASE("canny rejects degenerate inputs") {
  GrayImage tiny{2, 5, std::vector<double>(10, 0.0)};
  CHECK(error_code_of([&] { (void)canny_edges(tiny, 1.4, 0.1, 0.3); }) == errc::invalid_argument);
  GrayImage ok{8, 8, std::vector<double>(64, 0.0)};
  CHECK(error_code_of([&] { (void)canny_edges(ok, 1.4, 0.3, 0.1); }) == errc::invalid_argument);
  CHECK(error_code_of([&] { (void)canny_edges(ok, 0.0, 0.1, 0.3); }) == errc::invalid_argument);
}

TEST_CASE("crop_resize_32 is the identity on a full-span 32x32 edge image") {
  EdgeImage edges{32, 32, std::vector<std::uint8_t>(32 * 32, 0)};
  // nonzero pixels spanning the full frame plus some interior texture
  edges.at(0, 0) = 1;
  edges.at(31, 31) = 1;
  edges.at(0, 31) = 1;
  edges.at(31, 0) = 1;
  edges.at(7, 12) = 1;
  edges.at(20, 3) = 1;
  GrayImage out = crop_resize_32(edges);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) CHECK(out.at(y, x) == static_cast<double>(edges.at(y, x)));
}

TEST_CASE("crop_resize_32 extracts an exact 32x32 corner block") {
  EdgeImage edges{64, 64, std::vector<std::uint8_t>(64 * 64, 0)};
  // a block occupying rows 32..63, cols 32..63, with corners set so the
  // bounding box is exactly that block
  edges.at(32, 32) = 1;
  edges.at(63, 63) = 1;
  edges.at(40, 50) = 1;
  edges.at(55, 37) = 1;
  GrayImage out = crop_resize_32(edges);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      CHECK(out.at(y, x) == static_cast<double>(edges.at(32 + y, 32 + x)));
}

TEST_CASE("crop_resize_32 falls back to the full frame for an empty image") {
  EdgeImage edges{100, 50, std::vector<std::uint8_t>(100 * 50, 0)};
  GrayImage out = crop_resize_32(edges);
  CHECK(out.width == 32);
  CHECK(out.height == 32);
  for (double p : out.pixels) CHECK(p == 0.0);
}

TEST_CASE("vectorize uses row-major order") {
  GrayImage img{32, 32, std::vector<double>(1024, 0.0)};
  img.at(0, 0) = 1.0;
  FeatureVector v = vectorize(img);
  CHECK(v[0] == 1.0);
  CHECK(v.tail(1023).cwiseAbs().sum() == 0.0);

  GrayImage img2{32, 32, std::vector<double>(1024, 0.0)};
  img2.at(1, 0) = 1.0;  // row 1, column 0
  FeatureVector v2 = vectorize(img2);
  CHECK(v2[32] == 1.0);

  GrayImage ones{32, 32, std::vector<double>(1024, 1.0)};
  CHECK(vectorize(ones).sum() == 1024.0);
}

TEST_CASE("vectorize rejects the wrong size") {
  GrayImage img{16, 32, std::vector<double>(512, 0.0)};
  CHECK(error_code_of([&] { (void)vectorize(img); }) == errc::dimension_mismatch);
}

TEST_CASE("unit_normalize scales to the unit sphere") {
  FeatureVector v(2);
  v << 3.0, 4.0;
  FeatureVector u = unit_normalize(v);
  CHECK_THAT(u[0], WithinAbs(0.6, 1e-15));
  CHECK_THAT(u[1], WithinAbs(0.8, 1e-15));
  CHECK_THAT(u.norm(), WithinAbs(1.0, 1e-12));

  FeatureVector w = unit_normalize(u);  // idempotent on the sphere
  CHECK_THAT((w - u).norm(), WithinAbs(0.0, 1e-12));

  FeatureVector zero = FeatureVector::Zero(2);
  CHECK(error_code_of([&] { (void)unit_normalize(zero); }) == errc::zero_norm);
}

TEST_CASE("unit vectors relate euclidean distance and cosine similarity") {
  std::mt19937 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    FeatureVector u(8), v(8);
    for (int i = 0; i < 8; ++i) {
      u[i] = normal(rng);
      v[i] = normal(rng);
    }
    u = unit_normalize(u);
    v = unit_normalize(v);
    const double cosine = u.dot(v);
    CHECK_THAT((u - v).squaredNorm(), WithinAbs(2.0 * (1.0 - cosine), 1e-12));
  }
}

TEST_CASE("feature pipeline is deterministic") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> intensity(0.0, 255.0);
  GrayImage img{48, 40, std::vector<double>(48 * 40)};
  for (double& p : img.pixels) p = intensity(rng);

  FeatureVector a = image_to_feature(img);
  FeatureVector b = image_to_feature(img);
  REQUIRE(a.size() == 1024);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * 1024) == 0);
  CHECK_THAT(a.norm(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("pgm and ppm files round-trip") {
  GrayImage gray{5, 3, {}};
  for (int i = 0; i < 15; ++i) gray.pixels.push_back(static_cast<double>(i * 17 % 256));
  auto gray_path = temp_path("img.pgm");
  write_pgm(gray, gray_path);
  GrayImage gray_back = read_pgm(gray_path);
  CHECK(gray_back.width == 5);
  CHECK(gray_back.height == 3);
  CHECK(gray_back.pixels == gray.pixels);

  RgbImage rgb{4, 2, {}};
  for (int i = 0; i < 8; ++i)
    rgb.pixels.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(2 * i),
                          static_cast<std::uint8_t>(255 - i)});
  auto rgb_path = temp_path("img.ppm");
  write_ppm(rgb, rgb_path);
  RgbImage rgb_back = read_ppm(rgb_path);
  CHECK(rgb_back.pixels == rgb.pixels);

  // read_image_gray dispatches on the magic and converts color
  GrayImage from_color = read_image_gray(rgb_path);
  CHECK(from_color.width == 4);
  CHECK_THAT(from_color.pixels[1],
             WithinAbs(0.2989 * 1 + 0.5870 * 2 + 0.1140 * 254, 1e-12));
}

TEST_CASE("read_image_gray rejects unknown formats") {
  auto path = testutil::write_file("notanimage.pgm", "hello world");
  CHECK(error_code_of([&] { (void)read_image_gray(path); }) == errc::io_failure);
}
