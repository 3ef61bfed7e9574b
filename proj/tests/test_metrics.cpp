#include <cmath>
#include <limits>

#include "doctest.h"
#include "lutforge/error.hpp"
#include "lutforge/metrics.hpp"
#include "support/oracles.hpp"

using namespace lutforge;

namespace {

ImageBuffer random_image(int h, int w, oracle::Rng& rng) {
  ImageBuffer img(h, w);
  for (double& v : img.values()) v = rng.uniform();
  return img;
}

}  // namespace

TEST_CASE("psnr") {
  oracle::Rng rng(1);
  const ImageBuffer a = random_image(12, 13, rng);
  CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());

  // Every value off by 0.1: MSE = 0.01.
  const ImageBuffer zero(4, 4, ColorSpace::Srgb, 0.2);
  const ImageBuffer tenth(4, 4, ColorSpace::Srgb, 0.3);
  CHECK(psnr(zero, tenth) == doctest::Approx(20.0).epsilon(1e-12));

  const ImageBuffer b = random_image(12, 13, rng);
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sse += (a.values()[i] - b.values()[i]) * (a.values()[i] - b.values()[i]);
  const double expected = -10.0 * std::log10(sse / double(a.size()));
  CHECK(std::abs(psnr(a, b) - expected) <= 1e-9);
  CHECK(psnr(a, b) == psnr(b, a));

  double previous = std::numeric_limits<double>::infinity();
  for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
    oracle::Rng noise(99);
    ImageBuffer n = a;
    for (double& v : n.values()) v += amp * noise.uniform(-1.0, 1.0);
    const double p = psnr(a, n);
    CHECK(p < previous);
    previous = p;
  }

  CHECK_THROWS_AS(psnr(a, ImageBuffer(12, 12)), DimensionMismatch);
}

TEST_CASE("ssim") {
  oracle::Rng rng(2);
  const ImageBuffer a = random_image(24, 20, rng);
  CHECK(ssim(a, a) == 1.0);

  SUBCASE("constant images reduce to the luminance term") {
    const double ma = 0.3, mb = 0.7;
    const double c1 = 0.01 * 0.01;
    const double expected = (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    CHECK(ssim(ImageBuffer(16, 16, ColorSpace::Srgb, ma), ImageBuffer(16, 16, ColorSpace::Srgb, mb)) ==
          doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("anti-correlated checkerboards score low") {
    ImageBuffer p(16, 16), q(16, 16);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) {
        const double v = (i + j) % 2 ? 1.0 : 0.0;
        p.set_pixel(i, j, {v, v, v});
        q.set_pixel(i, j, {1.0 - v, 1.0 - v, 1.0 - v});
      }
    CHECK(ssim(p, q) < 0.5);
    CHECK(ssim(p, q) < 0.0);
  }

  SUBCASE("symmetric") {
    const ImageBuffer b = random_image(24, 20, rng);
    CHECK(ssim(a, b) == ssim(b, a));
    CHECK(ssim(a, b) <= 1.0);
  }

  SUBCASE("window must fit") {
    CHECK_THROWS_AS(ssim(ImageBuffer(10, 40), ImageBuffer(10, 40)), InvalidArgument);
    CHECK_THROWS_AS(ssim(ImageBuffer(11, 11), ImageBuffer(11, 12)), DimensionMismatch);
    CHECK(ssim(ImageBuffer(11, 11, ColorSpace::Srgb, 0.5), ImageBuffer(11, 11, ColorSpace::Srgb, 0.5)) == 1.0);
  }
}

TEST_CASE("ssim gradient matches finite differences") {
  oracle::Rng rng(3);
  const ImageBuffer ref = random_image(14, 15, rng);
  ImageBuffer test = random_image(14, 15, rng);
  const SsimGradient g = ssim_with_gradient(ref, test);
  CHECK(g.value == ssim(ref, test));
  for (std::size_t i = 0; i < test.size(); i += 7) {
    const double base = test.values()[i];
    const double fd = oracle::central_difference(
        [&](double v) {
          test.values()[i] = v;
          return ssim(ref, test);
        },
        base, 1e-5);
    test.values()[i] = base;
    REQUIRE(oracle::relative_error(g.grad.values()[i], fd, 1e-4) <= 1e-5);
  }
}

TEST_CASE("report formatting") {
  CHECK(format_report({std::numeric_limits<double>::infinity(), 1.0}) == "PSNR=inf SSIM=1.0");
  CHECK(format_report({20.0, 0.81234}) == "PSNR=20.0 SSIM=0.8123");
  const ImageBuffer a(16, 16, ColorSpace::Srgb, 0.4);
  CHECK(format_report(evaluate(a, a)) == "PSNR=inf SSIM=1.0");
}
