#include <cmath>
#include <fstream>
#include <string>

#include "doctest.h"
#include "lutforge/error.hpp"
#include "lutforge/lut3d.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace lutforge;

namespace {

Lut3d random_lut(int n, oracle::Rng& rng, double lo = -0.5, double hi = 1.5) {
  Lut3d lut(n);
  for (double& v : lut.values()) v = rng.uniform(lo, hi);
  return lut;
}

double norm3(const Rgb& a, const Rgb& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

}  // namespace

TEST_CASE("make_identity places vertices at their own coordinates") {
  const Lut3d lut = make_identity(2);
  for (int b = 0; b < 2; ++b)
    for (int g = 0; g < 2; ++g)
      for (int r = 0; r < 2; ++r) {
        const Rgb v = lut.vertex(r, g, b);
        CHECK(v[0] == double(r));
        CHECK(v[1] == double(g));
        CHECK(v[2] == double(b));
      }

  CHECK(make_identity(17).delta() == 0.0625);

  const Rgb out = apply(make_identity(17), {0.3, 0.6, 0.9});
  CHECK(std::abs(out[0] - 0.3) <= 1e-6);
  CHECK(std::abs(out[1] - 0.6) <= 1e-6);
  CHECK(std::abs(out[2] - 0.9) <= 1e-6);

  CHECK_THROWS_AS(make_identity(1), InvalidArgument);
  CHECK_THROWS_AS(make_identity(0), InvalidArgument);
}

TEST_CASE("apply interpolates trilinearly") {
  SUBCASE("identity at mid grey") {
    const Rgb out = apply(make_identity(9), {0.5, 0.5, 0.5});
    CHECK(out == Rgb{0.5, 0.5, 0.5});
  }

  SUBCASE("white corner only") {
    Lut3d lut(2);
    lut.set_vertex(1, 1, 1, {1.0, 1.0, 1.0});
    const Rgb expected = oracle::trilinear(lut, {0.5, 0.5, 0.5});
    CHECK(expected[0] == doctest::Approx(0.125).epsilon(1e-15));
    const Rgb out = apply(lut, {0.5, 0.5, 0.5});
    for (int c = 0; c < 3; ++c) CHECK(out[c] == doctest::Approx(0.125).epsilon(1e-15));
  }

  SUBCASE("exact at every lattice point") {
    oracle::Rng rng(7);
    for (int n : {2, 5, 10, 17}) {
      const Lut3d lut = random_lut(n, rng);
      for (int b = 0; b < n; ++b)
        for (int g = 0; g < n; ++g)
          for (int r = 0; r < n; ++r) {
            const Rgb in{double(r) / (n - 1), double(g) / (n - 1), double(b) / (n - 1)};
            const Rgb out = apply(lut, in);
            const Rgb v = lut.vertex(r, g, b);
            for (int c = 0; c < 3; ++c) REQUIRE(std::abs(out[c] - v[c]) <= 1e-7);
          }
    }
  }

  SUBCASE("matches nested-lerp oracle and stays inside the cell hull") {
    oracle::Rng rng(11);
    const Lut3d lut = random_lut(6, rng);
    for (int trial = 0; trial < 2000; ++trial) {
      const Rgb in = rng.color();
      const Rgb out = apply(lut, in);
      const Rgb ref = oracle::trilinear(lut, in);
      const TrilinearCell cell = locate(lut, in);
      for (int c = 0; c < 3; ++c) {
        REQUIRE(std::abs(out[c] - ref[c]) <= 1e-12);
        double lo = 1e300, hi = -1e300;
        for (std::size_t v : cell.vertex) {
          lo = std::min(lo, lut.vertex(v)[c]);
          hi = std::max(hi, lut.vertex(v)[c]);
        }
        REQUIRE(out[c] >= lo - 1e-12);
        REQUIRE(out[c] <= hi + 1e-12);
      }
    }
  }

  SUBCASE("clamps out-of-range input and rejects non-finite input") {
    const Lut3d lut = make_identity(5);
    CHECK(apply(lut, {-0.5, 1.5, 1.0}) == Rgb{0.0, 1.0, 1.0});
    CHECK_THROWS_AS(apply(lut, {std::nan(""), 0.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(apply(lut, {0.0, INFINITY, 0.0}), InvalidArgument);
  }

  SUBCASE("input of exactly one uses the last cell") {
    const TrilinearCell cell = locate(make_identity(4), {1.0, 1.0, 1.0});
    CHECK(cell.weight[7] == 1.0);
    CHECK(cell.vertex[7] == make_identity(4).linear_index(3, 3, 3));
  }
}

TEST_CASE("apply_image") {
  oracle::Rng rng(3);
  ImageBuffer img(8, 9);
  for (double& v : img.values()) v = rng.uniform();

  SUBCASE("identity reproduces the image") {
    const ImageBuffer out = apply_image(make_identity(17), img);
    const auto a = out.values();
    const auto b = img.values();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }

  SUBCASE("all-zero LUT gives black") {
    const ImageBuffer out = apply_image(Lut3d(5), img);
    for (double v : out.values()) CHECK(v == 0.0);
  }

  SUBCASE("baked x^2 curve stays within its lattice interpolation error") {
    const int n = 33;
    Lut3d lut(n);
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int r = 0; r < n; ++r) {
          const double x = double(r) / (n - 1), y = double(g) / (n - 1), z = double(b) / (n - 1);
          lut.set_vertex(r, g, b, {x * x, y * y, z * z});
        }
    // Worst-case linear-interpolation error of x^2 on one cell: delta^2 / 4.
    const double delta = 1.0 / (n - 1);
    const double bound = delta * delta / 4.0;
    const ImageBuffer out = apply_image(lut, ImageBuffer(4, 4, ColorSpace::Srgb, 0.5));
    for (double v : out.values()) CHECK(std::abs(v - 0.25) <= bound + 1e-15);
    for (int trial = 0; trial < 500; ++trial) {
      const Rgb in = rng.color();
      const Rgb o = apply(lut, in);
      for (int c = 0; c < 3; ++c) REQUIRE(std::abs(o[c] - in[c] * in[c]) <= bound + 1e-15);
    }
  }

  SUBCASE("output is clamped and tag is checked") {
    Lut3d lut(2, {2.0, -1.0, 0.5});
    const ImageBuffer out = apply_image(lut, img);
    CHECK(out.pixel(0) == Rgb{1.0, 0.0, 0.5});
    ImageBuffer z = img;
    z.set_color_space(ColorSpace::PolarizedHsl);
    CHECK_THROWS_AS(apply_image(lut, z), TagMismatch);
  }
}

TEST_CASE("lipschitz_bound") {
  for (int n : {2, 3, 9, 17, 33}) CHECK(std::abs(lipschitz_bound(make_identity(n)) - 1.0) <= 1e-12);
  CHECK(lipschitz_bound(Lut3d(7, {0.3, 0.2, 0.9})) == 0.0);

  Lut3d crafted(2);
  crafted.set_vertex(1, 0, 0, {1.0, 1.0, 1.0});
  CHECK(lipschitz_bound(crafted) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  SUBCASE("axis-aligned difference quotients never exceed the bound") {
    oracle::Rng rng(21);
    for (int l = 0; l < 5; ++l) {
      const Lut3d lut = random_lut(rng.integer(2, 9), rng);
      const double bound = lipschitz_bound(lut);
      for (int trial = 0; trial < 1000; ++trial) {
        Rgb a = rng.color();
        Rgb b = a;
        const int axis = rng.integer(0, 2);
        b[axis] = rng.uniform();
        if (a[axis] == b[axis]) continue;
        const double q = norm3(apply(lut, a), apply(lut, b)) / std::abs(a[axis] - b[axis]);
        REQUIRE(q <= bound + 1e-9);
      }
    }
  }
}

TEST_CASE("vertex_gradients") {
  const Lut3d lut = make_identity(5);

  SUBCASE("lattice point carries the full upstream") {
    const auto grads = vertex_gradients(lut, {0.25, 0.5, 0.75}, {1.0, -2.0, 3.0});
    const std::size_t target = lut.linear_index(1, 2, 3);
    for (const auto& g : grads) {
      if (g.vertex == target) {
        CHECK(g.grad == Rgb{1.0, -2.0, 3.0});
      } else {
        CHECK(g.grad == Rgb{0.0, 0.0, 0.0});
      }
    }
  }

  SUBCASE("cell centre splits evenly") {
    const auto grads = vertex_gradients(lut, {0.125, 0.125, 0.125}, {1.0, 2.0, 4.0});
    for (const auto& g : grads) CHECK(g.grad == Rgb{0.125, 0.25, 0.5});
  }

  SUBCASE("matches central finite differences") {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      Lut3d work = random_lut(4, rng);
      const Rgb in = rng.color();
      const Rgb up{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      for (const auto& g : vertex_gradients(work, in, up)) {
        for (int c = 0; c < 3; ++c) {
          const double base = work.values()[3 * g.vertex + c];
          const double fd = oracle::central_difference(
              [&](double v) {
                work.values()[3 * g.vertex + c] = v;
                const Rgb o = apply(work, in);
                return up[0] * o[0] + up[1] * o[1] + up[2] * o[2];
              },
              base, 1e-4);
          work.values()[3 * g.vertex + c] = base;
          if (std::abs(g.grad[c]) < 1e-9 && std::abs(fd) < 1e-9) continue;
          REQUIRE(oracle::relative_error(g.grad[c], fd) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE(".cube and binary lattice I/O") {
  TempDir dir;

  SUBCASE("identity N=2 writes 8 data lines and reads back") {
    write_cube(make_identity(2), dir / "id.cube");
    std::ifstream in(dir / "id.cube");
    std::string line;
    int data_lines = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && (std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-')) ++data_lines;
    }
    CHECK(data_lines == 8);
    const Lut3d back = read_cube(dir / "id.cube");
    CHECK(back.size() == 2);
    const Lut3d id = make_identity(2);
    for (std::size_t i = 0; i < back.values().size(); ++i) CHECK(back.values()[i] == id.values()[i]);
  }

  SUBCASE("round trip preserves vertices within 1e-6") {
    oracle::Rng rng(9);
    const Lut3d lut = random_lut(7, rng, -2.0, 3.0);
    write_cube(lut, dir / "r.cube", "random");
    const Lut3d back = read_cube(dir / "r.cube");
    for (std::size_t i = 0; i < lut.values().size(); ++i) REQUIRE(std::abs(back.values()[i] - lut.values()[i]) <= 1e-6);
  }

  SUBCASE("red index varies fastest") {
    const Lut3d lut = parse_cube("LUT_3D_SIZE 2\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n");
    const Lut3d id = make_identity(2);
    for (std::size_t i = 0; i < lut.values().size(); ++i) CHECK(lut.values()[i] == id.values()[i]);
  }

  SUBCASE("header comments, TITLE and unit DOMAIN lines are accepted") {
    const Lut3d lut = parse_cube(
        "# comment\nTITLE \"x\"\nDOMAIN_MIN 0 0 0\nDOMAIN_MAX 1 1 1\nLUT_3D_SIZE 2\n"
        "0 0 0\n1 0 0\n0 1 0\n1 1 0\n\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n");
    CHECK(lut.size() == 2);
  }

  SUBCASE("parse errors carry line numbers") {
    try {
      parse_cube("TITLE \"bad\"\nLUT_3D_SIZE 0\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.location() == 2);
      CHECK(std::string(e.what()).find("LUT_3D_SIZE") != std::string::npos);
    }

    std::string truncated = "LUT_3D_SIZE 2\n";
    for (int i = 0; i < 7; ++i) truncated += "0 0 0\n";
    try {
      parse_cube(truncated);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
      CHECK(e.location() == 9);
    }

    try {
      parse_cube("LUT_3D_SIZE 2\n0 0 0\n1 x 0\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.location() == 3);
    }

    CHECK_THROWS_AS(parse_cube("LUT_1D_SIZE 4\n"), ParseError);
    CHECK_THROWS_AS(parse_cube("0 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_cube("LUT_3D_SIZE 2\n" + std::string(9 * 6, ' ')), ParseError);
    std::string extra = "LUT_3D_SIZE 2\n";
    for (int i = 0; i < 9; ++i) extra += "0 0 0\n";
    CHECK_THROWS_AS(parse_cube(extra), ParseError);
    CHECK_THROWS_AS(read_cube(dir / "missing.cube"), IoError);
  }

  SUBCASE("binary dump round trip and header checks") {
    oracle::Rng rng(4);
    const Lut3d lut = random_lut(5, rng);
    write_lut_binary(lut, dir / "l.lut3");
    CHECK(std::filesystem::file_size(dir / "l.lut3") == 8 + 125 * 3 * 4);
    const Lut3d back = read_lut_binary(dir / "l.lut3");
    for (std::size_t i = 0; i < lut.values().size(); ++i) {
      REQUIRE(back.values()[i] == double(float(lut.values()[i])));
    }

    std::ofstream(dir / "bad.lut3", std::ios::binary) << "LUTX\x02";
    CHECK_THROWS_AS(read_lut_binary(dir / "bad.lut3"), ParseError);
  }
}
