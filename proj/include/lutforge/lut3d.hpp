#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lutforge/image.hpp"

namespace lutforge {

inline constexpr int kMinLutSize = 2;
inline constexpr int kMaxLutSize = 256;

/// Cubic lattice of RGB output vertices on a uniform grid over [0,1]^3.
/// Vertex (r, g, b) is stored at linear index (b * N + g) * N + r, i.e. red
/// varies fastest, which is also the `.cube` data order.
class Lut3d {
public:
  /// Constant lattice of the given size; every vertex equals `fill`.
  explicit Lut3d(int size, const Rgb& fill = {0.0, 0.0, 0.0});

  int size() const noexcept { return size_; }
  double delta() const noexcept { return 1.0 / double(size_ - 1); }
  std::size_t vertex_count() const noexcept { return std::size_t(size_) * size_ * size_; }

  std::size_t linear_index(int r, int g, int b) const noexcept {
    return (std::size_t(b) * size_ + std::size_t(g)) * size_ + std::size_t(r);
  }

  Rgb vertex(std::size_t index) const {
    return {values_[3 * index], values_[3 * index + 1], values_[3 * index + 2]};
  }
  Rgb vertex(int r, int g, int b) const { return vertex(linear_index(r, g, b)); }
  void set_vertex(std::size_t index, const Rgb& v);
  void set_vertex(int r, int g, int b, const Rgb& v) { set_vertex(linear_index(r, g, b), v); }

  /// Flat view of all vertex channels (3 per vertex). Writers must keep them finite.
  std::span<double> values() & noexcept { return values_; }
  std::span<const double> values() const& noexcept { return values_; }
  std::span<const double> values() const&& = delete;

  bool all_finite() const noexcept;

private:
  int size_;
  std::vector<double> values_;
};

/// The eight lattice corners enclosing a color and their trilinear weights.
struct TrilinearCell {
  std::array<std::size_t, 8> vertex{};
  std::array<double, 8> weight{};
};

/// Clamp `rgb` to the unit cube and find its enclosing cell. A coordinate of
/// exactly 1 lands in the last cell with local coordinate 1.
TrilinearCell locate(const Lut3d& lut, const Rgb& rgb);

Lut3d make_identity(int size);

/// Trilinear lookup. Throws InvalidArgument for non-finite input.
Rgb apply(const Lut3d& lut, const Rgb& rgb);

/// Per-pixel `apply` on an sRGB image; the result is clamped to [0,1].
ImageBuffer apply_image(const Lut3d& lut, const ImageBuffer& image);

/// L_LUT <= (1/delta) * max ||v_a - v_b||_2 over lattice neighbours one step
/// apart along a single axis.
double lipschitz_bound(const Lut3d& lut);

struct VertexGradient {
  std::size_t vertex = 0;
  Rgb grad{};
};

/// Gradient of <upstream, apply(lut, rgb)> with respect to each of the eight
/// enclosing vertices: upstream scaled by that vertex's trilinear weight.
std::array<VertexGradient, 8> vertex_gradients(const Lut3d& lut, const Rgb& rgb, const Rgb& upstream);

/// `.cube` text I/O (3D tables only).
Lut3d read_cube(const std::filesystem::path& path);
Lut3d parse_cube(const std::string& text);
void write_cube(const Lut3d& lut, const std::filesystem::path& path, const std::string& title = "");
std::string format_cube(const Lut3d& lut, const std::string& title = "");

/// Binary lattice dump: "LUT3", u32 N, then N^3 x 3 float32, little-endian, red fastest.
Lut3d read_lut_binary(const std::filesystem::path& path);
void write_lut_binary(const Lut3d& lut, const std::filesystem::path& path);

}  // namespace lutforge
