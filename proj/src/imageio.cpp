#include "lutforge/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "lutforge/error.hpp"

namespace lutforge {
namespace {

unsigned char quantize(double v) { return static_cast<unsigned char>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5)); }

[[noreturn]] void parse_fail(const std::string& what, std::size_t offset) {
  throw ParseError(what, offset, ParseError::Unit::Byte);
}

// ---------------------------------------------------------------------------
// PNG

struct PngSource {
  const std::vector<unsigned char>* bytes;
  std::size_t pos = 0;
  std::string error;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->bytes->size() - src->pos < n) {
    src->error = "truncated PNG data";
    png_error(png, "truncated");
  }
  std::memcpy(out, src->bytes->data() + src->pos, n);
  src->pos += n;
}

void png_error_cb(png_structp png, png_const_charp msg) {
  auto* src = static_cast<PngSource*>(png_get_error_ptr(png));
  if (src && src->error.empty()) src->error = msg;
  png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

struct PngSink {
  std::vector<unsigned char> bytes;
};

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
  auto* sink = static_cast<PngSink*>(png_get_io_ptr(png));
  sink->bytes.insert(sink->bytes.end(), data, data + n);
}

void png_flush_cb(png_structp) {}

void write_png_rows(const std::filesystem::path& path, int width, int height, int color_type, int channels,
                    const std::vector<unsigned char>& pixels) {
  PngSink sink;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: encoding failed for " + path.string());
  }
  png_set_write_fn(png, &sink, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_VALUE_NONE);
  png_write_info(png, info);
  const std::size_t stride = std::size_t(width) * std::size_t(channels);
  for (int row = 0; row < height; ++row) {
    png_write_row(png, const_cast<png_bytep>(pixels.data() + std::size_t(row) * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  detail::write_file_bytes(path, sink.bytes);
}

// ---------------------------------------------------------------------------
// PPM / PFM header scanning

class HeaderScanner {
public:
  HeaderScanner(const std::vector<unsigned char>& bytes, const char* format) : b_(bytes), format_(format) {}

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < b_.size() && !std::isspace(b_[pos_])) ++pos_;
    if (pos_ == start) parse_fail(std::string(format_) + ": truncated header", pos_);
    return std::string(b_.begin() + std::ptrdiff_t(start), b_.begin() + std::ptrdiff_t(pos_));
  }

  long integer(const char* field) {
    const std::size_t at = pos_;
    const std::string t = token();
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        t.size() > 9) {
      parse_fail(std::string(format_) + ": bad " + field, at);
    }
    return std::stol(t);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_start() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) parse_fail(std::string(format_) + ": truncated header", pos_);
    return pos_ + 1;
  }

  std::size_t pos() const noexcept { return pos_; }

private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& b_;
  const char* format_;
  std::size_t pos_ = 0;
};

void check_dims(long w, long h, const char* format, std::size_t offset) {
  if (w < 1 || h < 1 || w > 65536 || h > 65536) parse_fail(std::string(format) + ": invalid dimensions", offset);
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

}  // namespace

ImageBuffer load_png(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) parse_fail("png: bad signature", 0);

  PngSource src{&bytes, 0, {}};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &src, png_error_cb, png_warning_cb);
  if (!png) throw IoError("png: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  std::vector<unsigned char> pixels;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  std::string unsupported;

  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    parse_fail("png: " + (src.error.empty() ? std::string("decode error") : src.error), src.pos);
  }
  png_set_read_fn(png, &src, png_read_cb);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth == 16) {
    unsupported = "png: 16-bit images are not supported";
  } else if (width > 65536 || height > 65536) {
    unsupported = "png: image too large";
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    if (stride != std::size_t(width) * 3) {
      unsupported = "png: unexpected row layout";
    } else {
      pixels.resize(stride * height);
      std::vector<png_bytep> rows(height);
      for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + std::size_t(r) * stride;
      png_read_image(png, rows.data());
      png_read_end(png, nullptr);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!unsupported.empty()) throw IoError(unsupported + " (" + path.string() + ")");

  ImageBuffer out(int(height), int(width), ColorSpace::Srgb);
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = pixels[i] / 255.0;
  return out;
}

void save_png(const ImageBuffer& image, const std::filesystem::path& path) {
  const auto src = image.values();
  std::vector<unsigned char> pixels(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) pixels[i] = quantize(src[i]);
  write_png_rows(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 3, pixels);
}

void save_png_gray(const ImageBuffer& image, const std::filesystem::path& path) {
  const auto src = image.values();
  std::vector<unsigned char> pixels(image.pixel_count());
  for (std::size_t p = 0; p < pixels.size(); ++p) {
    pixels[p] = quantize((src[3 * p] + src[3 * p + 1] + src[3 * p + 2]) / 3.0);
  }
  write_png_rows(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 1, pixels);
}

ImageBuffer load_ppm(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  HeaderScanner scan(bytes, "ppm");
  if (scan.token() != "P6") parse_fail("ppm: expected P6 magic", 0);
  const long w = scan.integer("width");
  const long h = scan.integer("height");
  check_dims(w, h, "ppm", scan.pos());
  const std::size_t maxval_at = scan.pos();
  const long maxval = scan.integer("maxval");
  if (maxval != 255) {
    throw IoError("ppm: unsupported bit depth (maxval " + std::to_string(maxval) + " at byte offset " +
                  std::to_string(maxval_at) + "); only 8-bit files are supported");
  }
  const std::size_t start = scan.raster_start();
  const std::size_t need = std::size_t(w) * std::size_t(h) * 3;
  if (bytes.size() - start < need) parse_fail("ppm: truncated raster", bytes.size());
  ImageBuffer out(int(h), int(w), ColorSpace::Srgb);
  auto dst = out.values();
  for (std::size_t i = 0; i < need; ++i) dst[i] = bytes[start + i] / 255.0;
  return out;
}

void save_ppm(const ImageBuffer& image, const std::filesystem::path& path) {
  const std::string header = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  for (double v : image.values()) bytes.push_back(quantize(v));
  detail::write_file_bytes(path, bytes);
}

ImageBuffer load_pfm(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  HeaderScanner scan(bytes, "pfm");
  if (scan.token() != "PF") parse_fail("pfm: expected PF (color) magic", 0);
  const long w = scan.integer("width");
  const long h = scan.integer("height");
  check_dims(w, h, "pfm", scan.pos());
  const std::size_t scale_at = scan.pos();
  const std::string scale_tok = scan.token();
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    parse_fail("pfm: bad scale", scale_at);
  }
  if (!(scale < 0.0)) throw IoError("pfm: big-endian files are not supported");
  const std::size_t start = scan.raster_start();
  const std::size_t count = std::size_t(w) * std::size_t(h) * 3;
  if (bytes.size() - start < count * 4) parse_fail("pfm: truncated raster", bytes.size());

  ImageBuffer out(int(h), int(w), ColorSpace::Srgb);
  std::size_t at = start;
  for (long row = h - 1; row >= 0; --row)
    for (long col = 0; col < w; ++col)
      for (int c = 0; c < 3; ++c) {
        std::uint32_t bits = 0;
        for (int i = 0; i < 4; ++i) bits |= std::uint32_t(bytes[at + i]) << (8 * i);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        out.at(int(row), int(col), c) = v;
        at += 4;
      }
  return out;
}

void save_pfm(const ImageBuffer& image, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic("PF\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n-1.0\n");
  for (int row = image.height() - 1; row >= 0; --row)
    for (int col = 0; col < image.width(); ++col)
      for (int c = 0; c < 3; ++c) w.f32(float(image.at(row, col, c)));
  detail::write_file_bytes(path, w.bytes());
}

ImageBuffer load_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".ppm") return load_ppm(path);
  if (ext == ".pfm") return load_pfm(path);
  throw IoError("unsupported image extension \"" + ext + "\" (" + path.string() + ")");
}

void save_image(const ImageBuffer& image, const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return save_png(image, path);
  if (ext == ".ppm") return save_ppm(image, path);
  if (ext == ".pfm") return save_pfm(image, path);
  throw IoError("unsupported image extension \"" + ext + "\" (" + path.string() + ")");
}

}  // namespace lutforge
