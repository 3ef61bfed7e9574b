#pragma once

// Little-endian helpers shared by the LUT3 / MODF / UNCM formats.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lutforge/error.hpp"

namespace lutforge::detail {

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);

class ByteWriter {
public:
  void magic(std::string_view tag) { bytes_.insert(bytes_.end(), tag.begin(), tag.end()); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
  }

  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u32(bits);
  }

  const std::vector<unsigned char>& bytes() const noexcept { return bytes_; }

private:
  std::vector<unsigned char> bytes_;
};

class ByteReader {
public:
  ByteReader(const std::vector<unsigned char>& bytes, std::string_view format)
      : bytes_(bytes), format_(format) {}

  void expect_magic(std::string_view tag) {
    need(tag.size(), "magic");
    if (std::memcmp(bytes_.data() + pos_, tag.data(), tag.size()) != 0) {
      fail("bad magic, expected \"" + std::string(tag) + "\"");
    }
    pos_ += tag.size();
  }

  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  float f32(const char* field) {
    const std::uint32_t bits = u32(field);
    float v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  void expect_end() {
    if (pos_ != bytes_.size()) fail("trailing bytes after payload");
  }

  std::size_t offset() const noexcept { return pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(std::string(format_) + ": " + what, pos_, ParseError::Unit::Byte);
  }

private:
  void need(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) fail(std::string("truncated while reading ") + field);
  }

  const std::vector<unsigned char>& bytes_;
  std::string_view format_;
  std::size_t pos_ = 0;
};

}  // namespace lutforge::detail
