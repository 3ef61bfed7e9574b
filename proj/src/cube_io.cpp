#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "binary_io.hpp"
#include "lutforge/error.hpp"
#include "lutforge/lut3d.hpp"

namespace lutforge {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

[[noreturn]] void fail(const std::string& what, std::size_t line) {
  throw ParseError(".cube: " + what, line, ParseError::Unit::Line);
}

}  // namespace

Lut3d parse_cube(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  int size = 0;
  std::vector<double> data;
  std::size_t expected = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto tokens = split_ws(line);
    const std::string_view key = tokens.front();

    if (key == "TITLE") {
      if (size != 0) fail("TITLE after LUT_3D_SIZE", line_no);
      continue;
    }
    if (key == "LUT_1D_SIZE") fail("1D LUTs are not supported", line_no);
    if (key == "LUT_3D_SIZE") {
      if (size != 0) fail("duplicate LUT_3D_SIZE", line_no);
      double n = 0.0;
      if (tokens.size() != 2 || !parse_double(tokens[1], n) || n != std::floor(n)) {
        fail("malformed LUT_3D_SIZE", line_no);
      }
      if (n < kMinLutSize || n > kMaxLutSize) {
        fail("invalid LUT_3D_SIZE " + std::string(tokens[1]) + " (must be in [2, 256])", line_no);
      }
      size = int(n);
      expected = std::size_t(size) * size * size;
      data.reserve(expected * 3);
      continue;
    }
    if (key == "DOMAIN_MIN" || key == "DOMAIN_MAX" || key == "LUT_3D_INPUT_RANGE") {
      const double want_lo = 0.0;
      const double want_hi = 1.0;
      std::vector<double> vals;
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        double v = 0.0;
        if (!parse_double(tokens[t], v)) fail("non-numeric entry in " + std::string(key), line_no);
        vals.push_back(v);
      }
      bool ok = false;
      if (key == "DOMAIN_MIN") ok = vals.size() == 3 && vals[0] == want_lo && vals[1] == want_lo && vals[2] == want_lo;
      if (key == "DOMAIN_MAX") ok = vals.size() == 3 && vals[0] == want_hi && vals[1] == want_hi && vals[2] == want_hi;
      if (key == "LUT_3D_INPUT_RANGE") ok = vals.size() == 2 && vals[0] == want_lo && vals[1] == want_hi;
      if (!ok) fail("only the unit input domain is supported", line_no);
      continue;
    }

    // Anything else must be a data row.
    const char lead = key.front();
    const bool numeric_lead = (lead >= '0' && lead <= '9') || lead == '-' || lead == '+' || lead == '.';
    if (!numeric_lead) fail("unknown keyword \"" + std::string(key) + "\"", line_no);
    if (size == 0) fail("data before LUT_3D_SIZE", line_no);
    if (tokens.size() != 3) fail("expected 3 values per data line", line_no);
    if (data.size() == expected * 3) {
      fail("too many data lines (expected " + std::to_string(expected) + ")", line_no);
    }
    for (const auto& tok : tokens) {
      double v = 0.0;
      if (!parse_double(tok, v)) fail("non-numeric entry \"" + std::string(tok) + "\"", line_no);
      data.push_back(v);
    }
  }

  if (size == 0) fail("missing LUT_3D_SIZE", line_no + 1);
  if (data.size() != expected * 3) {
    fail("truncated table: expected " + std::to_string(expected) + " data lines, found " +
             std::to_string(data.size() / 3),
         line_no + 1);
  }

  Lut3d lut(size);
  std::copy(data.begin(), data.end(), lut.values().begin());
  return lut;
}

Lut3d read_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cube(ss.str());
}

std::string format_cube(const Lut3d& lut, const std::string& title) {
  std::string out;
  out.reserve(lut.vertex_count() * 40 + 64);
  if (!title.empty()) out += "TITLE \"" + title + "\"\n";
  out += "LUT_3D_SIZE " + std::to_string(lut.size()) + "\n";
  char buf[96];
  const auto v = lut.values();
  for (std::size_t i = 0; i < lut.vertex_count(); ++i) {
    const int n = std::snprintf(buf, sizeof buf, "%.9f %.9f %.9f\n", v[3 * i], v[3 * i + 1], v[3 * i + 2]);
    out.append(buf, std::size_t(n));
  }
  return out;
}

void write_cube(const Lut3d& lut, const std::filesystem::path& path, const std::string& title) {
  const std::string text = format_cube(lut, title);
  detail::write_file_bytes(path, std::vector<unsigned char>(text.begin(), text.end()));
}

Lut3d read_lut_binary(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader reader(bytes, "LUT3");
  reader.expect_magic("LUT3");
  const std::uint32_t n = reader.u32("size");
  if (n < std::uint32_t(kMinLutSize) || n > std::uint32_t(kMaxLutSize)) reader.fail("invalid lattice size");
  Lut3d lut{int(n)};
  for (double& v : lut.values()) {
    v = reader.f32("vertex data");
    if (!std::isfinite(v)) reader.fail("non-finite vertex value");
  }
  reader.expect_end();
  return lut;
}

void write_lut_binary(const Lut3d& lut, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic("LUT3");
  w.u32(std::uint32_t(lut.size()));
  for (double v : lut.values()) w.f32(float(v));
  detail::write_file_bytes(path, w.bytes());
}

}  // namespace lutforge
