#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "lutforge/error.hpp"
#include "lutforge/optim.hpp"

namespace lutforge {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

[[noreturn]] void fail(const std::string& what, std::size_t line) {
  throw ParseError("fit config: " + what, line, ParseError::Unit::Line);
}

double to_real(std::string_view v, std::size_t line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    fail("expected a number, got \"" + std::string(v) + "\"", line);
  }
  return out;
}

template <class Int>
Int to_int(std::string_view v, std::size_t line) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) fail("expected an integer, got \"" + std::string(v) + "\"", line);
  return out;
}

bool to_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail("expected a boolean, got \"" + std::string(v) + "\"", line);
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void FitConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("fit config: ") + what);
  };
  require(steps >= 1, "steps must be >= 1");
  require(lr_min > 0.0 && lr_max >= lr_min, "learning rates must satisfy lr_max >= lr_min > 0");
  require(adam.beta1 > 0.0 && adam.beta1 < 1.0, "adam_beta1 must be in (0, 1)");
  require(adam.beta2 > 0.0 && adam.beta2 < 1.0, "adam_beta2 must be in (0, 1)");
  require(adam.epsilon > 0.0, "adam_epsilon must be > 0");
  require(bases >= 1 && bases <= 64, "luts (K) must be in [1, 64]");
  require(lut_size >= 2 && lut_size <= 65, "lut_size (N) must be in [2, 65]");
  require(field_scale >= 1, "field_scale must be >= 1");
  require(s_min < s_max, "s_min must be < s_max");
  weights.validate();
}

FitConfig parse_fit_config(const std::string& text) {
  FitConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail("expected key = value", line);
    const std::string_view key = trim(s.substr(0, eq));
    const std::string_view val = trim(s.substr(eq + 1));
    if (val.empty()) fail("missing value for \"" + std::string(key) + "\"", line);

    if (key == "steps") cfg.steps = to_int<long>(val, line);
    else if (key == "lr_max") cfg.lr_max = to_real(val, line);
    else if (key == "lr_min") cfg.lr_min = to_real(val, line);
    else if (key == "adam_beta1") cfg.adam.beta1 = to_real(val, line);
    else if (key == "adam_beta2") cfg.adam.beta2 = to_real(val, line);
    else if (key == "adam_epsilon") cfg.adam.epsilon = to_real(val, line);
    else if (key == "weight_perceptual") cfg.weights.perceptual = to_real(val, line);
    else if (key == "weight_ssim") cfg.weights.ssim = to_real(val, line);
    else if (key == "weight_unu") cfg.weights.unu = to_real(val, line);
    else if (key == "luts") cfg.bases = to_int<int>(val, line);
    else if (key == "lut_size") cfg.lut_size = to_int<int>(val, line);
    else if (key == "field_scale") cfg.field_scale = to_int<int>(val, line);
    else if (key == "spatial") cfg.spatial = to_bool(val, line);
    else if (key == "softmax") cfg.softmax = to_bool(val, line);
    else if (key == "seed") cfg.seed = to_int<std::uint64_t>(val, line);
    else if (key == "s_min") cfg.s_min = to_real(val, line);
    else if (key == "s_max") cfg.s_max = to_real(val, line);
    else fail("unknown key \"" + std::string(key) + "\"", line);
  }
  cfg.validate();
  return cfg;
}

FitConfig read_fit_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_fit_config(ss.str());
}

std::string format_fit_config(const FitConfig& c) {
  std::string out;
  auto put = [&out](const char* key, const std::string& v) { out += std::string(key) + " = " + v + "\n"; };
  put("steps", std::to_string(c.steps));
  put("lr_max", real(c.lr_max));
  put("lr_min", real(c.lr_min));
  put("adam_beta1", real(c.adam.beta1));
  put("adam_beta2", real(c.adam.beta2));
  put("adam_epsilon", real(c.adam.epsilon));
  put("weight_perceptual", real(c.weights.perceptual));
  put("weight_ssim", real(c.weights.ssim));
  put("weight_unu", real(c.weights.unu));
  put("luts", std::to_string(c.bases));
  put("lut_size", std::to_string(c.lut_size));
  put("field_scale", std::to_string(c.field_scale));
  put("spatial", c.spatial ? "true" : "false");
  put("softmax", c.softmax ? "true" : "false");
  put("seed", std::to_string(c.seed));
  put("s_min", real(c.s_min));
  put("s_max", real(c.s_max));
  return out;
}

}  // namespace lutforge
