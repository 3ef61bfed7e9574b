// lutforge: command-line front end for LUT application, blending, fitting and diagnostics.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lutforge/color.hpp"
#include "lutforge/error.hpp"
#include "lutforge/imageio.hpp"
#include "lutforge/lut3d.hpp"
#include "lutforge/metrics.hpp"
#include "lutforge/modulation.hpp"
#include "lutforge/objective.hpp"
#include "lutforge/optim.hpp"
#include "lutforge/parallel.hpp"

namespace fs = std::filesystem;
using namespace lutforge;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kDiverged = 3 };

Lut3d load_lut(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".lut3" || ext == ".bin") return read_lut_binary(path);
  return read_cube(path);
}

std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lutforge: blended 3D LUT exposure correction toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (overrides LUTFORGE_THREADS)")->check(CLI::NonNegativeNumber);

  int size = 17;
  std::string out_path, title;
  auto* identity = app.add_subcommand("identity", "Write an identity .cube LUT");
  identity->add_option("--size", size, "Vertices per axis")->required();
  identity->add_option("--out", out_path, "Output .cube path")->required();
  identity->add_option("--title", title, "Optional TITLE line");

  std::string lut_path, in_path;
  auto* apply_cmd = app.add_subcommand("apply", "Apply one LUT to an image");
  apply_cmd->add_option("--lut", lut_path, "LUT (.cube or binary .lut3)")->required();
  apply_cmd->add_option("--in", in_path, "Input image")->required();
  apply_cmd->add_option("--out", out_path, "Output image")->required();

  std::string lut_list, field_path;
  auto* blend_cmd = app.add_subcommand("blend", "Blend K LUTs with a modulation field");
  blend_cmd->add_option("--luts", lut_list, "Comma-separated LUT paths")->required();
  blend_cmd->add_option("--field", field_path, "MODF field file")->required();
  blend_cmd->add_option("--in", in_path, "Input image")->required();
  blend_cmd->add_option("--out", out_path, "Output image")->required();

  std::string target_path, config_path, outdir;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a LUT bank, field and uncertainty map to an image pair");
  fit_cmd->add_option("--in", in_path, "Degraded input image")->required();
  fit_cmd->add_option("--target", target_path, "Ground-truth image")->required();
  fit_cmd->add_option("--config", config_path, "key=value fit configuration");
  fit_cmd->add_option("--outdir", outdir, "Artifact directory")->required();

  std::string a_path, b_path;
  auto* eval_cmd = app.add_subcommand("eval", "Print PSNR and SSIM between two images");
  eval_cmd->add_option("--a", a_path, "First image")->required();
  eval_cmd->add_option("--b", b_path, "Second image")->required();

  auto* lip_cmd = app.add_subcommand("lipschitz", "Print the adjacent-vertex Lipschitz bound of a LUT");
  lip_cmd->add_option("--lut", lut_path, "LUT (.cube or binary .lut3)")->required();

  auto* pol_cmd = app.add_subcommand("polarize", "Export the polarized-HSL representation as PFM");
  pol_cmd->add_option("--in", in_path, "Input sRGB image")->required();
  pol_cmd->add_option("--out", out_path, "Output .pfm")->required();

  std::string map_path;
  auto* unc_cmd = app.add_subcommand("uncertainty", "Render an uncertainty map as a grayscale PNG");
  unc_cmd->add_option("--map", map_path, "UNCM file")->required();
  unc_cmd->add_option("--out", out_path, "Output PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (threads > 0) set_thread_count(threads);

  try {
    if (*identity) {
      write_cube(make_identity(size), out_path, title);
    } else if (*apply_cmd) {
      save_image(apply_image(load_lut(lut_path), load_image(in_path)), out_path);
    } else if (*blend_cmd) {
      LutBank luts;
      for (const auto& p : split_list(lut_list)) luts.push_back(load_lut(p));
      save_image(blend(luts, read_field(field_path), load_image(in_path)), out_path);
    } else if (*fit_cmd) {
      const FitConfig cfg = config_path.empty() ? FitConfig{} : read_fit_config(config_path);
      const FitResult result = fit(load_image(in_path), load_image(target_path), cfg);
      write_fit_artifacts(result, cfg, outdir);
      std::cout << format_report(result.metrics) << "\n";
    } else if (*eval_cmd) {
      std::cout << format_report(evaluate(load_image(a_path), load_image(b_path))) << "\n";
    } else if (*lip_cmd) {
      std::cout << decimal(lipschitz_bound(load_lut(lut_path))) << "\n";
    } else if (*pol_cmd) {
      save_pfm(polarize_image(load_image(in_path)), out_path);
    } else if (*unc_cmd) {
      save_png_gray(export_uncertainty(read_uncertainty(map_path)), out_path);
    }
  } catch (const Divergence& e) {
    std::cerr << "lutforge: diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const InvalidArgument& e) {
    std::cerr << "lutforge: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "lutforge: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
