// radarsplat: radar depth completion with localized Gaussian processes and
// point-cloud splat rendering.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "radarsplat/commands.hpp"
#include "radarsplat/run_config.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> seed, regions, quantile, queries, format, input, output_dir,
      threads, ply, camera, image;
  bool parallel = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("-c,--config", f.config, "Config file of `key = value` lines (# comments)");
  sub->add_option("--seed", f.seed, "Random seed for queries and synthetic scenes");
  sub->add_option("--regions", f.regions, "Partition as AZxEL cells, e.g. 6x2");
  sub->add_option("--quantile", f.quantile, "Variance quantile kept by pointcloud, in (0, 1]");
  sub->add_option("--queries", f.queries, "Number of random query directions for pointcloud");
  sub->add_option("--format", f.format, "PLY encoding: ascii or binary");
  sub->add_option("-i,--input", f.input, "Input scan (.csv or .json)");
  sub->add_option("-o,--output-dir", f.output_dir, "Directory for outputs and the manifest");
  sub->add_option("--threads", f.threads, "Worker threads with --parallel (0 = all cores)");
  sub->add_flag("--parallel", f.parallel, "Fit and predict regions concurrently");
  sub->add_option("--set", f.sets, "Override any config key: --set key=value (repeatable)");
}

std::vector<std::pair<std::string, std::string>> overrides(const Flags& f) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    out.emplace_back(s.substr(0, eq), eq == std::string::npos ? "" : s.substr(eq + 1));
  }
  const std::pair<const char*, const std::optional<std::string>*> named[] = {
      {"seed", &f.seed},       {"regions", &f.regions},       {"quantile", &f.quantile},
      {"queries", &f.queries}, {"ply_format", &f.format},     {"input", &f.input},
      {"output_dir", &f.output_dir}, {"threads", &f.threads}, {"ply", &f.ply},
      {"camera", &f.camera},   {"image", &f.image},
  };
  for (const auto& [key, value] : named) {
    if (*value) out.emplace_back(key, **value);
  }
  if (f.parallel) out.emplace_back("parallel", "true");
  return out;
}

std::string config_keys_help() {
  std::string s = "Config keys:";
  for (const auto& k : radarsplat::RunConfig::keys()) s += " " + k;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar depth completion with localized Gaussian processes"};
  app.footer(config_keys_help());
  app.require_subcommand(1);

  const std::pair<const char*, const char*> descriptions[] = {
      {"reconstruct", "Fit the localized GP to a scan and write mean/variance depth rasters"},
      {"pointcloud", "Fit, sample random directions, keep low-variance depths, write a PLY"},
      {"render", "Render a PLY as isotropic Gaussian splats through a pinhole camera"},
      {"bench", "Time conventional vs localized GP fit+predict on synthetic scans"},
      {"eval", "Compare conventional and localized MAE/RMSE on a synthetic scene"},
      {"synth", "Generate a synthetic scene and write a sampled scan plus truth raster"},
  };

  Flags flags;
  for (const auto& [name, description] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, description);
    add_common(sub, flags);
    if (std::string(name) == "render") {
      sub->add_option("--ply", flags.ply, "Point cloud to render");
      sub->add_option("--camera", flags.camera, "Camera JSON (extrinsic, intrinsic, width, height)");
      sub->add_option("--image", flags.image, "Output image (.png or .ppm)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return radarsplat::cli::kUsageError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  radarsplat::cli::Invocation inv;
  if (!flags.config.empty()) inv.config_file = flags.config;
  inv.overrides = overrides(flags);
  return radarsplat::cli::run_command(command, inv, std::cout, std::cerr);
}
