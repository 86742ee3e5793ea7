// Command-line front end. Settings are layered: built-in defaults, then
// --config, then individual flags.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "handpose/app/commands.hpp"
#include "handpose/app/run_config.hpp"
#include "handpose/error.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string resolution;
  bool clamp_at_dm = false;
  std::string output;
};

handpose::app::RunConfig effective_config(const GlobalFlags& g, const std::optional<double>& depth_sigma,
                                          const std::optional<double>& dropout,
                                          const std::optional<double>& mask_flip) {
  using namespace handpose::app;
  RunConfig cfg;
  if (!g.config.empty()) cfg = load_run_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.workers) cfg.workers = *g.workers;
  if (!g.resolution.empty()) {
    const auto [w, h] = parse_resolution(g.resolution);
    cfg.camera = handpose::CameraIntrinsics::kinect(w, h);
  }
  if (g.clamp_at_dm) cfg.cost.clamp_at_match = true;
  if (!g.output.empty()) cfg.output_dir = g.output;
  if (depth_sigma) cfg.noise.depth_sigma = *depth_sigma;
  if (dropout) cfg.noise.dropout_prob = *dropout;
  if (mask_flip) cfg.noise.mask_flip_prob = *mask_flip;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace handpose;
  CLI::App app{"Model-based hand pose recognition from depth and silhouette images"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config, "Key-value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed (u64)");
  app.add_option("--workers", g.workers, "Evaluation worker threads")->check(CLI::PositiveNumber);
  app.add_option("--resolution", g.resolution, "Image size WxH (Kinect intrinsics scaled)");
  app.add_flag("--clamp-at-dm", g.clamp_at_dm, "Cap per-pixel depth differences at d_m instead of d_M");
  app.add_option("-o,--output", g.output, "Output directory");

  std::optional<double> depth_sigma, dropout, mask_flip;
  std::string pose_file, stem, warm_pose, sequence_dir;

  auto* synth = app.add_subcommand("synth", "Render a pose file into an observation");
  synth->add_option("pose", pose_file, "Pose file (26 values)")->required();
  synth->add_option("--depth-sigma", depth_sigma, "Gaussian depth noise, mm")->check(CLI::NonNegativeNumber);
  synth->add_option("--dropout", dropout, "Depth dropout probability")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--mask-flip", mask_flip, "Silhouette flip probability")->check(CLI::Range(0.0, 1.0));

  auto* recognize = app.add_subcommand("recognize", "Estimate the pose behind an observation");
  recognize->add_option("observation", stem, "Observation stem (<stem>.mask.pgm, .depth.pgm, .cam)")->required();
  recognize->add_option("--warm-start", warm_pose, "Pose file to start the swarm around");

  auto* eval = app.add_subcommand("eval", "Print the cost breakdown of a pose against an observation");
  eval->add_option("pose", pose_file, "Pose file")->required();
  eval->add_option("observation", stem, "Observation stem")->required();

  auto* bench = app.add_subcommand("bench", "Time rendering and objective evaluation per worker count");

  auto* track = app.add_subcommand("track", "Recognize a numbered observation sequence with warm starts");
  track->add_option("directory", sequence_dir, "Directory of <name><n>.{mask.pgm,depth.pgm,cam}")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const app::RunConfig cfg = effective_config(g, depth_sigma, dropout, mask_flip);
    if (*synth) {
      app::cmd_synth(pose_file, cfg, std::cout);
    } else if (*recognize) {
      std::optional<std::filesystem::path> warm;
      if (!warm_pose.empty()) warm = warm_pose;
      app::cmd_recognize(ObservationPaths::from_stem(stem), cfg, warm, std::cout);
    } else if (*eval) {
      app::cmd_eval(pose_file, ObservationPaths::from_stem(stem), cfg, std::cout);
    } else if (*bench) {
      app::cmd_bench(cfg, std::cout);
    } else if (*track) {
      app::cmd_track(sequence_dir, cfg, std::cout);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
