#include "handpose/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>

#include <Eigen/Geometry>

#include "handpose/error.hpp"
#include "handpose/parallel_eval.hpp"
#include "handpose/pgm.hpp"
#include "handpose/render.hpp"

namespace handpose::app {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"x", "y", "z", "rot_x", "rot_y", "rot_z"};
    for (const char* f : kFingerNames) {
      for (const char* j : {"mp_flexion", "mp_abduction", "pip", "dip"}) n.push_back(std::string(f) + "_" + j);
    }
    return n;
  }();
  return names;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

// Near surfaces bright, far surfaces dim, undefined black; both images share one scale.
Image<std::uint8_t> depth_to_gray(const DepthImage& d, double z_min, double z_max) {
  Image<std::uint8_t> g(d.width, d.height, 0);
  const double span = std::max(z_max - z_min, 1.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.data[i] == 0.0) continue;
    const double t = std::clamp((d.data[i] - z_min) / span, 0.0, 1.0);
    g.data[i] = static_cast<std::uint8_t>(std::lround(255.0 - 200.0 * t));
  }
  return g;
}

void write_overlays(const Observation& obs, const DepthImage& rendered, const CostParams& cost,
                    const std::filesystem::path& dir) {
  double z_min = std::numeric_limits<double>::infinity();
  double z_max = 0.0;
  for (const DepthImage* img : {&obs.depth, &rendered}) {
    for (const double z : img->data) {
      if (z == 0.0) continue;
      z_min = std::min(z_min, z);
      z_max = std::max(z_max, z);
    }
  }
  if (z_max == 0.0) z_min = 0.0;
  const auto observed = depth_to_gray(obs.depth, z_min, z_max);
  const auto recognized = depth_to_gray(rendered, z_min, z_max);
  write_gray_pgm(dir / "overlay_observed.pgm", observed);
  write_gray_pgm(dir / "overlay_recognized.pgm", recognized);

  const int w = obs.depth.width;
  Image<std::uint8_t> pair(2 * w, obs.depth.height, 0);
  for (int y = 0; y < obs.depth.height; ++y) {
    for (int x = 0; x < w; ++x) {
      pair.at(x, y) = observed.at(x, y);
      pair.at(w + x, y) = recognized.at(x, y);
    }
  }
  write_gray_pgm(dir / "overlay_side_by_side.pgm", pair);

  // |o_d - r_d| capped at d_M; a surface present in only one image counts as the cap.
  Image<std::uint8_t> diff(w, obs.depth.height, 0);
  const double cap = cost.depth_clamp;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const double o = obs.depth.data[i];
    const double r = rendered.data[i];
    if (o == 0.0 && r == 0.0) continue;
    const double delta = (o == 0.0 || r == 0.0) ? cap : std::min(std::abs(o - r), cap);
    diff.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * delta / cap));
  }
  write_gray_pgm(dir / "overlay_difference.pgm", diff);
}

HandPose pose_from_position(const std::vector<double>& x) {
  PoseVector v{};
  std::copy(x.begin(), x.end(), v.begin());
  return HandPose::from_vector(v);
}

constexpr const char* kDepthSuffix = ".depth.pgm";

}  // namespace

std::string trace_csv(const std::vector<double>& trace) {
  std::string s = "generation,best_cost\n";
  for (std::size_t i = 0; i < trace.size(); ++i) s += std::to_string(i + 1) + "," + format_double(trace[i]) + "\n";
  return s;
}

BoxBounds recognition_bounds() {
  const PoseBounds b = default_bounds();
  return {std::vector<double>(b.lower.begin(), b.lower.end()), std::vector<double>(b.upper.begin(), b.upper.end())};
}

WarmStart warm_start_around(const HandPose& center, const RunConfig& cfg) {
  const PoseVector c = center.to_vector();
  WarmStart w{std::vector<double>(c.begin(), c.end()), std::vector<double>(kPoseDims, cfg.warm_radius_angle)};
  for (std::size_t i = 0; i < 3; ++i) w.radius[i] = cfg.warm_radius_position;
  return w;
}

RecognizeResult recognize(const Observation& obs, const RunConfig& cfg, const std::optional<HandPose>& warm) {
  BatchEvaluator eval(obs, cfg.dimensions(), cfg.cost, cfg.effective_workers());
  std::optional<WarmStart> ws;
  if (warm) ws = warm_start_around(*warm, cfg);
  RecognizeResult r;
  r.pso = run_pso(eval.objective(), recognition_bounds(), cfg.pso_params(), ws);
  r.pose = pose_from_position(r.pso.best_position);
  return r;
}

SynthResult cmd_synth(const std::filesystem::path& pose_file, const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  SynthResult r;
  const HandPose input = load_pose(pose_file);
  const PoseBounds bounds = default_bounds();
  r.clamped = !within_bounds(input, bounds);
  r.pose = clamp_pose(input, bounds);
  if (r.clamped) log << "warning: " << pose_file.string() << ": pose outside joint limits, clamped\n";

  Rng rng(cfg.seed);
  const Observation obs = apply_noise(synthesize_observation(r.pose, cfg.dimensions(), cfg.camera), cfg.noise, rng);

  save_effective_config(cfg);
  r.paths = ObservationPaths::from_stem(cfg.output_dir / kObservationStem);
  save_observation(obs, r.paths);
  save_pose(cfg.output_dir / "reference.pose", r.pose);

  std::size_t hand_px = 0;
  for (const auto m : obs.mask.data) hand_px += m;
  log << "wrote " << r.paths.mask.string() << ", " << r.paths.depth.string() << ", " << r.paths.camera.string()
      << " (" << obs.cam.width << "x" << obs.cam.height << ", " << hand_px << " hand pixels)\n";
  return r;
}

RecognizeResult cmd_recognize(const ObservationPaths& paths, const RunConfig& cfg,
                              const std::optional<std::filesystem::path>& warm_pose_file, std::ostream& log) {
  cfg.validate();
  const Observation obs = load_observation(paths);
  std::optional<HandPose> warm;
  if (warm_pose_file) warm = load_pose(*warm_pose_file);

  const RecognizeResult r = recognize(obs, cfg, warm);

  save_effective_config(cfg);
  save_pose(cfg.output_dir / "pose.txt", r.pose);
  write_text(cfg.output_dir / "trace.csv", trace_csv(r.pso.trace));
  CostEvaluator eval(obs, cfg.dimensions(), cfg.cost);
  eval(r.pose);
  write_overlays(obs, eval.last_render(), cfg.cost, cfg.output_dir);

  log << "generations = " << r.pso.generations << "\n"
      << "initial_best_cost = " << format_double(r.pso.trace.front()) << "\n"
      << "final_cost = " << format_double(r.pso.best_cost) << "\n"
      << "pose written to " << (cfg.output_dir / "pose.txt").string() << "\n";
  return r;
}

CostBreakdown cmd_eval(const std::filesystem::path& pose_file, const ObservationPaths& paths, const RunConfig& cfg,
                       std::ostream& out) {
  cfg.validate();
  const HandPose pose = load_pose(pose_file);
  const Observation obs = load_observation(paths);
  const HandDimensions dims = cfg.dimensions();
  const CostBreakdown c = objective(pose, obs, dims, cfg.cost);
  out << "depth_term = " << format_double(c.depth_term) << "\n"
      << "area_term = " << format_double(c.area_term) << "\n"
      << "kc = " << format_double(collision_penalty(pose, dims)) << "\n"
      << "penalty_term = " << format_double(c.penalty_term) << "\n"
      << "total = " << format_double(c.total) << "\n";
  return c;
}

std::vector<BenchRow> cmd_bench(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const HandDimensions dims = cfg.dimensions();
  const auto poses = reference_suite(static_cast<std::size_t>(cfg.bench_frames), cfg.seed, dims, cfg.camera);

  std::vector<BenchRow> rows;
  for (const unsigned w : cfg.bench_workers) {
    BenchRow row;
    row.workers = w;
    for (const HandPose& ref : poses) {
      const auto t0 = Clock::now();
      const Observation obs = synthesize_observation(ref, dims, cfg.camera);
      const double synth_s = seconds_since(t0);

      BatchEvaluator eval(obs, dims, cfg.cost, w);
      const auto t1 = Clock::now();
      const PsoResult res = run_pso(eval.objective(), recognition_bounds(), cfg.pso_params());
      const double search_s = seconds_since(t1);

      // Per-worker phase times overlap under parallelism; use them as shares of the wall time.
      const PhaseTimes pt = eval.phase_times();
      const double busy = pt.render_seconds + pt.objective_seconds;
      const double render_share = busy > 0.0 ? pt.render_seconds / busy : 0.0;
      row.render_ms += 1e3 * (synth_s + search_s * render_share);
      row.objective_ms += 1e3 * search_s * (1.0 - render_share);
      row.total_ms += 1e3 * (synth_s + search_s);
      row.final_cost = res.best_cost;
    }
    const double n = static_cast<double>(poses.size());
    row.render_ms /= n;
    row.objective_ms /= n;
    row.total_ms /= n;
    rows.push_back(row);
  }

  std::string csv = "workers,render_observation_ms,objective_ms,total_ms,final_cost\n";
  out << "frames = " << poses.size() << " (" << cfg.camera.width << "x" << cfg.camera.height << ", "
      << cfg.pso.n_particles << " particles x " << cfg.pso.max_generations << " generations)\n";
  for (const BenchRow& r : rows) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "workers = %u: render+observation %.1f ms/frame, objective %.1f ms/frame, total %.1f ms/frame\n",
                  r.workers, r.render_ms, r.objective_ms, r.total_ms);
    out << line;
    csv += std::to_string(r.workers) + "," + format_double(r.render_ms) + "," + format_double(r.objective_ms) + "," +
           format_double(r.total_ms) + "," + format_double(r.final_cost) + "\n";
  }
  const bool same = std::all_of(rows.begin(), rows.end(),
                                [&](const BenchRow& r) { return r.final_cost == rows.front().final_cost; });
  out << "costs identical across worker counts = " << (same ? "yes" : "no") << "\n";

  save_effective_config(cfg);
  write_text(cfg.output_dir / "bench.csv", csv);
  return rows;
}

std::vector<TrackFrame> cmd_track(const std::filesystem::path& dir, const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + ": not a directory");

  std::map<long long, std::string> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() <= std::string(kDepthSuffix).size() || !name.ends_with(kDepthSuffix)) continue;
    const std::string stem = name.substr(0, name.size() - std::string(kDepthSuffix).size());
    std::size_t digits = 0;
    while (digits < stem.size() && std::isdigit(static_cast<unsigned char>(stem[stem.size() - 1 - digits]))) ++digits;
    if (digits == 0) continue;
    const long long number = std::stoll(stem.substr(stem.size() - digits));
    if (!frames.emplace(number, stem).second) {
      throw IoError(dir.string() + ": frame " + std::to_string(number) + " appears twice ('" + frames[number] +
                    "' and '" + stem + "')");
    }
  }
  if (frames.empty()) throw IoError(dir.string() + ": no numbered observation frames (*<digits>.depth.pgm)");
  long long expected = frames.begin()->first;
  for (const auto& [number, stem] : frames) {
    if (number != expected) {
      throw IoError(dir.string() + ": frame " + std::to_string(expected) + " is missing (sequence jumps to '" + stem +
                    "')");
    }
    ++expected;
  }

  save_effective_config(cfg);
  std::vector<TrackFrame> out;
  std::string csv = "frame,stem,generations,initial_cost,final_cost";
  for (const std::string& n : param_names()) csv += "," + n;
  csv += "\n";

  std::optional<HandPose> previous;
  for (const auto& [number, stem] : frames) {
    const Observation obs = load_observation(ObservationPaths::from_stem(dir / stem));
    RunConfig frame_cfg = cfg;
    frame_cfg.seed = cfg.seed + out.size();
    TrackFrame f{number, stem, recognize(obs, frame_cfg, previous)};
    previous = f.result.pose;
    save_pose(cfg.output_dir / (stem + ".pose"), f.result.pose);

    csv += std::to_string(number) + "," + stem + "," + std::to_string(f.result.pso.generations) + "," +
           format_double(f.result.pso.trace.front()) + "," + format_double(f.result.pso.best_cost);
    for (const double v : f.result.pose.to_vector()) csv += "," + format_double(v);
    csv += "\n";
    log << "frame " << number << " (" << stem << "): cost " << format_double(f.result.pso.best_cost) << " after "
        << f.result.pso.generations << " generations\n";
    out.push_back(std::move(f));
  }
  write_text(cfg.output_dir / "track.csv", csv);
  return out;
}

double wrist_position_error(const HandPose& a, const HandPose& b) {
  return std::hypot(a.wrist.x - b.wrist.x, a.wrist.y - b.wrist.y, a.wrist.z - b.wrist.z);
}

double wrist_orientation_error(const HandPose& a, const HandPose& b) {
  const Mat3 ra = wrist_rotation(a.wrist.rot_x, a.wrist.rot_y, a.wrist.rot_z);
  const Mat3 rb = wrist_rotation(b.wrist.rot_x, b.wrist.rot_y, b.wrist.rot_z);
  return Eigen::AngleAxisd(ra.transpose() * rb).angle() * 180.0 / std::numbers::pi;
}

std::vector<HandPose> reference_suite(std::size_t count, std::uint64_t seed, const HandDimensions& d,
                                      const CameraIntrinsics& cam, int min_pixels) {
  Rng rng(seed);
  const PoseBounds bounds = default_bounds();
  std::vector<HandPose> out;
  for (long attempts = 0; out.size() < count; ++attempts) {
    if (attempts > 1'000'000) throw InvalidArgument("reference_suite: could not find enough visible poses");
    const HandPose h = random_pose(rng, bounds);
    if (collision_penalty(h, d) > 0.0) continue;
    const Observation o = synthesize_observation(h, d, cam);
    int pixels = 0;
    bool touches_border = false;
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        if (!o.mask.at(x, y)) continue;
        ++pixels;
        touches_border |= x == 0 || y == 0 || x == cam.width - 1 || y == cam.height - 1;
      }
    }
    if (!touches_border && pixels >= min_pixels) out.push_back(h);
  }
  return out;
}

}  // namespace handpose::app
