#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "handpose/app/commands.hpp"
#include "handpose/app/run_config.hpp"
#include "handpose/error.hpp"
#include "handpose/pgm.hpp"

using namespace handpose;
using namespace handpose::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("handpose_test_app_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

HandPose sample_pose() {
  HandPose h;
  h.wrist = {0.03, -0.02, 0.8, 15, -20, 10};
  h.finger(Finger::Index) = {20, 5, 30, 10};
  h.finger(Finger::Ring) = {40, -5, 60, 20};
  return h;
}

RunConfig quick_config(const fs::path& out) {
  RunConfig cfg;
  cfg.output_dir = out;
  cfg.workers = 2;
  cfg.pso.n_particles = 16;
  cfg.pso.max_generations = 6;
  return cfg;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("run config: save and reload reproduces every setting") {
  RunConfig cfg;
  cfg.camera = CameraIntrinsics::kinect(320, 240);
  cfg.cost.clamp_at_match = true;
  cfg.pso.n_particles = 48;
  cfg.pso.c1 = 2.5;
  cfg.pso.c2 = 1.75;
  cfg.pso.per_dimension_random = true;
  cfg.seed = 18446744073709551615ull;
  cfg.workers = 3;
  cfg.noise = {2.5, 0.05, 0.001};
  cfg.warm_radius_angle = 7.5;
  cfg.bench_workers = {1, 2, 8};
  const KeyValueFile kv = run_config_to_keyvalue(cfg);
  std::stringstream text;
  kv.write(text);
  const RunConfig back = run_config_from_keyvalue(KeyValueFile::parse(text, "mem"));
  CHECK(run_config_to_keyvalue(back).entries() == kv.entries());
  CHECK(back.seed == cfg.seed);
  CHECK(back.camera == cfg.camera);
  CHECK(back.bench_workers == cfg.bench_workers);
}

TEST_CASE("run config: partial files layer over defaults; typos and bad values are errors") {
  std::istringstream partial("# tuned\npso.generations = 10\ncost.clamp_at_match = yes\n");
  const RunConfig c = run_config_from_keyvalue(KeyValueFile::parse(partial, "cfg.txt"));
  CHECK(c.pso.max_generations == 10);
  CHECK(c.cost.clamp_at_match);
  CHECK(c.pso.n_particles == 64);

  std::istringstream typo("pso.particle = 10\n");
  CHECK_THROWS_WITH_AS(run_config_from_keyvalue(KeyValueFile::parse(typo, "cfg.txt")),
                       doctest::Contains("pso.particle"), IoError);
  std::istringstream bad("pso.c1 = 1\npso.c2 = 1\n");
  CHECK_THROWS_AS(run_config_from_keyvalue(KeyValueFile::parse(bad, "cfg.txt")), IoError);
  std::istringstream nan_text("cost.area_weight = heavy\n");
  CHECK_THROWS_WITH_AS(run_config_from_keyvalue(KeyValueFile::parse(nan_text, "cfg.txt")),
                       doctest::Contains("cost.area_weight"), IoError);
}

TEST_CASE("resolution flag parsing") {
  CHECK(parse_resolution("640x480") == std::pair{640, 480});
  CHECK_THROWS_AS(parse_resolution("640"), InvalidArgument);
  CHECK_THROWS_AS(parse_resolution("0x10"), InvalidArgument);
  CHECK_THROWS_AS(parse_resolution("64x48x2"), InvalidArgument);
}

TEST_CASE("synth") {
  const fs::path dir = scratch_dir("synth");
  HandPose flat;
  flat.wrist.z = 0.8;
  save_pose(dir / "flat.pose", flat);
  std::ostringstream log;

  SUBCASE("flat hand: files exist, mask is non-empty, config is recorded") {
    const SynthResult r = cmd_synth(dir / "flat.pose", quick_config(dir / "a"), log);
    CHECK(fs::exists(r.paths.mask));
    CHECK(fs::exists(r.paths.depth));
    CHECK(fs::exists(r.paths.camera));
    CHECK(fs::exists(dir / "a" / "config.txt"));
    const Observation o = load_observation(r.paths);
    CHECK(std::count(o.mask.data.begin(), o.mask.data.end(), 1) > 0);
    CHECK_FALSE(r.clamped);
  }
  SUBCASE("dropout 1 clears the depth file") {
    RunConfig cfg = quick_config(dir / "b");
    cfg.noise.dropout_prob = 1.0;
    const SynthResult r = cmd_synth(dir / "flat.pose", cfg, log);
    const DepthImage d = read_depth_pgm(r.paths.depth);
    CHECK(std::all_of(d.data.begin(), d.data.end(), [](double z) { return z == 0.0; }));
  }
  SUBCASE("same seed gives byte-identical files, also with noise") {
    RunConfig cfg = quick_config(dir / "c1");
    cfg.noise = {4.0, 0.2, 0.01};
    cmd_synth(dir / "flat.pose", cfg, log);
    cfg.output_dir = dir / "c2";
    cmd_synth(dir / "flat.pose", cfg, log);
    for (const char* f : {"observation.mask.pgm", "observation.depth.pgm", "observation.cam"}) {
      CHECK(slurp(dir / "c1" / f) == slurp(dir / "c2" / f));
    }
  }
  SUBCASE("out-of-range pose is clamped with a warning") {
    HandPose wild = flat;
    wild.finger(Finger::Index).pip = 150.0;
    save_pose(dir / "wild.pose", wild);
    std::ostringstream warn;
    const SynthResult r = cmd_synth(dir / "wild.pose", quick_config(dir / "d"), warn);
    CHECK(r.clamped);
    CHECK(r.pose.finger(Finger::Index).pip == 100.0);
    CHECK(warn.str().find("warning") != std::string::npos);
  }
  SUBCASE("unreadable pose file") {
    CHECK_THROWS_AS(cmd_synth(dir / "missing.pose", quick_config(dir / "e"), log), IoError);
  }
}

TEST_CASE("recognize and eval") {
  const fs::path dir = scratch_dir("recognize");
  save_pose(dir / "ref.pose", sample_pose());
  std::ostringstream log;
  const SynthResult syn = cmd_synth(dir / "ref.pose", quick_config(dir / "obs"), log);

  SUBCASE("warm start on the reference returns it with cost 0") {
    const RecognizeResult r = cmd_recognize(syn.paths, quick_config(dir / "warm"), dir / "ref.pose", log);
    CHECK(r.pso.best_cost == 0.0);
    CHECK(r.pose == sample_pose());
    CHECK(load_pose(dir / "warm" / "pose.txt") == sample_pose());
  }
  SUBCASE("cold start writes every artifact; trace has at most 30 non-increasing rows") {
    RunConfig cfg = quick_config(dir / "cold");
    cfg.pso = PsoParams{};
    const RecognizeResult r = cmd_recognize(syn.paths, cfg, std::nullopt, log);
    for (const char* f : {"pose.txt", "trace.csv", "config.txt", "overlay_observed.pgm", "overlay_recognized.pgm",
                          "overlay_side_by_side.pgm", "overlay_difference.pgm"}) {
      CHECK(fs::exists(dir / "cold" / f));
    }
    const auto rows = lines_of(slurp(dir / "cold" / "trace.csv"));
    CHECK(rows.front() == "generation,best_cost");
    CHECK(rows.size() - 1 <= 30);
    CHECK(rows.size() - 1 == r.pso.trace.size());
    double prev = 1e300;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double v = std::stod(rows[i].substr(rows[i].find(',') + 1));
      CHECK(v <= prev);
      prev = v;
    }
    const Image<std::uint8_t> pair = [&] {
      std::ifstream in(dir / "cold" / "overlay_side_by_side.pgm", std::ios::binary);
      std::string magic;
      Image<std::uint8_t> img;
      in >> magic >> img.width >> img.height;
      return img;
    }();
    CHECK(pair.width == 320);
    CHECK(pair.height == 120);
  }
  SUBCASE("identical inputs give byte-identical outputs for any worker count") {
    RunConfig a = quick_config(dir / "det1");
    a.workers = 1;
    RunConfig b = quick_config(dir / "det2");
    b.workers = 3;
    cmd_recognize(syn.paths, a, std::nullopt, log);
    cmd_recognize(syn.paths, b, std::nullopt, log);
    for (const char* f : {"pose.txt", "trace.csv", "overlay_side_by_side.pgm", "overlay_difference.pgm"}) {
      CHECK(slurp(dir / "det1" / f) == slurp(dir / "det2" / f));
    }
  }
  SUBCASE("eval: ground truth scores 0, a shifted pose scores more, crossing fingers score 10 kc") {
    std::ostringstream out;
    const CostBreakdown self = cmd_eval(dir / "ref.pose", syn.paths, quick_config(dir / "eval"), out);
    CHECK(self.total == 0.0);
    const auto lines = lines_of(out.str());
    CHECK(lines == std::vector<std::string>{"depth_term = 0", "area_term = 0", "kc = 0", "penalty_term = 0",
                                            "total = 0"});

    HandPose shifted = sample_pose();
    shifted.wrist.x += 0.05;
    save_pose(dir / "shifted.pose", shifted);
    std::ostringstream out2;
    CHECK(cmd_eval(dir / "shifted.pose", syn.paths, quick_config(dir / "eval"), out2).total > 0.0);

    HandPose crossed;
    crossed.wrist.z = 0.8;
    crossed.finger(Finger::Index).mp_abduction = 15;
    crossed.finger(Finger::Middle).mp_abduction = -10;  // stays within the joint limits
    save_pose(dir / "crossed.pose", crossed);
    const SynthResult cross_obs = cmd_synth(dir / "crossed.pose", quick_config(dir / "cross"), log);
    std::ostringstream out3;
    const CostBreakdown c = cmd_eval(dir / "crossed.pose", cross_obs.paths, quick_config(dir / "eval"), out3);
    CHECK(c.penalty_term == doctest::Approx(100.0));
    CHECK(c.total == c.penalty_term);
    CHECK(out3.str().find("kc = 10") != std::string::npos);
  }
  SUBCASE("missing observation files") {
    CHECK_THROWS_AS(cmd_recognize(ObservationPaths::from_stem(dir / "nothing"), quick_config(dir / "x"), std::nullopt,
                                  log),
                    IoError);
  }
}

TEST_CASE("bench reports both phases per worker count with identical costs") {
  const fs::path dir = scratch_dir("bench");
  RunConfig cfg = quick_config(dir / "out");
  cfg.bench_workers = {1, 2};
  cfg.bench_frames = 1;
  std::ostringstream out;
  const auto rows = cmd_bench(cfg, out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].final_cost == rows[1].final_cost);
  for (const BenchRow& r : rows) {
    CHECK(r.render_ms > 0.0);
    CHECK(r.objective_ms > 0.0);
    CHECK(r.total_ms == doctest::Approx(r.render_ms + r.objective_ms));
  }
  const std::string text = out.str();
  CHECK(text.find("render+observation") != std::string::npos);
  CHECK(text.find("objective") != std::string::npos);
  CHECK(text.find("total") != std::string::npos);
  CHECK(text.find("costs identical across worker counts = yes") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "bench.csv"));
}

TEST_CASE("track") {
  const fs::path dir = scratch_dir("track");
  std::ostringstream log;
  const Observation obs = synthesize_observation(sample_pose(), HandDimensions::defaults(), CameraIntrinsics{});

  SUBCASE("constant pose: costs never rise after the first frame") {
    fs::create_directories(dir / "seq");
    for (int k = 1; k <= 5; ++k) {
      save_observation(obs, ObservationPaths::from_stem(dir / "seq" / ("frame_" + std::to_string(k))));
    }
    const auto frames = cmd_track(dir / "seq", quick_config(dir / "out"), log);
    REQUIRE(frames.size() == 5);
    for (std::size_t k = 1; k < frames.size(); ++k) {
      CHECK(frames[k].result.pso.best_cost <= frames[k - 1].result.pso.best_cost);
    }
    for (int k = 1; k <= 5; ++k) CHECK(fs::exists(dir / "out" / ("frame_" + std::to_string(k) + ".pose")));
    CHECK(lines_of(slurp(dir / "out" / "track.csv")).size() == 6);
  }
  SUBCASE("a single frame matches recognize") {
    fs::create_directories(dir / "one");
    save_observation(obs, ObservationPaths::from_stem(dir / "one" / "f7"));
    const auto frames = cmd_track(dir / "one", quick_config(dir / "t1"), log);
    const RecognizeResult r =
        cmd_recognize(ObservationPaths::from_stem(dir / "one" / "f7"), quick_config(dir / "r1"), std::nullopt, log);
    CHECK(frames.at(0).result.pso.trace == r.pso.trace);
    CHECK(slurp(dir / "t1" / "f7.pose") == slurp(dir / "r1" / "pose.txt"));
  }
  SUBCASE("empty directory") {
    fs::create_directories(dir / "empty");
    CHECK_THROWS_AS(cmd_track(dir / "empty", quick_config(dir / "t2"), log), IoError);
  }
  SUBCASE("a gap names the missing frame") {
    fs::create_directories(dir / "gap");
    for (int k : {1, 2, 4}) save_observation(obs, ObservationPaths::from_stem(dir / "gap" / ("f" + std::to_string(k))));
    CHECK_THROWS_WITH_AS(cmd_track(dir / "gap", quick_config(dir / "t3"), log), doctest::Contains("frame 3"),
                         IoError);
  }
}

TEST_CASE("reference suite and error metrics") {
  const auto dims = HandDimensions::defaults();
  const CameraIntrinsics cam;
  const auto a = reference_suite(4, 99, dims, cam);
  const auto b = reference_suite(4, 99, dims, cam);
  REQUIRE(a.size() == 4);
  CHECK(a == b);
  for (const HandPose& h : a) {
    CHECK(collision_penalty(h, dims) == 0.0);
    CHECK(within_bounds(h, default_bounds()));
  }
  HandPose x = a[0], y = a[0];
  y.wrist.x += 0.03;
  y.wrist.y -= 0.04;
  CHECK(wrist_position_error(x, y) == doctest::Approx(0.05));
  CHECK(wrist_orientation_error(x, x) == doctest::Approx(0.0).epsilon(1e-6));
  HandPose r0, r1;
  r1.wrist.rot_z = 12.0;
  CHECK(wrist_orientation_error(r0, r1) == doctest::Approx(12.0));
}
