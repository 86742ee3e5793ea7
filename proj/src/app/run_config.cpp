#include "handpose/app/run_config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "handpose/error.hpp"
#include "handpose/parallel_eval.hpp"

namespace handpose::app {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "camera.fx", "camera.fy", "camera.cx", "camera.cy", "camera.width", "camera.height", "camera.z_near",
      "camera.z_far", "dimensions", "cost.match_threshold", "cost.depth_clamp", "cost.area_weight",
      "cost.collision_weight", "cost.depth_unit", "cost.clamp_at_match", "pso.particles", "pso.generations",
      "pso.stop_threshold", "pso.c1", "pso.c2", "pso.mutation_period", "pso.mutation_fraction",
      "pso.per_dimension_random", "workers", "output", "seed", "noise.depth_sigma", "noise.dropout",
      "noise.mask_flip", "track.radius_position", "track.radius_angle", "bench.workers", "bench.frames"};
  return keys;
}

std::string join_workers(const std::vector<unsigned>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

std::vector<unsigned> parse_workers(const std::string& text, const std::string& source) {
  std::vector<unsigned> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    unsigned v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size() || v == 0) {
      throw IoError(source + ": field 'bench.workers': expected a comma-separated list of positive integers");
    }
    out.push_back(v);
  }
  if (out.empty()) throw IoError(source + ": field 'bench.workers': empty list");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  camera.validate();
  cost.validate();
  pso.validate();
  noise.validate();
  if (!(warm_radius_position >= 0.0) || !(warm_radius_angle >= 0.0)) {
    throw InvalidArgument("config: warm-start radii must be >= 0");
  }
  if (bench_frames < 1) throw InvalidArgument("config: bench.frames must be >= 1");
  if (bench_workers.empty()) throw InvalidArgument("config: bench.workers must not be empty");
}

HandDimensions RunConfig::dimensions() const {
  return dimensions_path.empty() ? HandDimensions::defaults() : load_dimensions(dimensions_path);
}

unsigned RunConfig::effective_workers() const { return workers > 0 ? workers : default_worker_count(); }

PsoParams RunConfig::pso_params() const {
  PsoParams p = pso;
  p.seed = seed;
  return p;
}

RunConfig run_config_from_keyvalue(const KeyValueFile& kv, const RunConfig& base) {
  for (const auto& [key, value] : kv.entries()) {
    if (!known_keys().count(key)) throw IoError(kv.source() + ": unknown setting '" + key + "'");
  }
  RunConfig c = base;

  KeyValueFile cam_kv;
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind("camera.", 0) == 0) cam_kv.set(key.substr(7), value);
  }
  c.camera = camera_from_keyvalue(cam_kv, base.camera);

  c.dimensions_path = kv.get_string("dimensions", base.dimensions_path);

  c.cost.match_threshold = kv.get_double("cost.match_threshold", base.cost.match_threshold);
  c.cost.depth_clamp = kv.get_double("cost.depth_clamp", base.cost.depth_clamp);
  c.cost.area_weight = kv.get_double("cost.area_weight", base.cost.area_weight);
  c.cost.collision_weight = kv.get_double("cost.collision_weight", base.cost.collision_weight);
  c.cost.depth_unit = kv.get_double("cost.depth_unit", base.cost.depth_unit);
  c.cost.clamp_at_match = kv.get_bool("cost.clamp_at_match", base.cost.clamp_at_match);

  c.pso.n_particles = static_cast<int>(kv.get_int("pso.particles", base.pso.n_particles));
  c.pso.max_generations = static_cast<int>(kv.get_int("pso.generations", base.pso.max_generations));
  c.pso.stop_threshold = kv.get_double("pso.stop_threshold", base.pso.stop_threshold);
  c.pso.c1 = kv.get_double("pso.c1", base.pso.c1);
  c.pso.c2 = kv.get_double("pso.c2", base.pso.c2);
  c.pso.mutation_period = static_cast<int>(kv.get_int("pso.mutation_period", base.pso.mutation_period));
  c.pso.mutation_fraction = kv.get_double("pso.mutation_fraction", base.pso.mutation_fraction);
  c.pso.per_dimension_random = kv.get_bool("pso.per_dimension_random", base.pso.per_dimension_random);

  const long long workers = kv.get_int("workers", base.workers);
  if (workers < 0) throw IoError(kv.source() + ": field 'workers': must be >= 0");
  c.workers = static_cast<unsigned>(workers);
  c.output_dir = kv.get_string("output", base.output_dir.string());
  const std::string seed_text = kv.get_string("seed", std::to_string(base.seed));
  const auto res = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), c.seed);
  if (res.ec != std::errc() || res.ptr != seed_text.data() + seed_text.size()) {
    throw IoError(kv.source() + ": field 'seed': not an unsigned 64-bit integer: '" + seed_text + "'");
  }

  c.noise.depth_sigma = kv.get_double("noise.depth_sigma", base.noise.depth_sigma);
  c.noise.dropout_prob = kv.get_double("noise.dropout", base.noise.dropout_prob);
  c.noise.mask_flip_prob = kv.get_double("noise.mask_flip", base.noise.mask_flip_prob);
  c.warm_radius_position = kv.get_double("track.radius_position", base.warm_radius_position);
  c.warm_radius_angle = kv.get_double("track.radius_angle", base.warm_radius_angle);
  if (kv.contains("bench.workers")) c.bench_workers = parse_workers(kv.get_string("bench.workers", ""), kv.source());
  c.bench_frames = static_cast<int>(kv.get_int("bench.frames", base.bench_frames));

  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(kv.source() + ": " + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base) {
  return run_config_from_keyvalue(KeyValueFile::load(path), base);
}

KeyValueFile run_config_to_keyvalue(const RunConfig& c) {
  KeyValueFile kv;
  const KeyValueFile cam = camera_to_keyvalue(c.camera);
  for (const auto& [key, value] : cam.entries()) kv.set("camera." + key, value);
  kv.set("dimensions", c.dimensions_path);
  kv.set("cost.match_threshold", c.cost.match_threshold);
  kv.set("cost.depth_clamp", c.cost.depth_clamp);
  kv.set("cost.area_weight", c.cost.area_weight);
  kv.set("cost.collision_weight", c.cost.collision_weight);
  kv.set("cost.depth_unit", c.cost.depth_unit);
  kv.set("cost.clamp_at_match", c.cost.clamp_at_match ? "true" : "false");
  kv.set("pso.particles", std::to_string(c.pso.n_particles));
  kv.set("pso.generations", std::to_string(c.pso.max_generations));
  kv.set("pso.stop_threshold", c.pso.stop_threshold);
  kv.set("pso.c1", c.pso.c1);
  kv.set("pso.c2", c.pso.c2);
  kv.set("pso.mutation_period", std::to_string(c.pso.mutation_period));
  kv.set("pso.mutation_fraction", c.pso.mutation_fraction);
  kv.set("pso.per_dimension_random", c.pso.per_dimension_random ? "true" : "false");
  kv.set("workers", std::to_string(c.workers));
  kv.set("output", c.output_dir.string());
  kv.set("seed", std::to_string(c.seed));
  kv.set("noise.depth_sigma", c.noise.depth_sigma);
  kv.set("noise.dropout", c.noise.dropout_prob);
  kv.set("noise.mask_flip", c.noise.mask_flip_prob);
  kv.set("track.radius_position", c.warm_radius_position);
  kv.set("track.radius_angle", c.warm_radius_angle);
  kv.set("bench.workers", join_workers(c.bench_workers));
  kv.set("bench.frames", std::to_string(c.bench_frames));
  return kv;
}

void save_effective_config(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  RunConfig effective = cfg;
  effective.workers = cfg.effective_workers();
  run_config_to_keyvalue(effective).save(cfg.output_dir / "config.txt");
}

std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  int w = 0, h = 0;
  bool ok = x != std::string::npos;
  if (ok) {
    const auto r1 = std::from_chars(text.data(), text.data() + x, w);
    const auto r2 = std::from_chars(text.data() + x + 1, text.data() + text.size(), h);
    ok = r1.ec == std::errc() && r1.ptr == text.data() + x && r2.ec == std::errc() &&
         r2.ptr == text.data() + text.size() && w > 0 && h > 0;
  }
  if (!ok) throw InvalidArgument("resolution must look like WxH with positive integers, got '" + text + "'");
  return {w, h};
}

}  // namespace handpose::app
