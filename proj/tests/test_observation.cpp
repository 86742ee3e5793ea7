#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "handpose/error.hpp"
#include "handpose/observation.hpp"
#include "handpose/pgm.hpp"
#include "handpose/render.hpp"

using namespace handpose;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("handpose_test_obs_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

HandPose flat_hand(double z_m) {
  HandPose h;
  h.wrist.z = z_m;
  return h;
}

std::size_t count_nonzero(const DepthImage& d) {
  std::size_t n = 0;
  for (const double z : d.data) n += z != 0.0;
  return n;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

}  // namespace

TEST_CASE("flat hand at 1 m: visible, depths within the hand's extent") {
  const Observation o = synthesize_observation(flat_hand(1.0), HandDimensions::defaults(), CameraIntrinsics{});
  CHECK(count_nonzero(o.depth) > 0);
  for (std::size_t i = 0; i < o.depth.size(); ++i) {
    const double z = o.depth.data[i];
    CHECK(o.mask.data[i] == (z != 0.0 ? 1 : 0));
    if (z != 0.0) {
      CHECK(z >= 900.0);
      CHECK(z <= 1100.0);
      CHECK(z == std::round(z));
    }
  }
}

TEST_CASE("hand in front of the near plane gives an empty observation") {
  const Observation o = synthesize_observation(flat_hand(0.1), HandDimensions::defaults(), CameraIntrinsics{});
  CHECK(count_nonzero(o.depth) == 0);
}

TEST_CASE("synthesis is deterministic") {
  HandPose h = flat_hand(0.8);
  h.wrist.rot_y = 25;
  h.finger(Finger::Thumb) = {40, 20, 30, 10};
  const auto d = HandDimensions::defaults();
  CHECK(synthesize_observation(h, d, CameraIntrinsics{}) == synthesize_observation(h, d, CameraIntrinsics{}));
}

TEST_CASE("apply_noise") {
  const Observation clean = synthesize_observation(flat_hand(0.7), HandDimensions::defaults(), CameraIntrinsics{});
  SUBCASE("identity spec returns the observation unchanged") {
    Rng rng(1);
    CHECK(apply_noise(clean, NoiseSpec{}, rng) == clean);
  }
  SUBCASE("dropout 1 clears every depth and keeps the mask") {
    Rng rng(2);
    const Observation o = apply_noise(clean, NoiseSpec{0.0, 1.0, 0.0}, rng);
    CHECK(count_nonzero(o.depth) == 0);
    CHECK(o.mask == clean.mask);
  }
  SUBCASE("gaussian depth noise has the requested spread") {
    // A large flat plane gives at least 1e4 valid pixels.
    Observation plane;
    plane.cam = CameraIntrinsics::kinect(160, 120);
    plane.depth = DepthImage(160, 120, 1000.0);
    plane.mask = SilhouetteMask(160, 120, 1);
    Rng rng(3);
    const Observation o = apply_noise(plane, NoiseSpec{5.0, 0.0, 0.0}, rng);
    double sum = 0, sum2 = 0;
    const double n = static_cast<double>(o.depth.size());
    for (const double z : o.depth.data) {
      sum += z - 1000.0;
      sum2 += (z - 1000.0) * (z - 1000.0);
    }
    const double sd = std::sqrt(sum2 / n - (sum / n) * (sum / n));
    CHECK(sd >= 4.5);
    CHECK(sd <= 5.5);
  }
  SUBCASE("noise never produces a fake dropout and is reproducible") {
    Observation near;
    near.cam = CameraIntrinsics{};
    near.depth = DepthImage(160, 120, 1.0);
    near.mask = SilhouetteMask(160, 120, 1);
    Rng a(4), b(4);
    const Observation x = apply_noise(near, NoiseSpec{50.0, 0.0, 0.0}, a);
    CHECK(count_nonzero(x.depth) == x.depth.size());
    CHECK(x == apply_noise(near, NoiseSpec{50.0, 0.0, 0.0}, b));
  }
  SUBCASE("invalid specs are rejected") {
    Rng rng(5);
    CHECK_THROWS_AS(apply_noise(clean, NoiseSpec{-1.0, 0.0, 0.0}, rng), InvalidArgument);
    CHECK_THROWS_AS(apply_noise(clean, NoiseSpec{0.0, 1.5, 0.0}, rng), InvalidArgument);
  }
}

TEST_CASE("save then load reproduces the observation exactly") {
  const fs::path dir = scratch_dir("roundtrip");
  HandPose h = flat_hand(0.9);
  h.finger(Finger::Middle).pip = 70;
  Rng rng(8);
  const Observation o =
      apply_noise(synthesize_observation(h, HandDimensions::defaults(), CameraIntrinsics{}), NoiseSpec{3, 0.1, 0.01}, rng);
  const auto paths = ObservationPaths::from_stem(dir / "frame");
  save_observation(o, paths);
  CHECK(paths.mask.filename() == "frame.mask.pgm");
  CHECK(paths.depth.filename() == "frame.depth.pgm");
  CHECK(paths.camera.filename() == "frame.cam");
  CHECK(load_observation(paths) == o);
}

TEST_CASE("mask and depth with different resolutions are rejected") {
  const fs::path dir = scratch_dir("mismatch");
  write_depth_pgm(dir / "d.pgm", DepthImage(160, 120, 1000.0));
  write_mask_pgm(dir / "m.pgm", SilhouetteMask(320, 240, 1));
  CHECK_THROWS_AS(load_observation(dir / "m.pgm", dir / "d.pgm", CameraIntrinsics{}), DimensionMismatch);

  write_mask_pgm(dir / "m2.pgm", SilhouetteMask(160, 120, 1));
  CHECK_THROWS_AS(load_observation(dir / "m2.pgm", dir / "d.pgm", CameraIntrinsics::kinect(320, 240)),
                  DimensionMismatch);
}

TEST_CASE("PGM files") {
  const fs::path dir = scratch_dir("pgm");
  SUBCASE("16-bit depth round trip is exact and big-endian") {
    DepthImage d(3, 2);
    d.data = {0, 1, 258, 65535, 1000, 42};
    write_depth_pgm(dir / "d.pgm", d);
    CHECK(read_depth_pgm(dir / "d.pgm") == d);
    std::ifstream in(dir / "d.pgm", std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), {});
    const std::string header = "P5\n3 2\n65535\n";
    REQUIRE(bytes.size() == header.size() + 12);
    CHECK(bytes.substr(0, header.size()) == header);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 4]) == 1);  // 258 = 0x0102
    CHECK(static_cast<unsigned char>(bytes[header.size() + 5]) == 2);
  }
  SUBCASE("masks are written as 255 and read back as 1") {
    SilhouetteMask m(2, 2);
    m.data = {0, 1, 1, 0};
    write_mask_pgm(dir / "m.pgm", m);
    CHECK(read_mask_pgm(dir / "m.pgm") == m);
  }
  SUBCASE("header comments are skipped") {
    write_bytes(dir / "c.pgm", std::string("P5\n# made by hand\n2 1\n255\n") + '\xff' + '\x00');
    const SilhouetteMask m = read_mask_pgm(dir / "c.pgm");
    CHECK(m.data == std::vector<std::uint8_t>{1, 0});
  }
  SUBCASE("truncated body is an I/O error") {
    write_bytes(dir / "t.pgm", "P5\n4 4\n65535\n\x01\x02\x03");
    CHECK_THROWS_AS(read_depth_pgm(dir / "t.pgm"), IoError);
  }
  SUBCASE("malformed headers name the field") {
    write_bytes(dir / "bad_magic.pgm", "P2\n1 1\n255\n0");
    CHECK_THROWS_WITH_AS(read_mask_pgm(dir / "bad_magic.pgm"), doctest::Contains("magic"), IoError);
    write_bytes(dir / "bad_width.pgm", "P5\nx 1\n255\n0");
    CHECK_THROWS_WITH_AS(read_mask_pgm(dir / "bad_width.pgm"), doctest::Contains("width"), IoError);
    write_bytes(dir / "bad_max.pgm", "P5\n1 1\n255\n0");
    CHECK_THROWS_WITH_AS(read_depth_pgm(dir / "bad_max.pgm"), doctest::Contains("maxval"), IoError);
  }
  SUBCASE("missing file is an I/O error") {
    CHECK_THROWS_AS(read_depth_pgm(dir / "nope.pgm"), IoError);
  }
}

TEST_CASE("camera sidecar round trip and missing fields") {
  const fs::path dir = scratch_dir("cam");
  const CameraIntrinsics cam = CameraIntrinsics::kinect(640, 480);
  CHECK(cam.fx == 525.0);
  CHECK(cam.cx == 320.0);
  save_camera(dir / "a.cam", cam);
  CHECK(load_camera(dir / "a.cam") == cam);
  write_bytes(dir / "b.cam", "fx = 1\nfy = 1\n");
  CHECK_THROWS_WITH_AS(load_camera(dir / "b.cam"), doctest::Contains("cx"), IoError);
  write_bytes(dir / "c.cam", "fx = 1\nfy = 1\ncx = 1\ncy = 1\nwidth = 4\nheight = 4\nz_near = 500\nz_far = 100\n");
  CHECK_THROWS_AS(load_camera(dir / "c.cam"), IoError);
}
