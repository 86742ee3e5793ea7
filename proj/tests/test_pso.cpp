#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "handpose/error.hpp"
#include "handpose/pso.hpp"

using namespace handpose;

namespace {

BoxBounds box(std::size_t dims, double lo, double hi) {
  return {std::vector<double>(dims, lo), std::vector<double>(dims, hi)};
}

BatchObjective pointwise(std::function<double(const std::vector<double>&)> f) {
  return [f](std::span<const std::vector<double>> xs, std::span<double> costs) {
    for (std::size_t i = 0; i < xs.size(); ++i) costs[i] = f(xs[i]);
  };
}

double sphere(const std::vector<double>& x) {
  double s = 0.0;
  for (const double v : x) s += v * v;
  return s;
}

double rastrigin(const std::vector<double>& x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (const double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

bool non_increasing(const std::vector<double>& t) {
  return std::adjacent_find(t.begin(), t.end(), [](double a, double b) { return b > a; }) == t.end();
}

}  // namespace

TEST_CASE("constriction weight") {
  const double psi = 4.1;
  const double by_hand = 2.0 / std::abs(2.0 - psi - std::sqrt(psi * psi - 4.0 * psi));
  CHECK(std::abs(constriction_weight(2.8, 1.3) - by_hand) < 1e-9);
  CHECK(constriction_weight(2.8, 1.3) == doctest::Approx(0.72984).epsilon(1e-5));
  CHECK(std::abs(constriction_weight(2.05, 2.05) - by_hand) < 1e-9);
  CHECK_THROWS_AS(constriction_weight(2.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(constriction_weight(1.0, 1.5), InvalidArgument);
}

TEST_CASE("parameter validation") {
  PsoParams p;
  p.c1 = 2.0;
  p.c2 = 2.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = PsoParams{};
  p.n_particles = 1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = PsoParams{};
  p.mutation_fraction = 1.5;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  BoxBounds inverted = box(2, 1.0, 0.0);
  CHECK_THROWS_AS(init_swarm(inverted, PsoParams{}), InvalidArgument);
}

TEST_CASE("init_swarm") {
  const BoxBounds b = box(26, -3.0, 5.0);
  SUBCASE("zero radius puts every particle on the center") {
    const WarmStart w{std::vector<double>(26, 1.25), std::vector<double>(26, 0.0)};
    const Swarm s = init_swarm(b, PsoParams{}, w);
    for (const Particle& p : s.particles) CHECK(p.position == w.center);
  }
  SUBCASE("warm start keeps particles inside center +/- radius and the box, particle 0 on the center") {
    const WarmStart w{std::vector<double>(26, 4.5), std::vector<double>(26, 1.0)};
    const Swarm s = init_swarm(b, PsoParams{}, w);
    CHECK(s.particles[0].position == w.center);
    for (const Particle& p : s.particles) {
      for (const double x : p.position) {
        CHECK(x >= 3.5);
        CHECK(x <= 5.0);
      }
    }
  }
  SUBCASE("64 particles inside the box, zero velocity, reproducible") {
    PsoParams params;
    params.seed = 99;
    const Swarm s = init_swarm(b, params);
    CHECK(s.particles.size() == 64);
    CHECK(s.generation == 0);
    for (const Particle& p : s.particles) {
      CHECK(p.position.size() == 26);
      for (std::size_t d = 0; d < 26; ++d) {
        CHECK(p.position[d] >= b.lower[d]);
        CHECK(p.position[d] <= b.upper[d]);
        CHECK(p.velocity[d] == 0.0);
      }
    }
    const Swarm again = init_swarm(b, params);
    for (std::size_t i = 0; i < s.particles.size(); ++i) CHECK(s.particles[i].position == again.particles[i].position);
  }
}

TEST_CASE("step") {
  const BoxBounds b = box(3, -10.0, 10.0);
  const auto f = pointwise(sphere);
  SUBCASE("a particle sitting on its own and the global best with no velocity stays put") {
    Swarm s = init_swarm(b, PsoParams{});
    for (Particle& p : s.particles) {
      p.position = {1.5, -2.0, 0.25};
      p.best_position = p.position;
      p.velocity.assign(3, 0.0);
      p.best_cost = sphere(p.position);
    }
    s.global_best = {1.5, -2.0, 0.25};
    s.global_best_cost = sphere(s.global_best);
    step(s, f, PsoParams{});
    for (const Particle& p : s.particles) {
      CHECK(p.position == std::vector<double>{1.5, -2.0, 0.25});
      CHECK(p.velocity == std::vector<double>{0.0, 0.0, 0.0});
    }
  }
  SUBCASE("a coordinate pushed past the wall lands on it with zero velocity") {
    Swarm s = init_swarm(b, PsoParams{});
    for (Particle& p : s.particles) {
      p.position = {9.0, 0.0, 0.0};
      p.best_position = p.position;
      p.velocity = {100.0, 0.0, -0.5};
      p.best_cost = 0.0;
    }
    s.global_best = {9.0, 0.0, 0.0};
    s.global_best_cost = 0.0;
    step(s, f, PsoParams{});
    const double w = constriction_weight(2.8, 1.3);
    for (const Particle& p : s.particles) {
      CHECK(p.position[0] == 10.0);
      CHECK(p.velocity[0] == 0.0);
      CHECK(p.velocity[2] == doctest::Approx(-0.5 * w));
    }
  }
}

TEST_CASE("mutate") {
  const BoxBounds b = box(26, -1.0, 1.0);
  PsoParams params;
  Swarm s = init_swarm(b, params);
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    s.particles[i].best_cost = static_cast<double>(i);  // higher index = worse
    s.particles[i].velocity.assign(26, 0.5);
  }
  const Swarm before = s;

  SUBCASE("fraction 0 leaves the swarm alone") {
    params.mutation_fraction = 0.0;
    mutate(s, params);
    for (std::size_t i = 0; i < s.particles.size(); ++i) CHECK(s.particles[i].position == before.particles[i].position);
  }
  SUBCASE("half of 64: the 32 worst change in finger dims only, the 32 best are untouched") {
    mutate(s, params);
    int altered = 0, untouched = 0;
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
      const Particle& now = s.particles[i];
      const Particle& was = before.particles[i];
      if (now.position == was.position) {
        ++untouched;
        CHECK(i < 32);
        continue;
      }
      ++altered;
      CHECK(i >= 32);
      for (std::size_t d = 0; d < 6; ++d) {
        CHECK(now.position[d] == was.position[d]);
        CHECK(now.velocity[d] == 0.5);
      }
      for (std::size_t d = 6; d < 26; ++d) CHECK(now.velocity[d] == 0.0);
      CHECK(now.best_position == was.best_position);
      CHECK(now.best_cost == was.best_cost);
    }
    CHECK(altered == 32);
    CHECK(untouched == 32);
  }
  SUBCASE("mutated coordinates stay in bounds over 1000 trials") {
    bool ok = true;
    for (int t = 0; t < 1000; ++t) {
      mutate(s, params);
      for (const Particle& p : s.particles) {
        for (std::size_t d = 0; d < 26; ++d) ok = ok && p.position[d] >= -1.0 && p.position[d] <= 1.0;
      }
    }
    CHECK(ok);
  }
  SUBCASE("dimensions beyond the problem size are ignored") {
    Swarm small = init_swarm(box(2, 0.0, 1.0), params);
    const Swarm small_before = small;
    mutate(small, params);
    for (std::size_t i = 0; i < small.particles.size(); ++i) {
      CHECK(small.particles[i].position == small_before.particles[i].position);
    }
  }
}

TEST_CASE("run_pso") {
  SUBCASE("zero objective stops after the first generation") {
    const PsoResult r = run_pso(pointwise([](const auto&) { return 0.0; }), box(4, -1, 1), PsoParams{});
    CHECK(r.generations == 1);
    CHECK(r.best_cost == 0.0);
    CHECK(r.trace.size() == 1);
  }
  SUBCASE("1-D parabola on [-10, 10] reaches 1e-6") {
    PsoParams p;
    p.stop_threshold = 0.0;
    p.seed = 17;
    const PsoResult r = run_pso(pointwise(sphere), box(1, -10, 10), p);
    CHECK(r.generations == 30);
    CHECK(r.best_cost < 1e-6);
  }
  SUBCASE("trace is non-increasing and bounded by max_generations, through mutations") {
    PsoParams p;
    p.stop_threshold = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      p.seed = seed;
      const PsoResult r = run_pso(pointwise(rastrigin), box(26, -5.12, 5.12), p);
      CHECK(r.trace.size() == static_cast<std::size_t>(r.generations));
      CHECK(r.trace.size() <= 30);
      CHECK(non_increasing(r.trace));
      CHECK(r.best_cost == r.trace.back());
      CHECK(rastrigin(r.best_position) == r.best_cost);
    }
  }
  SUBCASE("every evaluated position lies inside the box") {
    const BoxBounds b = box(26, -2.0, 3.0);
    bool ok = true;
    std::size_t evaluations = 0;
    const BatchObjective f = [&](std::span<const std::vector<double>> xs, std::span<double> costs) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t d = 0; d < 26; ++d) ok = ok && xs[i][d] >= b.lower[d] && xs[i][d] <= b.upper[d];
        costs[i] = rastrigin(xs[i]);
        ++evaluations;
      }
    };
    PsoParams p;
    p.stop_threshold = 0.0;
    run_pso(f, b, p);
    CHECK(ok);
    CHECK(evaluations == 64 * 30);
  }
  SUBCASE("identical seeds give bitwise-identical runs; other seeds differ") {
    PsoParams p;
    p.stop_threshold = 0.0;
    p.seed = 5;
    const PsoResult a = run_pso(pointwise(rastrigin), box(8, -5, 5), p);
    const PsoResult b = run_pso(pointwise(rastrigin), box(8, -5, 5), p);
    CHECK(a.trace == b.trace);
    CHECK(a.best_position == b.best_position);
    p.seed = 6;
    CHECK(run_pso(pointwise(rastrigin), box(8, -5, 5), p).best_position != a.best_position);
  }
  SUBCASE("scaling the objective by 2 does not change the search") {
    PsoParams p;
    p.stop_threshold = 0.0;
    p.seed = 12;
    const PsoResult a = run_pso(pointwise(rastrigin), box(6, -5, 5), p);
    const PsoResult b = run_pso(pointwise([](const auto& x) { return 2.0 * rastrigin(x); }), box(6, -5, 5), p);
    CHECK(a.best_position == b.best_position);
  }
  SUBCASE("per-dimension random factors are a separate, reproducible mode") {
    PsoParams p;
    p.stop_threshold = 0.0;
    p.per_dimension_random = true;
    const PsoResult a = run_pso(pointwise(sphere), box(6, -10, 10), p);
    const PsoResult b = run_pso(pointwise(sphere), box(6, -10, 10), p);
    CHECK(a.best_position == b.best_position);
    p.per_dimension_random = false;
    CHECK(run_pso(pointwise(sphere), box(6, -10, 10), p).best_position != a.best_position);
  }
  SUBCASE("NaN costs never become the best") {
    const BatchObjective f = [](std::span<const std::vector<double>> xs, std::span<double> costs) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        costs[i] = xs[i][0] > 0.0 ? std::numeric_limits<double>::quiet_NaN() : sphere(xs[i]);
      }
    };
    PsoParams p;
    p.stop_threshold = 0.0;
    const PsoResult r = run_pso(f, box(2, -1, 1), p);
    CHECK(r.best_position[0] <= 0.0);
    CHECK_FALSE(std::isnan(r.best_cost));
  }
  SUBCASE("warm start on the optimum stops at once with particle 0's cost") {
    const WarmStart w{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    const PsoResult r = run_pso(pointwise(sphere), box(3, -10, 10), PsoParams{}, w);
    CHECK(r.generations == 1);
    CHECK(r.best_cost == 0.0);
    CHECK(r.best_position == w.center);
  }
}
