#pragma once

// Bounded particle swarm optimizer with a constriction weight and periodic
// re-seeding of the worst particles in a subset of dimensions. Generic over
// the dimensionality; the hand tracker uses 26.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "handpose/rng.hpp"

namespace handpose {

struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dims() const { return lower.size(); }
};

/// Default mutation subset: the 20 finger-angle coordinates (6..25).
std::vector<std::size_t> finger_dimensions();

struct PsoParams {
  int n_particles = 64;
  int max_generations = 30;
  double stop_threshold = 1.0;
  double c1 = 2.8;  // cognitive (personal best)
  double c2 = 1.3;  // social (global best)
  int mutation_period = 3;
  double mutation_fraction = 0.5;
  std::vector<std::size_t> mutation_dims = finger_dimensions();
  bool per_dimension_random = false;  // r1, r2 per coordinate instead of per particle
  std::uint64_t seed = 1;

  /// Throws InvalidArgument on c1 + c2 <= 4, n_particles < 2, fraction outside [0, 1], ...
  void validate() const;
};

/// w = 2 / |2 - psi - sqrt(psi^2 - 4 psi)| with psi = c1 + c2. Requires psi > 4.
double constriction_weight(double c1, double c2);

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_cost = 0.0;
};

struct Swarm {
  std::vector<Particle> particles;
  std::vector<double> global_best;
  double global_best_cost = 0.0;
  int generation = 0;  // number of evaluated generations
  BoxBounds bounds;
  Rng rng;
};

/// Evaluates every position of a batch; costs[i] belongs to positions[i].
using BatchObjective = std::function<void(std::span<const std::vector<double>> positions, std::span<double> costs)>;

/// Optional warm start: particles are drawn in center +/- radius (intersected
/// with the bounds). Particle 0 is placed exactly at the clamped center.
struct WarmStart {
  std::vector<double> center;
  std::vector<double> radius;
};

/// Positions drawn uniformly (or around a warm start), velocities 0. Nothing
/// is evaluated yet; `generation` is 0.
Swarm init_swarm(const BoxBounds& bounds, const PsoParams& params, const std::optional<WarmStart>& warm = std::nullopt);

/// Evaluates the current positions, sets personal bests and the global best,
/// and counts one generation. Used for the first generation.
void evaluate_swarm(Swarm& swarm, const BatchObjective& objective);

/// One velocity/position update, clamp to bounds (zeroing the velocity of
/// any clamped coordinate), evaluation and best updates.
void step(Swarm& swarm, const BatchObjective& objective, const PsoParams& params);

/// Re-draws the mutation coordinates of the worst floor(n * fraction)
/// particles (ranked by personal best cost) uniformly in bounds and zeroes
/// those velocity components. Personal bests are kept.
void mutate(Swarm& swarm, const PsoParams& params);

struct PsoResult {
  std::vector<double> best_position;
  double best_cost = 0.0;
  std::vector<double> trace;  // global best cost after each generation
  int generations = 0;
};

/// Evaluate, then step (mutating after every mutation_period-th generation)
/// until the best cost drops below stop_threshold or max_generations
/// generations have been evaluated.
PsoResult run_pso(const BatchObjective& objective, const BoxBounds& bounds, const PsoParams& params,
                  const std::optional<WarmStart>& warm = std::nullopt);

}  // namespace handpose
