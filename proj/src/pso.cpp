#include "handpose/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "handpose/error.hpp"
#include "handpose/hand_model.hpp"

namespace handpose {

namespace {

double sanitize(double cost) { return std::isnan(cost) ? std::numeric_limits<double>::infinity() : cost; }

void refresh_global_best(Swarm& swarm) {
  for (const Particle& p : swarm.particles) {
    if (p.best_cost < swarm.global_best_cost) {
      swarm.global_best_cost = p.best_cost;
      swarm.global_best = p.best_position;
    }
  }
}

std::vector<double> evaluate_positions(const Swarm& swarm, const BatchObjective& objective) {
  std::vector<std::vector<double>> positions;
  positions.reserve(swarm.particles.size());
  for (const Particle& p : swarm.particles) positions.push_back(p.position);
  std::vector<double> costs(positions.size(), 0.0);
  objective(positions, costs);
  return costs;
}

}  // namespace

std::vector<std::size_t> finger_dimensions() {
  std::vector<std::size_t> dims(kPoseDims - kWristDims);
  std::iota(dims.begin(), dims.end(), kWristDims);
  return dims;
}

void PsoParams::validate() const {
  if (n_particles < 2) throw InvalidArgument("pso: n_particles must be >= 2");
  if (max_generations < 1) throw InvalidArgument("pso: max_generations must be >= 1");
  if (!(c1 + c2 > 4.0)) throw InvalidArgument("pso: c1 + c2 must exceed 4");
  if (!(mutation_fraction >= 0.0 && mutation_fraction <= 1.0)) {
    throw InvalidArgument("pso: mutation_fraction must lie in [0, 1]");
  }
  if (mutation_period < 0) throw InvalidArgument("pso: mutation_period must be >= 0 (0 disables mutation)");
}

double constriction_weight(double c1, double c2) {
  const double psi = c1 + c2;
  if (!(psi > 4.0)) {
    throw InvalidArgument("constriction weight needs c1 + c2 > 4, got " + std::to_string(psi));
  }
  return 2.0 / std::abs(2.0 - psi - std::sqrt(psi * psi - 4.0 * psi));
}

Swarm init_swarm(const BoxBounds& bounds, const PsoParams& params, const std::optional<WarmStart>& warm) {
  params.validate();
  const std::size_t dims = bounds.dims();
  if (bounds.upper.size() != dims) throw InvalidArgument("pso: bounds lower/upper differ in length");
  for (std::size_t d = 0; d < dims; ++d) {
    if (!(bounds.lower[d] <= bounds.upper[d])) throw InvalidArgument("pso: lower bound exceeds upper bound");
  }
  if (warm && (warm->center.size() != dims || warm->radius.size() != dims)) {
    throw InvalidArgument("pso: warm start center/radius must match the bounds dimensionality");
  }

  Swarm s;
  s.bounds = bounds;
  s.rng.seed(params.seed);
  s.global_best_cost = std::numeric_limits<double>::infinity();

  std::vector<double> lo = bounds.lower;
  std::vector<double> hi = bounds.upper;
  std::vector<double> center(dims);
  if (warm) {
    for (std::size_t d = 0; d < dims; ++d) {
      center[d] = std::clamp(warm->center[d], bounds.lower[d], bounds.upper[d]);
      lo[d] = std::clamp(warm->center[d] - warm->radius[d], bounds.lower[d], bounds.upper[d]);
      hi[d] = std::clamp(warm->center[d] + warm->radius[d], bounds.lower[d], bounds.upper[d]);
    }
  }

  s.particles.resize(static_cast<std::size_t>(params.n_particles));
  for (std::size_t i = 0; i < s.particles.size(); ++i) {
    Particle& p = s.particles[i];
    p.position.resize(dims);
    p.velocity.assign(dims, 0.0);
    for (std::size_t d = 0; d < dims; ++d) p.position[d] = uniform_in(s.rng, lo[d], hi[d]);
    if (warm && i == 0) p.position = center;
    p.best_position = p.position;
    p.best_cost = std::numeric_limits<double>::infinity();
  }
  return s;
}

void evaluate_swarm(Swarm& swarm, const BatchObjective& objective) {
  const std::vector<double> costs = evaluate_positions(swarm, objective);
  for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
    Particle& p = swarm.particles[i];
    const double c = sanitize(costs[i]);
    if (c < p.best_cost || p.best_cost == std::numeric_limits<double>::infinity()) {
      p.best_cost = c;
      p.best_position = p.position;
    }
  }
  if (swarm.global_best.empty()) swarm.global_best = swarm.particles.front().best_position;
  refresh_global_best(swarm);
  ++swarm.generation;
}

void step(Swarm& swarm, const BatchObjective& objective, const PsoParams& params) {
  const double w = constriction_weight(params.c1, params.c2);
  const std::size_t dims = swarm.bounds.dims();
  const std::vector<double>& g = swarm.global_best;

  for (Particle& p : swarm.particles) {
    double r1 = 0.0, r2 = 0.0;
    if (!params.per_dimension_random) {
      r1 = uniform01(swarm.rng);
      r2 = uniform01(swarm.rng);
    }
    for (std::size_t d = 0; d < dims; ++d) {
      if (params.per_dimension_random) {
        r1 = uniform01(swarm.rng);
        r2 = uniform01(swarm.rng);
      }
      const double x = p.position[d];
      double v = w * (p.velocity[d] + params.c1 * r1 * (p.best_position[d] - x) + params.c2 * r2 * (g[d] - x));
      double nx = x + v;
      if (nx < swarm.bounds.lower[d]) {
        nx = swarm.bounds.lower[d];
        v = 0.0;
      } else if (nx > swarm.bounds.upper[d]) {
        nx = swarm.bounds.upper[d];
        v = 0.0;
      }
      p.position[d] = nx;
      p.velocity[d] = v;
    }
  }

  const std::vector<double> costs = evaluate_positions(swarm, objective);
  for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
    Particle& p = swarm.particles[i];
    const double c = sanitize(costs[i]);
    if (c < p.best_cost) {
      p.best_cost = c;
      p.best_position = p.position;
    }
  }
  refresh_global_best(swarm);
  ++swarm.generation;
}

void mutate(Swarm& swarm, const PsoParams& params) {
  const std::size_t n = swarm.particles.size();
  const auto count = static_cast<std::size_t>(std::floor(static_cast<double>(n) * params.mutation_fraction));
  if (count == 0) return;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Worst first; ties keep index order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return swarm.particles[a].best_cost > swarm.particles[b].best_cost;
  });
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());

  const std::size_t dims = swarm.bounds.dims();
  for (const std::size_t i : chosen) {
    Particle& p = swarm.particles[i];
    for (const std::size_t d : params.mutation_dims) {
      if (d >= dims) continue;
      p.position[d] = uniform_in(swarm.rng, swarm.bounds.lower[d], swarm.bounds.upper[d]);
      p.velocity[d] = 0.0;
    }
  }
}

PsoResult run_pso(const BatchObjective& objective, const BoxBounds& bounds, const PsoParams& params,
                  const std::optional<WarmStart>& warm) {
  Swarm swarm = init_swarm(bounds, params, warm);
  PsoResult result;
  evaluate_swarm(swarm, objective);
  result.trace.push_back(swarm.global_best_cost);
  while (!(swarm.global_best_cost < params.stop_threshold) && swarm.generation < params.max_generations) {
    if (params.mutation_period > 0 && swarm.generation % params.mutation_period == 0) mutate(swarm, params);
    step(swarm, objective, params);
    result.trace.push_back(swarm.global_best_cost);
  }
  result.best_position = swarm.global_best;
  result.best_cost = swarm.global_best_cost;
  result.generations = swarm.generation;
  return result;
}

}  // namespace handpose
