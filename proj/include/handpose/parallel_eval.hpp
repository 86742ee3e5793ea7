#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "handpose/cost.hpp"
#include "handpose/pso.hpp"
#include "handpose/reduction.hpp"

namespace handpose {

/// A per-pose failure inside a batch; `index` is the lowest failing position.
class BatchEvaluationError : public std::runtime_error {
 public:
  BatchEvaluationError(std::size_t index, const std::string& what)
      : std::runtime_error("pose " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// HANDPOSE_WORKERS if set and positive, else the hardware concurrency (>= 1).
unsigned default_worker_count();

struct EvalBatch {
  std::span<const HandPose> poses;
  const Observation* observation = nullptr;
  HandDimensions dims = HandDimensions::defaults();
  CostParams params;
};

/// Scores batches of poses against one shared, read-only observation on a
/// fixed number of workers. Each worker keeps its own render buffers across
/// calls. Results do not depend on the worker count: every cost is computed
/// by exactly one worker with the same code path as objective().
class BatchEvaluator {
 public:
  BatchEvaluator(const Observation& o, const HandDimensions& d, const CostParams& p, unsigned workers);

  std::vector<CostBreakdown> evaluate(std::span<const HandPose> poses);

  /// Adapter for the optimizer: positions are flattened 26-vectors, costs are totals.
  BatchObjective objective();

  /// Phase times summed over all workers (CPU-side, not wall clock).
  PhaseTimes phase_times() const;
  void reset_phase_times();

  unsigned workers() const { return static_cast<unsigned>(contexts_.size()); }

 private:
  std::vector<CostEvaluator> contexts_;
};

std::vector<CostBreakdown> evaluate_batch(const EvalBatch& batch, unsigned workers);

}  // namespace handpose
