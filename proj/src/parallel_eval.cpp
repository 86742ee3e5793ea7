#include "handpose/parallel_eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "handpose/error.hpp"

namespace handpose {

double pyramid_sum_inplace(std::span<double> values) {
  std::size_t n = values.size();
  if (n == 0) return 0.0;
  while (n > 1) {
    const std::size_t pairs = n / 2;
    for (std::size_t i = 0; i < pairs; ++i) values[i] = values[2 * i] + values[2 * i + 1];
    if (n % 2 != 0) {
      values[pairs] = values[n - 1];
      n = pairs + 1;
    } else {
      n = pairs;
    }
  }
  return values[0];
}

double pyramid_sum(std::span<const double> values) {
  std::vector<double> scratch(values.begin(), values.end());
  return pyramid_sum_inplace(scratch);
}

unsigned default_worker_count() {
  if (const char* env = std::getenv("HANDPOSE_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BatchEvaluator::BatchEvaluator(const Observation& o, const HandDimensions& d, const CostParams& p, unsigned workers) {
  if (workers == 0) throw InvalidArgument("batch evaluator: worker count must be >= 1");
  contexts_.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) contexts_.emplace_back(o, d, p);
}

std::vector<CostBreakdown> BatchEvaluator::evaluate(std::span<const HandPose> poses) {
  std::vector<CostBreakdown> results(poses.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::string error_what;

  const auto work = [&](CostEvaluator& eval) {
    for (std::size_t i = next.fetch_add(1); i < poses.size(); i = next.fetch_add(1)) {
      try {
        results[i] = eval(poses[i]);
      } catch (const std::exception& e) {
        const std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error_what = e.what();
        }
      }
    }
  };

  const std::size_t active = std::min<std::size_t>(contexts_.size(), std::max<std::size_t>(poses.size(), 1));
  if (active <= 1) {
    work(contexts_.front());
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(active - 1);
    for (std::size_t w = 1; w < active; ++w) threads.emplace_back([&, w] { work(contexts_[w]); });
    work(contexts_.front());
  }
  if (error_index != std::numeric_limits<std::size_t>::max()) throw BatchEvaluationError(error_index, error_what);
  return results;
}

BatchObjective BatchEvaluator::objective() {
  return [this](std::span<const std::vector<double>> positions, std::span<double> costs) {
    std::vector<HandPose> poses;
    poses.reserve(positions.size());
    for (const auto& x : positions) {
      if (x.size() != kPoseDims) throw InvalidArgument("batch evaluator: positions must have 26 coordinates");
      PoseVector v{};
      std::copy(x.begin(), x.end(), v.begin());
      poses.push_back(HandPose::from_vector(v));
    }
    const auto results = evaluate(poses);
    for (std::size_t i = 0; i < results.size(); ++i) costs[i] = results[i].total;
  };
}

PhaseTimes BatchEvaluator::phase_times() const {
  PhaseTimes total;
  for (const CostEvaluator& c : contexts_) {
    total.render_seconds += c.phase_times().render_seconds;
    total.objective_seconds += c.phase_times().objective_seconds;
  }
  return total;
}

void BatchEvaluator::reset_phase_times() {
  for (CostEvaluator& c : contexts_) c.reset_phase_times();
}

std::vector<CostBreakdown> evaluate_batch(const EvalBatch& batch, unsigned workers) {
  if (batch.observation == nullptr) throw InvalidArgument("evaluate_batch: no observation");
  BatchEvaluator evaluator(*batch.observation, batch.dims, batch.params, workers);
  return evaluator.evaluate(batch.poses);
}

}  // namespace handpose
