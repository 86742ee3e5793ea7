#pragma once

#include <vector>

#include "handpose/hand_model.hpp"
#include "handpose/image.hpp"
#include "handpose/observation.hpp"

namespace handpose {

struct CostParams {
  double match_threshold = 10.0;  // d_m, mm: rendered depth "matches" the observation below this
  double depth_clamp = 40.0;      // d_M, mm: per-pixel depth difference cap
  double area_weight = 20.0;      // lambda
  double collision_weight = 10.0; // lambda_k
  double depth_unit = 10.0;       // mm per depth-term unit (1 unit = 1 cm)
  bool clamp_at_match = false;    // cap the depth difference at d_m instead of d_M

  /// Throws InvalidArgument unless 0 < d_m <= d_M, weights >= 0, unit > 0.
  void validate() const;
  double numerator_clamp() const { return clamp_at_match ? match_threshold : depth_clamp; }
};

struct DiscrepancyTerms {
  double depth_term = 0.0;
  double area_term = 0.0;
};

struct CostBreakdown {
  double depth_term = 0.0;
  double area_term = 0.0;
  double penalty_term = 0.0;  // collision_weight * kc
  double total = 0.0;

  bool operator==(const CostBreakdown&) const = default;
};

/// Pixel is 1 where the render is defined and either the observed depth is
/// undefined or |rendered - observed| < d_m. Throws DimensionMismatch.
SilhouetteMask match_mask(const DepthImage& rendered, const DepthImage& observed, double match_threshold);

/// Working buffers for discrepancy evaluation, reused across calls.
struct DiscrepancyScratch {
  std::vector<double> depth_diff;
  std::vector<double> union_px;
  std::vector<double> intersection_px;
};

/// Depth and silhouette-overlap terms of the objective.
///
///   depth_term = sum min(|o_d - r_d|, d_M) / (unit * sum(o_s | r_m))
///   area_term  = lambda * (1 - 2 sum(o_s & r_m) / (sum(o_s & r_m) + sum(o_s | r_m)))
///
/// The depth sum runs over pixels of (o_s | r_m) where both depths are
/// defined. Both terms are 0 when the union is empty. All sums use
/// pyramid_sum in row-major pixel order.
DiscrepancyTerms discrepancy(const Observation& o, const DepthImage& rendered, const CostParams& p);
DiscrepancyTerms discrepancy(const Observation& o, const DepthImage& rendered, const CostParams& p,
                             DiscrepancyScratch& scratch);

/// Sum over the adjacent non-thumb pairs (index, middle), (middle, ring),
/// (ring, little) of max(-phi, 0), where
///   phi = rest_separation + abduction(right) - abduction(left)   [degrees].
/// Zero iff no adjacent pair crosses.
double collision_penalty(const HandPose& h, const HandDimensions& d = HandDimensions::defaults());

/// Per-pair phi values, in pair order.
std::array<double, 3> finger_gaps(const HandPose& h, const HandDimensions& d);

/// Wall time spent in each half of an evaluation, accumulated per evaluator.
struct PhaseTimes {
  double render_seconds = 0.0;     // forward kinematics, ray casting, quantization
  double objective_seconds = 0.0;  // discrepancy and collision terms
};

/// Scores candidate poses against one observation. Owns its render and
/// reduction buffers, so one instance must not be shared between threads.
class CostEvaluator {
 public:
  CostEvaluator(const Observation& o, const HandDimensions& d, const CostParams& p);

  CostBreakdown operator()(const HandPose& h);

  /// Quantized depth render of the last evaluated pose.
  const DepthImage& last_render() const { return render_; }
  const PhaseTimes& phase_times() const { return times_; }
  void reset_phase_times() { times_ = {}; }

 private:
  const Observation* observation_;
  HandDimensions dims_;
  CostParams params_;
  DepthImage render_;
  DiscrepancyScratch scratch_;
  PhaseTimes times_;
};

/// E(h) = depth_term + area_term + collision_weight * kc(h). The render is
/// quantized to whole millimeters like the stored observations.
CostBreakdown objective(const HandPose& h, const Observation& o, const HandDimensions& d, const CostParams& p);

}  // namespace handpose
