#include "handpose/cost.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "handpose/error.hpp"
#include "handpose/reduction.hpp"
#include "handpose/render.hpp"

namespace handpose {

namespace {

void require_same_shape(const DepthImage& a, const char* a_name, int w, int h, const char* b_name) {
  if (!a.same_shape(w, h)) {
    throw DimensionMismatch(std::string(a_name) + " is " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                            " but " + b_name + " is " + std::to_string(w) + "x" + std::to_string(h));
  }
}

constexpr std::array<std::pair<Finger, Finger>, 3> kAdjacentPairs = {{
    {Finger::Index, Finger::Middle},
    {Finger::Middle, Finger::Ring},
    {Finger::Ring, Finger::Little},
}};

}  // namespace

void CostParams::validate() const {
  if (!(match_threshold > 0.0) || !(match_threshold <= depth_clamp)) {
    throw InvalidArgument("cost: require 0 < match_threshold <= depth_clamp");
  }
  if (!(area_weight >= 0.0) || !(collision_weight >= 0.0)) throw InvalidArgument("cost: weights must be >= 0");
  if (!(depth_unit > 0.0)) throw InvalidArgument("cost: depth_unit must be > 0");
}

SilhouetteMask match_mask(const DepthImage& rendered, const DepthImage& observed, double match_threshold) {
  require_same_shape(rendered, "rendered depth", observed.width, observed.height, "observed depth");
  SilhouetteMask m(rendered.width, rendered.height);
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    const double r = rendered.data[i];
    const double o = observed.data[i];
    m.data[i] = r != 0.0 && (o == 0.0 || std::abs(r - o) < match_threshold) ? 1 : 0;
  }
  return m;
}

DiscrepancyTerms discrepancy(const Observation& o, const DepthImage& rendered, const CostParams& p,
                             DiscrepancyScratch& scratch) {
  require_same_shape(rendered, "rendered depth", o.depth.width, o.depth.height, "observed depth");
  if (!o.mask.same_shape(o.depth)) {
    throw DimensionMismatch("observation mask and depth differ in size");
  }
  const std::size_t n = rendered.size();
  scratch.depth_diff.resize(n);
  scratch.union_px.resize(n);
  scratch.intersection_px.resize(n);

  const double cap = p.numerator_clamp();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rendered.data[i];
    const double od = o.depth.data[i];
    const bool s = o.mask.data[i] != 0;
    const bool both = r != 0.0 && od != 0.0;
    const double diff = both ? std::abs(od - r) : 0.0;
    const bool m = r != 0.0 && (od == 0.0 || diff < p.match_threshold);
    const bool in_union = s || m;
    scratch.depth_diff[i] = both && in_union ? std::min(diff, cap) : 0.0;
    scratch.union_px[i] = in_union ? 1.0 : 0.0;
    scratch.intersection_px[i] = s && m ? 1.0 : 0.0;
  }

  const double union_sum = pyramid_sum_inplace(scratch.union_px);
  if (union_sum == 0.0) return {};
  const double depth_sum = pyramid_sum_inplace(scratch.depth_diff);
  const double inter_sum = pyramid_sum_inplace(scratch.intersection_px);

  DiscrepancyTerms t;
  t.depth_term = depth_sum / (p.depth_unit * union_sum);
  t.area_term = p.area_weight * (1.0 - 2.0 * inter_sum / (inter_sum + union_sum));
  return t;
}

DiscrepancyTerms discrepancy(const Observation& o, const DepthImage& rendered, const CostParams& p) {
  DiscrepancyScratch scratch;
  return discrepancy(o, rendered, p, scratch);
}

std::array<double, 3> finger_gaps(const HandPose& h, const HandDimensions& d) {
  std::array<double, 3> gaps{};
  for (std::size_t i = 0; i < kAdjacentPairs.size(); ++i) {
    const auto [left, right] = kAdjacentPairs[i];
    gaps[i] = d.rest_separation(left, right) + h.finger(right).mp_abduction - h.finger(left).mp_abduction;
  }
  return gaps;
}

double collision_penalty(const HandPose& h, const HandDimensions& d) {
  double kc = 0.0;
  for (const double phi : finger_gaps(h, d)) kc += -std::min(phi, 0.0);
  return kc;
}

CostEvaluator::CostEvaluator(const Observation& o, const HandDimensions& d, const CostParams& p)
    : observation_(&o), dims_(d), params_(p) {
  params_.validate();
  if (!o.depth.same_shape(o.cam.width, o.cam.height)) {
    throw DimensionMismatch("observation depth is " + std::to_string(o.depth.width) + "x" +
                            std::to_string(o.depth.height) + " but its camera is " + std::to_string(o.cam.width) +
                            "x" + std::to_string(o.cam.height));
  }
}

CostBreakdown CostEvaluator::operator()(const HandPose& h) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  render_depth_into(forward_kinematics(h, dims_), observation_->cam, render_);
  quantize_depth(render_);
  const auto t1 = clock::now();
  const DiscrepancyTerms d = discrepancy(*observation_, render_, params_, scratch_);
  CostBreakdown c;
  c.depth_term = d.depth_term;
  c.area_term = d.area_term;
  c.penalty_term = params_.collision_weight * collision_penalty(h, dims_);
  c.total = c.depth_term + c.area_term + c.penalty_term;
  times_.render_seconds += std::chrono::duration<double>(t1 - t0).count();
  times_.objective_seconds += std::chrono::duration<double>(clock::now() - t1).count();
  return c;
}

CostBreakdown objective(const HandPose& h, const Observation& o, const HandDimensions& d, const CostParams& p) {
  CostEvaluator eval(o, d, p);
  return eval(h);
}

}  // namespace handpose
