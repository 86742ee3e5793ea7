#pragma once

#include <span>

namespace handpose {

/// Pairwise tree ("pyramid") sum with a fixed bracketing: every level adds
/// adjacent pairs (v[0]+v[1], v[2]+v[3], ...) and carries an odd tail element
/// up unchanged, until one value remains. Empty input sums to 0. The result
/// depends only on the input order, never on how the work is scheduled.
double pyramid_sum(std::span<const double> values);

/// Same bracketing, reducing in place; `values` is overwritten.
double pyramid_sum_inplace(std::span<double> values);

}  // namespace handpose
