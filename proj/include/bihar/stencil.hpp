#pragma once

#include <span>
#include <vector>

namespace bihar {

/// Finite-difference weights for the `order`-th derivative at 0 from samples
/// at `offsets` (Fornberg's recursion).
std::vector<double> fd_weights(int order, std::span<const double> offsets);

/// Weights of the centred stencil on integer offsets -half..half.
std::vector<double> central_weights(int order, int half);

/// `order`-th derivative of uniformly sampled data with a centred
/// (2*half+1)-point stencil. The first and last `half` entries are NaN.
std::vector<double> derivative(std::span<const double> f, double h, int order, int half);

}  // namespace bihar
