#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bihar {

/// Running integrals against exponential kernels on a uniform grid with
/// spacing h. f is interpolated by local cubics and each cell integral is
/// done with 5-point Gauss-Legendre.
///
/// forward: out[j] = ∫_{s_first}^{s_j} (s_j-τ)^power e^{λ(s_j-τ)} f(τ) dτ,
/// for j in [first, last]; power is 0 or 1. Entries outside are NaN.
std::vector<double> forward_convolution(std::span<const double> f, double h, std::size_t first,
                                        std::size_t last, double lambda, int power = 0);

/// backward: out[j] = ∫_{s_j}^{s_last} e^{λ(s_j-τ)} f(τ) dτ for j in [first, last].
std::vector<double> backward_convolution(std::span<const double> f, double h, std::size_t first,
                                         std::size_t last, double lambda);

}  // namespace bihar
