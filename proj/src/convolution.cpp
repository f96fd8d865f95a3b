#include "bihar/convolution.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bihar {

namespace {

constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

// Cell integral ∫_0^h K(t) P(t) dt where P is the cubic through the samples
// at offsets (start, start+1, start+2, start+3) in units of h relative to the
// left end of the cell. Returns the four sample weights.
template <class Kernel>
std::array<double, 4> cell_weights(double h, int start, Kernel&& kernel)
{
    std::array<double, 4> w{};
    for (int g = 0; g < 5; ++g) {
        const double t = 0.5 * h * (kGaussNodes[g] + 1.0);
        const double kt = kernel(t) * 0.5 * h * kGaussWeights[g];
        const double x = t / h;
        for (int a = 0; a < 4; ++a) {
            double l = 1.0;
            for (int b = 0; b < 4; ++b)
                if (b != a) l *= (x - (start + b)) / double(a - b);
            w[a] += kt * l;
        }
    }
    return w;
}

// Stencil start (relative to the cell's left node) keeping all four samples
// inside [first, last].
int stencil_start(std::size_t j, std::size_t first, std::size_t last)
{
    if (last - first < 3) throw std::invalid_argument("convolution needs at least 4 nodes");
    if (j == first) return 0;
    if (j + 2 > last) return static_cast<int>(last) - 3 - static_cast<int>(j);
    return -1;
}

template <class Kernel>
double cell_integral(std::span<const double> f, double h, std::size_t j, std::size_t first,
                     std::size_t last, Kernel&& kernel)
{
    const int st = stencil_start(j, first, last);
    const auto w = cell_weights(h, st, kernel);
    double acc = 0;
    for (int a = 0; a < 4; ++a) acc += w[a] * f[j + st + a];
    return acc;
}

}  // namespace

std::vector<double> forward_convolution(std::span<const double> f, double h, std::size_t first,
                                        std::size_t last, double lambda, int power)
{
    if (last >= f.size() || first >= last) throw std::invalid_argument("forward_convolution: bad range");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> plain(f.size(), nan), weighted(f.size(), nan);
    const double decay = std::exp(lambda * h);
    plain[first] = 0;
    weighted[first] = 0;
    for (std::size_t j = first; j < last; ++j) {
        // kernel measured from the right end of the cell: τ = s_j + t, s_{j+1} - τ = h - t
        const double c0 = cell_integral(f, h, j, first, last,
                                        [&](double t) { return std::exp(lambda * (h - t)); });
        plain[j + 1] = decay * plain[j] + c0;
        if (power == 1) {
            const double c1 = cell_integral(f, h, j, first, last, [&](double t) {
                return (h - t) * std::exp(lambda * (h - t));
            });
            weighted[j + 1] = decay * (weighted[j] + h * plain[j]) + c1;
        }
    }
    return power == 1 ? weighted : plain;
}

std::vector<double> backward_convolution(std::span<const double> f, double h, std::size_t first,
                                         std::size_t last, double lambda)
{
    if (last >= f.size() || first >= last) throw std::invalid_argument("backward_convolution: bad range");
    std::vector<double> out(f.size(), std::numeric_limits<double>::quiet_NaN());
    const double decay = std::exp(-lambda * h);
    out[last] = 0;
    for (std::size_t j = last; j-- > first;) {
        const double c = cell_integral(f, h, j, first, last,
                                       [&](double t) { return std::exp(-lambda * t); });
        out[j] = c + decay * out[j + 1];
    }
    return out;
}

}  // namespace bihar
