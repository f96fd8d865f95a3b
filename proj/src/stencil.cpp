#include "bihar/stencil.hpp"

#include <limits>
#include <stdexcept>

namespace bihar {

std::vector<double> fd_weights(int order, std::span<const double> x)
{
    const int n = static_cast<int>(x.size());
    if (order < 0 || order >= n) throw std::invalid_argument("fd_weights: need more points than order");
    // c[i][k]: weight of x[i] for the k-th derivative
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0, c4 = x[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

std::vector<double> central_weights(int order, int half)
{
    std::vector<double> x;
    for (int i = -half; i <= half; ++i) x.push_back(i);
    return fd_weights(order, x);
}

std::vector<double> derivative(std::span<const double> f, double h, int order, int half)
{
    const auto w = central_weights(order, half);
    double scale = 1.0;
    for (int i = 0; i < order; ++i) scale /= h;
    const std::size_t n = f.size();
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = half; i + half < n; ++i) {
        double acc = 0;
        for (int k = -half; k <= half; ++k) acc += w[k + half] * f[i + k];
        out[i] = acc * scale;
    }
    return out;
}

}  // namespace bihar
