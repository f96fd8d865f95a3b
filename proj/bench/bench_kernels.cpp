// Wall-clock comparison of the OpenMP kernels against their serial versions.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <thread>

#include "bihar/kernels.hpp"

using namespace bihar;

namespace {

double best_of(int reps, const std::function<void()>& f)
{
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel)
{
    std::printf("%-22s %10.4f %10.4f %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv)
{
    const int jobs = argc > 1 ? std::atoi(argv[1]) : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int reps = 3;
    std::printf("jobs = %d, best of %d\n", jobs, reps);
    std::printf("%-22s %10s %10s %9s\n", "kernel", "serial s", "parallel s", "speedup");

    std::size_t sink = 0;
    const double ls = best_of(reps, [&] { sink += ladder_sweep_serial(13, 120).size(); });
    const double lp = best_of(reps, [&] { sink += ladder_sweep(13, 120, jobs).size(); });
    row("ladder sweep 13..120", ls, lp);

    const std::vector<double> off = {0.0, 0.1, 0.5, 1, 2, 5, 10, 20, 50, 100};
    const double gs = best_of(reps, [&] { sink += spectrum_grid_serial(13, 200, off).size(); });
    const double gp = best_of(reps, [&] { sink += spectrum_grid(13, 200, off, jobs).size(); });
    row("spectrum grid", gs, gp);

    const double ss = best_of(reps, [&] { sink += sign_criterion_samples_serial(2000, 1).size(); });
    const double sp = best_of(reps, [&] { sink += sign_criterion_samples(2000, 1, jobs).size(); });
    row("sign samples x2000", ss, sp);
    return sink == 0;
}
