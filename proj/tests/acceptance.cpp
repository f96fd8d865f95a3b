// One PASS/FAIL line per acceptance criterion; timings go to stderr.
#include <iostream>
#include <thread>

#include "bihar/verify.hpp"

int main()
{
    const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto results = bihar::verify::acceptance_suite(jobs);
    bihar::verify::print_results(std::cout, results, &std::cerr);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
