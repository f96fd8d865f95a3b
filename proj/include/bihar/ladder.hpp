#pragma once

#include <vector>

namespace bihar {

/// The exponents p_c = p_1 < ... < p_N at which λ2/λ3 crosses an integer.
struct CriticalLadder {
    int n = 0;
    double p_c = 0;
    /// rungs[k-1] = p_k; rungs[0] == p_c.
    std::vector<double> rungs;
    int N = 0;
    /// tail_limits[k-1] = lim R_k(p)/p^4 for k = 1..N+1.
    std::vector<double> tail_limits;
};

/// Largest probe used when searching for p_c before declaring p_c = inf.
inline constexpr double kPcProbeLimit = 1e6;

/// Unique p > (n+4)/(n-4) with p Q4(4/(p-1)) = Q4((n-4)/2).
/// Throws NoPcValue for n <= 12 and InvalidParams for n < 5.
double compute_pc(int n);

/// R_k(p) = (p-1)^4 [Q4(((k-1)/(k+1)) 4/(p-1) + (n-4)/(k+1)) - p Q4(4/(p-1))],
/// with the p -> 1 limit substituted at p = 1.
double rk_eval(int n, int k, double p);

/// lim_{p->inf} R_k(p)/p^4 = Q4((n-4)/(k+1)) - 8(n-2)(n-4).
double tail_limit(int n, int k);

/// F(k) = 2(k+1)^4/(n-4) · tail_limit, a quartic in real k; F(-1) = 2(n-4)^3.
double f_quartic(int n, double k);

/// floor((n-10)/2) for 13 <= n <= 19, floor((n-9)/2) for n >= 20.
int ladder_length_formula(int n);

struct ParityReport {
    int n = 0;
    double k = 0;
    double direct = 0;    ///< F((n-9)/2)
    double factored = 0;  ///< (n-1)/2 (n^3 - 33n^2 + 312n - 892)
    double rel_diff = 0;
    bool agree = false;
    bool positive = false;
    bool expected_positive = false;

    bool ok() const { return agree && positive == expected_positive; }
};

/// Odd n >= 13 only.
ParityReport parity_boundary_check(int n);

/// Number of sign changes of R_k on a geometric grid over (from, to].
int count_sign_changes(int n, int k, double from, double to, int points);

/// Builds the ladder and cross-checks its length against the closed form
/// and each rung's uniqueness by grid sign counting. Throws LadderMismatch
/// on any disagreement.
CriticalLadder compute_ladder(int n, int uniqueness_grid = 2000);

}  // namespace bihar
