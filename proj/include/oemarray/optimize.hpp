#pragma once

// Bandwidth maximization for small arrays in the eliminated model.
//
// A profile is the list Gamma_1^j, j = 1..N; every site carries the same
// total rate, Gamma_2^j = Gamma - Gamma_1^j. Mirror-symmetric profiles
// satisfy Gamma_1^{N+1-j} = Gamma - Gamma_1^j, so only floor(N/2) values
// are free (an odd middle site is balanced).

#include <cstdint>
#include <span>
#include <vector>

#include "oemarray/array.hpp"

namespace oem {

struct OptimizationProblem {
    std::size_t n_sites = 1;
    double gamma_total = 0.05;
    double min_efficiency = 0.99;
    bool symmetric = true;
    bool monotone = false;               // also require Gamma_1 nondecreasing along the array
    std::size_t random_starts = 3;      // on top of the 5 structured starts
    std::uint64_t seed = 20240229;
    std::size_t max_evaluations = 4000;  // per start

    void validate() const;
};

struct OptimizationResult {
    std::vector<double> gamma1_per_site;
    double bandwidth = 0.0;
    double passband_min = 0.0;
    double peak = 0.0;
    bool converged = false;  // a feasible point was found
    std::size_t evaluations = 0;
};

std::vector<EliminatedSite> eliminated_profile(std::span<const double> gamma1, double gamma_total);

// Outermost-crossing FWHM of the eliminated cascade.
BandwidthResult evaluate_profile(std::span<const double> gamma1, double gamma_total);

// Full profile from the free half: x_j for j <= N/2, Gamma/2 in the middle
// of odd arrays, Gamma - x_{N+1-j} in the second half.
std::vector<double> mirror_complete(std::span<const double> free, std::size_t n_sites, double gamma_total);

// Multi-start Nelder-Mead with a quadratic penalty on
// max(0, min_efficiency - passband_min) (and on any decrease of Gamma_1 when
// `monotone` is set); returns the best feasible point.
OptimizationResult optimize_couplings(const OptimizationProblem& problem);

// Exhaustive search for N <= 3 at resolution Gamma/400, then polished.
OptimizationResult grid_oracle(const OptimizationProblem& problem);

// Least-squares beta of Gamma/2 (tanh(beta (d - 1/2)) + 1), d = j/(N+1).
// With virtual endpoints, Gamma_1 = 0 at j = 0 and Gamma at j = N + 1 are
// included in the fit. Requires N >= 3 and a nondecreasing profile.
double fit_tanh_beta(std::span<const double> gamma1, double gamma_total, bool virtual_endpoints = true);

}  // namespace oem
