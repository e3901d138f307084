#pragma once

#include <span>
#include <utility>

namespace mage {

struct UTestResult {
    double u = 0.0;  // U of the first sample: pairs (x, y) with x > y, ties counting one half
    double u1 = 0.0;
    double u2 = 0.0; // n1 * n2 - u1
    double z = 0.0;  // continuity-corrected normal approximation of u
    double p_two_tailed = 1.0;
    std::pair<double, double> acceptance_region_u{0.0, 0.0}; // 5% region, tie-corrected sigma
    bool reject_null = false;                                // p < 0.01
};

inline constexpr double kRejectThreshold = 0.01;

// Mann-Whitney U with mid-ranks for ties. z and p use the untied sigma; the acceptance region
// uses the tie-corrected sigma of the pooled data. Throws EmptySample.
UTestResult mann_whitney_u(std::span<const double> sample1, std::span<const double> sample2);

// mu +- z_{alpha/2} * sigma. tie_term is sum(t^3 - t) over tie groups of the pooled data;
// zero gives the data-free region.
std::pair<double, double> acceptance_region(std::size_t n1, std::size_t n2, double alpha, double tie_term = 0.0);

double normal_two_tailed_p(double z);

// Upper alpha/2 quantile of the standard normal.
double normal_critical_value(double alpha);

} // namespace mage
