#include "mage/stats.hpp"

#include "mage/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mage {

namespace {

struct Ranked {
    double rank_sum_first = 0.0;
    double tie_term = 0.0;
};

Ranked rank(std::span<const double> a, std::span<const double> b)
{
    struct Entry {
        double value;
        bool first;
    };
    std::vector<Entry> pooled;
    pooled.reserve(a.size() + b.size());
    for (double x : a) pooled.push_back({x, true});
    for (double y : b) pooled.push_back({y, false});
    std::stable_sort(pooled.begin(), pooled.end(), [](const Entry& l, const Entry& r) { return l.value < r.value; });

    Ranked out;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) {
            ++j;
        }
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        const double t = static_cast<double>(j - i);
        out.tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].first) {
                out.rank_sum_first += mid;
            }
        }
        i = j;
    }
    return out;
}

double sigma(std::size_t n1, std::size_t n2, double tie_term)
{
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    const double n = a + b;
    double var = a * b / 12.0 * (n + 1.0);
    if (n > 1.0) {
        var -= a * b / 12.0 * tie_term / (n * (n - 1.0));
    }
    return std::sqrt(std::max(var, 0.0));
}

} // namespace

double normal_two_tailed_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

double normal_critical_value(double alpha)
{
    // Bisection on the two-tailed p; monotone and exact to double precision.
    double lo = 0.0;
    double hi = 40.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (normal_two_tailed_p(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> acceptance_region(std::size_t n1, std::size_t n2, double alpha, double tie_term)
{
    const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    const double half = normal_critical_value(alpha) * sigma(n1, n2, tie_term);
    return {mu - half, mu + half};
}

UTestResult mann_whitney_u(std::span<const double> sample1, std::span<const double> sample2)
{
    if (sample1.empty() || sample2.empty()) {
        throw EmptySample();
    }
    const auto n1 = sample1.size();
    const auto n2 = sample2.size();
    const auto ranked = rank(sample1, sample2);
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);

    UTestResult r;
    r.u1 = ranked.rank_sum_first - a * (a + 1.0) / 2.0;
    r.u2 = a * b - r.u1;
    r.u = r.u1;

    const double mu = a * b / 2.0;
    const double s = sigma(n1, n2, 0.0);
    const double diff = r.u - mu;
    if (s > 0.0) {
        const double corrected = diff > 0.0 ? diff - 0.5 : (diff < 0.0 ? diff + 0.5 : 0.0);
        r.z = corrected / s;
    }
    r.p_two_tailed = std::min(1.0, normal_two_tailed_p(r.z));
    r.acceptance_region_u = acceptance_region(n1, n2, 0.05, ranked.tie_term);
    r.reject_null = r.p_two_tailed < kRejectThreshold;
    return r;
}

} // namespace mage
