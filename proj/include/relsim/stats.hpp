#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace relsim {

inline double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Sample standard deviation (ddof = 1); 0 for fewer than two samples.
inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline double std_error(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

// Linear-interpolation quantile on sorted data, h = (n-1)p (the "type 7"
// rule used by most numeric stacks).
inline double quantile_type7_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    double h = static_cast<double>(sorted.size() - 1) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= sorted.size() - 1) return sorted[sorted.size() - 1];
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile_type7(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    return quantile_type7_sorted(xs, p);
}

// Kolmogorov-Smirnov distance between an empirical sample and a CDF.
inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_distance of empty sample");
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample of empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Critical value for the two-sample KS test at significance alpha;
// reject when D > c(alpha) * sqrt((n+m)/(n*m)).
inline double ks_two_sample_threshold(std::size_t n, std::size_t m, double alpha) {
    double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

}  // namespace relsim
