#pragma once

#include <span>

namespace gcm::stats {

double normal_cdf(double x);

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of
/// `sample` and the standard normal CDF.
double ks_distance_normal(std::span<const double> sample);

/// Asymptotic 1% critical value 1.63 / sqrt(n).
double ks_critical_1pct(std::size_t n);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;        ///< divisor n - 1
    double skewness = 0.0;        ///< m3 / m2^1.5 (central moments, divisor n)
    double excess_kurtosis = 0.0; ///< m4 / m2^2 - 3
};

Moments moments(std::span<const double> sample);

double median(std::span<const double> sample);
double mean(std::span<const double> sample);

}  // namespace gcm::stats
