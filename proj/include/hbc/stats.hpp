#pragma once

#include <array>
#include <span>
#include <vector>

// Window statistics shared by both feature pipelines. Population moments
// (divide by n); quantiles interpolate linearly between order statistics.
namespace hbc::stats {

double mean(std::span<const double> x);
double stddev(std::span<const double> x);
double min(std::span<const double> x);
double max(std::span<const double> x);
double median(std::span<const double> x);
// Median absolute deviation from the median.
double mad(std::span<const double> x);
double quantile(std::span<const double> x, double q);
double iqr(std::span<const double> x);
// Sum of squares divided by n.
double energy(std::span<const double> x);
// Mean absolute value.
double sma(std::span<const double> x);
// Sample skewness m3 / m2^1.5; 0 for constant input.
double skewness(std::span<const double> x);
// Excess kurtosis m4 / m2^2 - 3; 0 for constant input.
double kurtosis(std::span<const double> x);
// Pearson correlation; 0 when either input is constant.
double correlation(std::span<const double> x, std::span<const double> y);
// Shannon entropy (nats) of x normalized to sum 1. x must be non-negative;
// all-zero input has entropy 0.
double shannon_entropy(std::span<const double> x);
// First index of the maximum.
std::size_t argmax(std::span<const double> x);

// Burg estimate of AR coefficients a_1..a_p of the mean-removed series, in
// the prediction convention x[n] = sum_k a_k x[n-k] + e[n]. Coefficients of
// a degenerate (constant or too short) series are zero.
std::vector<double> burg_ar(std::span<const double> x, std::size_t order);

}  // namespace hbc::stats
