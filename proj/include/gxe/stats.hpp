#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gxe::stats {

/// Type-7 quantile (linear interpolation between order statistics) of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Type-7 quantile of an unsorted sample; the input is copied.
double quantile(std::span<const double> values, double prob);

double median(std::span<const double> values);

double mean(std::span<const double> values);

/// Unbiased sample variance (n - 1 denominator); 0 for fewer than two values.
double variance(std::span<const double> values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov tail probability P(K > x).
double kolmogorov_survival(double x);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace gxe::stats
