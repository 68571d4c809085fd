#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sld::stats {

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased (n-1)
double stderr_mean(std::span<const double> xs);

double normal_cdf(double x);

// Bootstrap standard error of an arbitrary statistic of an n-sample. The
// statistic receives the resampled index list; B=200 default, deterministic
// in (seed).
double bootstrap_stderr(const std::function<double(std::span<const uint64_t>)>& stat,
                        uint64_t n, int B, uint64_t seed);

// Convenience: bootstrap stderr of the plain mean of xs.
double bootstrap_stderr_mean(std::span<const double> xs, int B, uint64_t seed);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);
// Large-sample critical value at level alpha for the two-sample test.
double ks_critical(double alpha, uint64_t n, uint64_t m);

// Least-squares fit of log(y) = c - rate * t; returns the decay rate.
// Non-positive y entries are rejected.
double fit_exp_rate(std::span<const double> t, std::span<const double> y);

// Empirical entropy Ent(w) = mean(w log w) - mean(w) log mean(w) for w >= 0,
// with jackknife bias correction (leave-one-out in O(n)).
double entropy_jackknife(std::span<const double> w);

}  // namespace sld::stats
