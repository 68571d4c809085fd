#include "sld/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sld/common.hpp"
#include "sld/rng.hpp"

namespace sld::stats {

double mean(std::span<const double> xs) {
  require(!xs.empty(), "mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  require(xs.size() >= 2, "variance: need n >= 2");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double stderr_mean(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double bootstrap_stderr(const std::function<double(std::span<const uint64_t>)>& stat,
                        uint64_t n, int B, uint64_t seed) {
  require(n >= 1 && B >= 2, "bootstrap: need n >= 1, B >= 2");
  const uint64_t s = rng::salted(seed, rng::kSaltBootstrap);
  std::vector<double> reps(B);
  std::vector<uint64_t> idx(n);
  for (int b = 0; b < B; ++b) {
    for (uint64_t i = 0; i < n; ++i) idx[i] = rng::index(s, b, i, n);
    reps[b] = stat(idx);
  }
  const double m = mean(reps);
  double v = 0.0;
  for (double r : reps) v += (r - m) * (r - m);
  return std::sqrt(v / static_cast<double>(B - 1));
}

double bootstrap_stderr_mean(std::span<const double> xs, int B, uint64_t seed) {
  return bootstrap_stderr(
      [&](std::span<const uint64_t> idx) {
        double s = 0.0;
        for (uint64_t i : idx) s += xs[i];
        return s / static_cast<double>(idx.size());
      },
      xs.size(), B, seed);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(double alpha, uint64_t n, uint64_t m) {
  require(alpha > 0.0 && alpha < 1.0, "ks_critical: alpha in (0,1)");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

double fit_exp_rate(std::span<const double> t, std::span<const double> y) {
  require(t.size() == y.size() && t.size() >= 2, "fit_exp_rate: need >= 2 points");
  double st = 0, sl = 0, stt = 0, stl = 0;
  const double n = static_cast<double>(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    require(y[i] > 0.0, "fit_exp_rate: non-positive value");
    const double l = std::log(y[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
  }
  const double denom = n * stt - st * st;
  require(std::abs(denom) > 0.0, "fit_exp_rate: degenerate times");
  return -(n * stl - st * sl) / denom;
}

double entropy_jackknife(std::span<const double> w) {
  const auto n = static_cast<double>(w.size());
  require(w.size() >= 2, "entropy: need n >= 2");
  double sw = 0.0, swl = 0.0;
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  for (double x : w) {
    require(x >= 0.0, "entropy: negative weight");
    sw += x;
    swl += xlogx(x);
  }
  auto ent = [&](double sum_w, double sum_wl, double count) {
    const double mw = sum_w / count;
    return sum_wl / count - xlogx(mw);
  };
  const double full = ent(sw, swl, n);
  double loo_sum = 0.0;
  for (double x : w) loo_sum += ent(sw - x, swl - xlogx(x), n - 1);
  return n * full - (n - 1) * (loo_sum / n);
}

}  // namespace sld::stats
