#pragma once
/**
 * @file stats.hpp
 * @brief Verification statistics: one- and two-sample Kolmogorov-Smirnov,
 * empirical Wasserstein-1 with a bootstrap half-width, Kendall's tau and
 * chi-square tests.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "hyperlorentz/errors.hpp"
#include "hyperlorentz/random.hpp"

namespace hyperlorentz {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw contract_error("mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw contract_error("variance: need at least two samples");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

inline double standard_error(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

inline std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  return v;
}

/// sup |F_n - F| for sorted samples, as max over order statistics of
/// i/n - F(x_i) and F(x_i) - (i-1)/n.
template <class Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
  if (sorted.empty()) throw contract_error("ks_statistic: empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// KS distance on [0, horizon) for type-I censored data: `sorted_observed`
/// holds the uncensored values (all < horizon) out of `n_total` draws; the
/// remaining draws are only known to exceed the horizon.
template <class Cdf>
double ks_statistic_censored(std::span<const double> sorted_observed, std::size_t n_total, double horizon,
                             Cdf&& cdf) {
  if (n_total == 0 || sorted_observed.size() > n_total) throw contract_error("ks_statistic_censored: bad counts");
  const double n = static_cast<double>(n_total);
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_observed.size(); ++i) {
    const double f = cdf(sorted_observed[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  // left limit at the horizon
  d = std::max(d, std::abs(cdf(horizon) - static_cast<double>(sorted_observed.size()) / n));
  return d;
}

/// Two-sample KS distance between sorted samples.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw contract_error("ks_two_sample: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Asymptotic p-value of a KS distance with effective sample size n_eff
/// (n for one sample, n m / (n + m) for two), with Stephens' correction.
inline double ks_pvalue(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  const double lam = (rn + 0.12 + 0.11 / rn) * d;
  if (lam < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lam * lam);
    sum += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Exact empirical W1 between equal-size samples: mean |a_(i) - b_(i)|.
inline double wasserstein1_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || a.size() != b.size()) throw contract_error("wasserstein1: need equal-length nonempty samples");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

inline double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || a.size() != b.size()) throw contract_error("wasserstein1: need equal-length nonempty samples");
  return wasserstein1_sorted(sorted_copy(a), sorted_copy(b));
}

namespace detail {

/// Resample a sorted sample with replacement and return it sorted, in
/// O(n) via multiplicities.
inline void resample_sorted(std::span<const double> sorted, Rng& rng, std::vector<std::uint32_t>& counts,
                            std::vector<double>& out) {
  const std::size_t n = sorted.size();
  counts.assign(n, 0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0; k < n; ++k) ++counts[pick(rng)];
  out.clear();
  for (std::size_t i = 0; i < n; ++i) out.insert(out.end(), counts[i], sorted[i]);
}

}  // namespace detail

/// Half-width of the percentile bootstrap 95% interval of W1(a, b), both
/// samples resampled independently. Deterministic in `seed`.
inline double bootstrap_w1_half_width(std::span<const double> a, std::span<const double> b, std::size_t replicates,
                                      std::uint64_t seed) {
  if (replicates < 2) throw contract_error("bootstrap_w1_half_width: need at least two replicates");
  const std::vector<double> sa = sorted_copy(a);
  const std::vector<double> sb = sorted_copy(b);
  std::vector<double> stats(replicates);
  std::vector<std::uint32_t> counts;
  std::vector<double> ra, rb;
  for (std::size_t k = 0; k < replicates; ++k) {
    Rng rng = make_stream(seed, k, 0xb0075);
    detail::resample_sorted(sa, rng, counts, ra);
    detail::resample_sorted(sb, rng, counts, rb);
    stats[k] = wasserstein1_sorted(ra, rb);
  }
  std::sort(stats.begin(), stats.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(replicates - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, replicates - 1);
    return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  };
  return 0.5 * (quantile(0.975) - quantile(0.025));
}

namespace detail {

/// Merge sort counting inversions.
inline std::uint64_t sort_count_swaps(std::span<double> v, std::span<double> buf) {
  const std::size_t n = v.size();
  if (n < 2) return 0;
  const std::size_t mid = n / 2;
  std::uint64_t swaps = sort_count_swaps(v.first(mid), buf.first(mid)) +
                        sort_count_swaps(v.subspan(mid), buf.subspan(mid));
  std::size_t i = 0, j = mid, k = 0;
  while (i < mid && j < n) {
    if (v[j] < v[i]) {
      buf[k++] = v[j++];
      swaps += mid - i;
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < n) buf[k++] = v[j++];
  std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n), v.begin());
  return swaps;
}

}  // namespace detail

/// Kendall's tau-a of paired samples without ties, O(n log n).
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw contract_error("kendall_tau: need two equal samples of size >= 2");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const std::uint64_t discordant = detail::sort_count_swaps(ys, buf);
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return 1.0 - 2.0 * static_cast<double>(discordant) / pairs;
}

/// Standard deviation of tau under independence.
inline double kendall_tau_sd(std::size_t n) {
  const double m = static_cast<double>(n);
  return std::sqrt(2.0 * (2.0 * m + 5.0) / (9.0 * m * (m - 1.0)));
}

/// Pearson chi-square goodness-of-fit p-value; `expected` are cell counts.
inline double chi_square_gof_pvalue(std::span<const double> observed, std::span<const double> expected,
                                    std::size_t fitted_params = 0) {
  if (observed.size() != expected.size() || observed.size() < fitted_params + 2)
    throw contract_error("chi_square_gof_pvalue: bad cell counts");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  const double dof = static_cast<double>(observed.size() - 1 - fitted_params);
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

/// Chi-square test of independence for a rows x cols contingency table.
inline double chi_square_independence_pvalue(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2 || table[0].size() < 2) throw contract_error("chi_square_independence_pvalue: table too small");
  const std::size_t cols = table[0].size();
  std::vector<double> rsum(rows, 0.0), csum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      rsum[i] += table[i][j];
      csum[j] += table[i][j];
      total += table[i][j];
    }
  double stat = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = rsum[i] * csum[j] / total;
      stat += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  const double dof = static_cast<double>((rows - 1) * (cols - 1));
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

}  // namespace hyperlorentz
