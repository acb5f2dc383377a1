#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace rsc {

// Beta distribution parameters; both strictly positive and finite.
struct BetaParams {
  BetaParams(double alpha_in, double beta_in);
  double alpha;
  double beta;
};

double beta_mean(const BetaParams& params) noexcept;
double beta_variance(const BetaParams& params) noexcept;

// Regularized incomplete beta function I_x(alpha, beta), evaluated by the
// continued-fraction expansion (modified Lentz). The symmetric identity
// I_x(a,b) = 1 - I_{1-x}(b,a) covers x past the convergence midpoint
// (a+1)/(a+b+2). Absolute error stays below 1e-10 over alpha, beta <= 1e3.
double beta_cdf(const BetaParams& params, double x);

// Inverse CDF by bisection; p in (0, 1). Returns x with
// |beta_cdf(params, x) - p| <= 1e-9.
double beta_quantile(const BetaParams& params, double p);

// Method-of-moments fit from summary statistics:
//   k = mean*(1-mean)/variance - 1, alpha = mean*k, beta = (1-mean)*k.
// Throws DegenerateSample when variance is zero or >= mean*(1-mean).
BetaParams fit_beta_moments(double mean, double variance);

// Method-of-moments fit from raw samples. Requires at least two samples,
// each strictly inside (0, 1); variance is the population moment (/n).
BetaParams fit_beta_mom(std::span<const double> samples);

// Linear-interpolation sample quantile on the order statistics
// (h = (n-1)*p, interpolating between floor(h) and floor(h)+1).
double empirical_quantile(std::vector<double> samples, double p);

// Fixed 20-bin histogram over [0, 1]; the top edge closes the last bin.
struct IouHistogram {
  static constexpr int kBinCount = 20;
  std::array<std::uint64_t, kBinCount> counts{};
  std::uint64_t total = 0;
};
IouHistogram iou_histogram(std::span<const double> samples);

struct CalibrationResult {
  BetaParams params;
  double sample_mean;
  double sample_variance;
  double threshold;  // beta_quantile(params, 1 - target_availability)
  double target_availability;
};

// Fits the samples by moments and inverts the fitted CDF so that, under the
// fitted model, P(IoU >= threshold) equals target_availability.
// target_availability must lie in (0, 1).
CalibrationResult calibrate_threshold(std::span<const double> samples,
                                      double target_availability);

}  // namespace rsc
