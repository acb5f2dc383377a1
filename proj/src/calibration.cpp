#include "rsc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsc/errors.hpp"

namespace rsc {

namespace {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz algorithm. Converges for x <= (a+1)/(a+b+2); the caller
// routes the complementary region through the symmetry identity.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;  // floor keeping the recurrence nonzero

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;

  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double coeff = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + coeff * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + coeff / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + coeff * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + coeff / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

struct Moments {
  double mean;
  double variance;  // population moment (/n)
};

// Two-pass moments; every sample must lie strictly inside (0, 1).
Moments sample_moments(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("beta fit needs at least two samples");
  }
  double sum = 0.0;
  for (double s : samples) {
    if (!std::isfinite(s) || s <= 0.0 || s >= 1.0) {
      throw std::invalid_argument("beta fit samples must lie strictly in (0, 1)");
    }
    sum += s;
  }
  const double mean = sum / static_cast<double>(samples.size());
  double sq = 0.0;
  for (double s : samples) {
    const double d = s - mean;
    sq += d * d;
  }
  return Moments{mean, sq / static_cast<double>(samples.size())};
}

}  // namespace

BetaParams::BetaParams(double alpha_in, double beta_in)
    : alpha(alpha_in), beta(beta_in) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha <= 0.0 || beta <= 0.0) {
    throw std::invalid_argument("beta parameters must be finite and positive");
  }
}

double beta_mean(const BetaParams& params) noexcept {
  return params.alpha / (params.alpha + params.beta);
}

double beta_variance(const BetaParams& params) noexcept {
  const double s = params.alpha + params.beta;
  return params.alpha * params.beta / (s * s * (s + 1.0));
}

double beta_cdf(const BetaParams& params, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("beta_cdf: x must be finite");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  const double a = params.alpha;
  const double b = params.beta;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);

  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_quantile(const BetaParams& params, double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("beta_quantile: p must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  // 200 halvings take the bracket far below double resolution; the early
  // exit at 1e-12 leaves margin under the 1e-9 contract.
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double c = beta_cdf(params, mid);
    if (std::fabs(c - p) <= 1e-12) return mid;
    if (c < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

BetaParams fit_beta_moments(double mean, double variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || mean <= 0.0 || mean >= 1.0) {
    throw std::invalid_argument("fit_beta_moments: mean must lie in (0, 1)");
  }
  const double bound = mean * (1.0 - mean);
  // Constant samples leave a residual variance of a few ulp^2 from the mean
  // rounding; anything this small is zero for fitting purposes (the implied
  // alpha would exceed 1e15, far past where the CDF is computable).
  if (variance <= bound * 1e-15) {
    throw DegenerateSample("sample variance is zero; no Beta fit by moments");
  }
  if (variance >= bound) {
    throw DegenerateSample("sample variance reaches mean*(1-mean); no Beta fit by moments");
  }
  const double k = bound / variance - 1.0;
  return BetaParams(mean * k, (1.0 - mean) * k);
}

BetaParams fit_beta_mom(std::span<const double> samples) {
  const Moments m = sample_moments(samples);
  return fit_beta_moments(m.mean, m.variance);
}

double empirical_quantile(std::vector<double> samples, double p) {
  if (samples.empty()) {
    throw std::invalid_argument("empirical_quantile: no samples");
  }
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("empirical_quantile: p must lie in (0, 1)");
  }
  std::sort(samples.begin(), samples.end());
  const double h = static_cast<double>(samples.size() - 1) * p;
  const std::size_t idx = static_cast<std::size_t>(h);
  if (idx + 1 >= samples.size()) return samples.back();
  const double frac = h - static_cast<double>(idx);
  return samples[idx] + frac * (samples[idx + 1] - samples[idx]);
}

IouHistogram iou_histogram(std::span<const double> samples) {
  IouHistogram hist;
  for (double s : samples) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw std::invalid_argument("iou_histogram: samples must lie in [0, 1]");
    }
    int bin = static_cast<int>(s * IouHistogram::kBinCount);
    if (bin >= IouHistogram::kBinCount) bin = IouHistogram::kBinCount - 1;
    ++hist.counts[bin];
    ++hist.total;
  }
  return hist;
}

CalibrationResult calibrate_threshold(std::span<const double> samples,
                                      double target_availability) {
  if (!(target_availability > 0.0) || !(target_availability < 1.0)) {
    throw std::invalid_argument("calibrate_threshold: target must lie in (0, 1)");
  }
  const Moments m = sample_moments(samples);
  const BetaParams params = fit_beta_moments(m.mean, m.variance);
  const double threshold = beta_quantile(params, 1.0 - target_availability);
  return CalibrationResult{params, m.mean, m.variance, threshold, target_availability};
}

}  // namespace rsc
