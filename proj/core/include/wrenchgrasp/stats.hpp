#pragma once

#include <optional>
#include <span>
#include <vector>

namespace wrenchgrasp {

/// Average ranks (1-based), ties share the mean rank.
std::vector<double> ranks(std::span<const double> x);

/// Spearman rank correlation with tie-averaged ranks. Returns nullopt when
/// either series is constant or the sizes differ or are below 2.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct ThresholdFit {
  double a = 0.0;      // slope, 1 / N m
  double b = 0.0;      // 50 % point, N m
  double se_a = 0.0;
  double se_b = 0.0;
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Perfectly separable labels: no finite MLE exists. `a` and the standard
  /// errors are not meaningful; b lies in [b_low, b_high].
  bool separated = false;
  double b_low = 0.0;
  double b_high = 0.0;

  /// a > 0 with the lower 95 % confidence bound above zero. A separated fit
  /// with failures above successes counts as positive.
  bool slope_positive_95() const;
};

/// Maximum-likelihood fit of p(fail | tau) = 1 / (1 + exp(-a (tau - b))) by
/// Newton iterations on (beta0, beta1) with a step tolerance of 1e-8.
/// Throws InvalidInput when only one class is present.
ThresholdFit threshold_fit(const std::vector<double>& tau, const std::vector<bool>& failed);

}  // namespace wrenchgrasp
