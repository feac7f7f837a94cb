#include "wrenchgrasp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "wrenchgrasp/errors.hpp"

namespace wrenchgrasp {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

bool ThresholdFit::slope_positive_95() const {
  if (separated) return b_low <= b_high && a > 0.0;
  return a - 1.96 * se_a > 0.0;
}

namespace {

double log_likelihood(const std::vector<double>& x, const std::vector<bool>& y, double b0, double b1) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = b0 + b1 * x[i];
    // log sigma(z) = -softplus(-z), log(1 - sigma(z)) = -softplus(z)
    const double sp_pos = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    const double sp_neg = sp_pos - z;
    ll += y[i] ? -sp_neg : -sp_pos;
  }
  return ll;
}

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

ThresholdFit threshold_fit(const std::vector<double>& tau, const std::vector<bool>& failed) {
  if (tau.size() != failed.size()) throw InvalidInput("tau and outcome lengths differ");
  double max_ok = -INFINITY, min_ok = INFINITY, max_fail = -INFINITY, min_fail = INFINITY;
  std::size_t n_fail = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!std::isfinite(tau[i])) throw InvalidInput("non-finite torque value");
    if (failed[i]) {
      ++n_fail;
      max_fail = std::max(max_fail, tau[i]);
      min_fail = std::min(min_fail, tau[i]);
    } else {
      max_ok = std::max(max_ok, tau[i]);
      min_ok = std::min(min_ok, tau[i]);
    }
  }
  if (n_fail == 0 || n_fail == tau.size()) throw InvalidInput("threshold fit needs both outcome classes");

  ThresholdFit fit;
  if (max_ok <= min_fail || max_fail <= min_ok) {
    fit.separated = true;
    const bool rising = max_ok <= min_fail;
    fit.a = rising ? 1.0 : -1.0;
    fit.b_low = rising ? max_ok : max_fail;
    fit.b_high = rising ? min_fail : min_ok;
    fit.b = 0.5 * (fit.b_low + fit.b_high);
    fit.converged = true;
    return fit;
  }

  // Newton on standardized torque, mapped back at the end.
  const double n = static_cast<double>(tau.size());
  const double mean = std::accumulate(tau.begin(), tau.end(), 0.0) / n;
  double var = 0.0;
  for (double t : tau) var += (t - mean) * (t - mean);
  const double sd = std::sqrt(var / n) > 0 ? std::sqrt(var / n) : 1.0;
  std::vector<double> x(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) x[i] = (tau[i] - mean) / sd;

  Eigen::Vector2d beta = Eigen::Vector2d::Zero();
  double ll = log_likelihood(x, failed, 0.0, 0.0);
  for (fit.iterations = 0; fit.iterations < 200; ++fit.iterations) {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = sigmoid(beta[0] + beta[1] * x[i]);
      const Eigen::Vector2d phi(1.0, x[i]);
      g += ((failed[i] ? 1.0 : 0.0) - p) * phi;
      h += p * (1.0 - p) * phi * phi.transpose();
    }
    Eigen::Vector2d step = h.ldlt().solve(g);
    double scale = 1.0;
    double next = log_likelihood(x, failed, beta[0] + step[0], beta[1] + step[1]);
    while (next < ll - 1e-12 && scale > 1e-6) {
      scale *= 0.5;
      next = log_likelihood(x, failed, beta[0] + scale * step[0], beta[1] + scale * step[1]);
    }
    beta += scale * step;
    ll = next;
    if ((scale * step).norm() < 1e-8) {
      fit.converged = true;
      ++fit.iterations;
      break;
    }
  }

  const double b1 = beta[1] / sd;
  const double b0 = beta[0] - beta[1] * mean / sd;
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (double t : tau) {
    const double p = sigmoid(b0 + b1 * t);
    const Eigen::Vector2d phi(1.0, t);
    h += p * (1.0 - p) * phi * phi.transpose();
  }
  const Eigen::Matrix2d cov = h.inverse();
  fit.a = b1;
  fit.b = -b0 / b1;
  fit.se_a = std::sqrt(std::max(0.0, cov(1, 1)));
  const Eigen::Vector2d grad_b(-1.0 / b1, b0 / (b1 * b1));
  fit.se_b = std::sqrt(std::max(0.0, grad_b.dot(cov * grad_b)));
  fit.log_likelihood = ll;
  return fit;
}

}  // namespace wrenchgrasp
