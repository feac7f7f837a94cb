#pragma once

namespace wrenchgrasp {

/// Penalty weights (per N m, per N, per rad).
struct CostWeights {
  double w_tau = 1.0;
  double w_s = 1.0;
  double w_alpha = 1.0;

  /// Throws InvalidParameter when a weight is negative or all are zero.
  void validate() const;
};

struct CostBreakdown {
  double c_tau = 0.0;    // N m
  double c_slip = 0.0;   // N
  double c_align = 0.0;  // rad
  double total = 0.0;
};

/// w_tau c_tau + w_s c_slip + w_alpha c_align.
double total_cost(double c_tau, double c_slip, double c_align, const CostWeights& w);

/// Fills in `total` from the components.
CostBreakdown weighted(CostBreakdown components, const CostWeights& w);

}  // namespace wrenchgrasp
