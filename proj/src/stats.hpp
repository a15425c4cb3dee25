#pragma once

namespace certicd {

// z_{xi/2}: the (1 - xi/2) quantile of the standard normal.
double z_critical(double xi);

// Sample-complexity bound for learning the delta-interior:
//   (1/eps^2) * [ (9^{9/4}/4) * (sqrt(d)/delta)^{9d/4} + 8*ln(2/xi) ].
// Evaluated in the log domain; overflow returns +inf ("infeasible").
double sample_complexity_bound(double epsilon, double xi, double delta, int d);

// Tolerable classification error on the delta-interior given an overall
// budget of epsilon. May be <= 0 (condition C1). interior_count == 0
// degenerates the denominator and returns -inf.
double interior_error(double epsilon, double xi, long long interior_count, long long sample_count);

struct BinomialBound {
  double bound = 0;
  bool normal_approx_valid = false;  // m * min(p_hat, 1 - p_hat) >= 5
};

// Wald-style upper confidence bound p_hat + z_{xi/2} * sqrt(p_hat(1-p_hat)/m).
BinomialBound binomial_upper_bound(double p_hat, long long m, double xi);

}  // namespace certicd
