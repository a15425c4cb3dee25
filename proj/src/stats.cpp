#include "stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace certicd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation of the inverse standard-normal CDF,
// followed by one Halley step against erfc. Absolute error is at the
// level of double rounding.
double inv_std_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425, p_high = 1 - p_low;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= p_high) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double e = std_normal_cdf(x) - p;
  double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

}  // namespace

double z_critical(double xi) {
  if (!(xi > 0) || !(xi < 1)) fail(Err::InvalidArgument, "xi must lie in (0, 1)");
  return inv_std_normal_cdf(1.0 - xi / 2.0);
}

double sample_complexity_bound(double epsilon, double xi, double delta, int d) {
  if (!(epsilon > 0) || !(epsilon <= 1)) fail(Err::InvalidArgument, "epsilon must lie in (0, 1]");
  if (!(xi > 0) || !(xi < 1)) fail(Err::InvalidArgument, "xi must lie in (0, 1)");
  if (d < 1) fail(Err::InvalidArgument, "dimension must be >= 1");
  double sqrt_d = std::sqrt(static_cast<double>(d));
  if (!(delta > 0) || !(delta <= sqrt_d))
    fail(Err::InvalidArgument, "delta must lie in (0, sqrt(d)]");
  // (9^{9/4}/4) * (sqrt(d)/delta)^{9d/4} in the log domain; the exponent
  // 9d/4 overflows naive evaluation quickly.
  double log_term = (2.25) * std::log(9.0) - std::log(4.0) +
                    (9.0 * d / 4.0) * (std::log(sqrt_d) - std::log(delta));
  if (log_term > 700.0) return kInf;
  double bound = (std::exp(log_term) + 8.0 * std::log(2.0 / xi)) / (epsilon * epsilon);
  return std::isfinite(bound) ? bound : kInf;
}

double interior_error(double epsilon, double xi, long long interior_count, long long sample_count) {
  if (sample_count < 1) fail(Err::InvalidArgument, "sample_count must be >= 1");
  if (interior_count < 0 || interior_count > sample_count)
    fail(Err::InvalidArgument, "interior_count must lie in [0, sample_count]");
  if (!(epsilon > 0) || !(epsilon <= 1)) fail(Err::InvalidArgument, "epsilon must lie in (0, 1]");
  if (interior_count == 0) return -kInf;  // denominator degenerates; always triggers C1
  double z = z_critical(xi);
  double p_hat = static_cast<double>(interior_count) / static_cast<double>(sample_count);
  double slack = z * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(sample_count));
  return (epsilon - (1.0 - p_hat) - slack) / (p_hat + slack);
}

BinomialBound binomial_upper_bound(double p_hat, long long m, double xi) {
  if (!(p_hat >= 0) || !(p_hat <= 1)) fail(Err::InvalidArgument, "p_hat must lie in [0, 1]");
  if (m < 1) fail(Err::InvalidArgument, "m must be >= 1");
  double z = z_critical(xi);
  BinomialBound out;
  out.bound = p_hat + z * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(m));
  out.normal_approx_valid = static_cast<double>(m) * std::min(p_hat, 1.0 - p_hat) >= 5.0;
  return out;
}

}  // namespace certicd
