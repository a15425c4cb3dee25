// Independent extended-precision re-evaluation of the closed-form bounds,
// used as an oracle by the unit and acceptance tests. Deliberately written
// against the formulas directly (long double, naive pow) rather than
// sharing any code with the library's log-domain implementation.
#pragma once

#include <cmath>

namespace hp {

inline long double normal_cdf(long double z) { return 0.5L * erfcl(-z / sqrtl(2.0L)); }

// Quantile by bisection on the erfc-based CDF.
inline long double z_critical(long double xi) {
  long double target = 1.0L - xi / 2.0L;
  long double lo = 0.0L, hi = 16.0L;
  for (int it = 0; it < 200; ++it) {
    long double mid = 0.5L * (lo + hi);
    (normal_cdf(mid) < target ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

// Normal CDF by adaptive Simpson integration of the density over [0, z];
// a second, integration-based route for validating the quantile function.
inline long double normal_density(long double t) {
  return expl(-0.5L * t * t) / sqrtl(2.0L * 3.14159265358979323846264338327950288L);
}

inline long double simpson(long double a, long double b, long double fa, long double fb,
                           long double fm, long double whole, int depth) {
  long double m = 0.5L * (a + b);
  long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
  long double flm = normal_density(lm), frm = normal_density(rm);
  long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
  long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
  if (depth <= 0 || fabsl(left + right - whole) < 1e-15L) return left + right;
  return simpson(a, m, fa, fm, flm, left, depth - 1) +
         simpson(m, b, fm, fb, frm, right, depth - 1);
}

inline long double normal_cdf_integrated(long double z) {
  long double sign = z < 0 ? -1.0L : 1.0L;
  z = fabsl(z);
  long double fa = normal_density(0.0L), fb = normal_density(z);
  long double fm = normal_density(0.5L * z);
  long double whole = z / 6.0L * (fa + 4.0L * fm + fb);
  long double integral = simpson(0.0L, z, fa, fb, fm, whole, 40);
  return 0.5L + sign * integral;
}

inline long double z_critical_integrated(long double xi) {
  long double target = 1.0L - xi / 2.0L;
  long double lo = 0.0L, hi = 16.0L;
  for (int it = 0; it < 120; ++it) {
    long double mid = 0.5L * (lo + hi);
    (normal_cdf_integrated(mid) < target ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

inline long double sample_complexity(long double eps, long double xi, long double delta, int d) {
  long double ratio = sqrtl(static_cast<long double>(d)) / delta;
  long double term = powl(9.0L, 2.25L) / 4.0L * powl(ratio, 2.25L * d);
  return (term + 8.0L * logl(2.0L / xi)) / (eps * eps);
}

inline long double interior_error(long double eps, long double xi, long long interior,
                                  long long total) {
  long double p = static_cast<long double>(interior) / static_cast<long double>(total);
  long double slack = z_critical(xi) * sqrtl(p * (1.0L - p) / static_cast<long double>(total));
  return (eps - (1.0L - p) - slack) / (p + slack);
}

}  // namespace hp
