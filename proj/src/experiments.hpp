#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcd.hpp"
#include "scene.hpp"

namespace certicd {

struct InteriorFraction {
  double fraction = 0;
  double ci_half_width = 0;  // Wald half-width at xi = 0.05
};

// Monte-Carlo fraction of uniform samples with clearance >= delta.
InteriorFraction estimate_interior_fraction(const Scene& scene, double delta, long long samples,
                                            std::uint64_t seed);

struct SweepRow {
  double epsilon = 0;
  double delta = 0;
  double p_hat = 0;
  double eps_interior = 0;
  bool feasible = false;  // eps_interior > 0 and Eq.-(1) value finite
  double m_bound = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
};

// One row per (epsilon, delta), deltas ascending within each epsilon. The
// whole sweep shares one sample set (clearances are computed once and
// thresholded per delta), so the p_hat and eps_interior curves are exactly
// monotone in delta.
std::vector<SweepRow> sweep(const Scene& scene, const std::vector<double>& epsilons,
                            const std::vector<double>& delta_grid, double xi, long long samples,
                            std::uint64_t seed);

// CSV with header epsilon,delta,p_hat,eps_interior,m_bound,samples,seed;
// numbers carry 17 significant digits, infeasible rows say "infeasible".
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

struct DeltaMaxEstimate {
  double delta_max = 0;
  bool degenerate = false;  // p(delta) >= 1 - eps for every delta
};

// Bisection for the largest delta with Monte-Carlo p(delta) >= 1 - epsilon.
DeltaMaxEstimate estimate_delta_max(const Scene& scene, double epsilon, long long samples,
                                    std::uint64_t seed, double tolerance);

struct EvalReport {
  long long test_count = 0;
  long long interior_count = 0;   // clearance >= provenance delta
  long long boundary_count = 0;
  long long errors_total = 0;
  long long errors_interior = 0;
  long long errors_boundary = 0;
  long long false_positives = 0;  // free classified forbidden
  long long false_negatives = 0;  // forbidden classified free
  double loss_total = 0;
  double loss_interior = 0;
  double loss_boundary = 0;
  double loss_total_upper = 0;    // Wald upper bounds at provenance xi
  double loss_interior_upper = 0;
  double loss_boundary_upper = 0;
};

// Held-out evaluation on fresh uniform samples. The evaluation stream is
// hash(model training seed, "eval", seed), so it never collides with the
// training stream.
EvalReport evaluate(const TrainedLcd& lcd, const Scene& scene, long long test_count,
                    std::uint64_t seed);

std::string eval_report_text(const EvalReport& rep);

}  // namespace certicd
