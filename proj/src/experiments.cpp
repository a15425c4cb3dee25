#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace certicd {
namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> sample_clearances(const Scene& scene, long long samples, std::uint64_t seed) {
  auto configs = scene.sample_uniform(samples, seed);
  std::vector<double> cl(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) cl[i] = scene.clearance(configs[i]);
  return cl;
}

}  // namespace

InteriorFraction estimate_interior_fraction(const Scene& scene, double delta, long long samples,
                                            std::uint64_t seed) {
  if (samples < 1) fail(Err::InvalidArgument, "samples must be >= 1");
  if (delta < 0) fail(Err::InvalidArgument, "delta must be >= 0");
  if (delta == 0) return {1.0, 0.0};  // clearance >= 0 always
  auto cl = sample_clearances(scene, samples, seed);
  long long inside = 0;
  for (double c : cl) inside += c >= delta;
  InteriorFraction out;
  out.fraction = static_cast<double>(inside) / static_cast<double>(samples);
  auto bb = binomial_upper_bound(out.fraction, samples, 0.05);
  out.ci_half_width = bb.bound - out.fraction;
  return out;
}

std::vector<SweepRow> sweep(const Scene& scene, const std::vector<double>& epsilons,
                            const std::vector<double>& delta_grid, double xi, long long samples,
                            std::uint64_t seed) {
  if (samples < 1) fail(Err::InvalidArgument, "samples must be >= 1");
  double sqrt_d = std::sqrt(static_cast<double>(scene.dimension()));
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] >= 0) || !(delta_grid[i] < sqrt_d))
      fail(Err::InvalidArgument, "sweep deltas must lie in [0, sqrt(d))");
    if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
      fail(Err::InvalidArgument, "sweep delta grid must be strictly increasing");
  }
  for (double e : epsilons)
    if (!(e > 0) || !(e < 1)) fail(Err::InvalidArgument, "sweep epsilons must lie in (0, 1)");

  auto cl = sample_clearances(scene, samples, seed);
  std::sort(cl.begin(), cl.end());
  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size() * delta_grid.size());
  for (double eps : epsilons) {
    for (double delta : delta_grid) {
      SweepRow row;
      row.epsilon = eps;
      row.delta = delta;
      row.samples = samples;
      row.seed = seed;
      // interior membership is cl >= delta
      auto it = std::lower_bound(cl.begin(), cl.end(), delta);
      long long inside = static_cast<long long>(cl.end() - it);
      row.p_hat = static_cast<double>(inside) / static_cast<double>(samples);
      row.eps_interior = interior_error(eps, xi, inside, samples);
      if (row.eps_interior > 0 && delta > 0) {
        row.m_bound = sample_complexity_bound(row.eps_interior, xi, delta, scene.dimension());
        row.feasible = std::isfinite(row.m_bound);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "epsilon,delta,p_hat,eps_interior,m_bound,samples,seed\n";
  for (const auto& r : rows) {
    out << fmt17(r.epsilon) << ',' << fmt17(r.delta) << ',' << fmt17(r.p_hat) << ','
        << fmt17(r.eps_interior) << ',' << (r.feasible ? fmt17(r.m_bound) : "infeasible") << ','
        << r.samples << ',' << r.seed << '\n';
  }
}

DeltaMaxEstimate estimate_delta_max(const Scene& scene, double epsilon, long long samples,
                                    std::uint64_t seed, double tolerance) {
  if (!(epsilon > 0) || !(epsilon <= 1)) fail(Err::InvalidArgument, "epsilon must lie in (0, 1]");
  if (samples < 1) fail(Err::InvalidArgument, "samples must be >= 1");
  if (!(tolerance > 0)) fail(Err::InvalidArgument, "tolerance must be positive");
  auto cl = sample_clearances(scene, samples, seed);
  std::sort(cl.begin(), cl.end());
  double sqrt_d = std::sqrt(static_cast<double>(scene.dimension()));
  auto p_of = [&](double delta) {
    auto it = std::lower_bound(cl.begin(), cl.end(), delta);
    return static_cast<double>(cl.end() - it) / static_cast<double>(samples);
  };
  if (p_of(sqrt_d) >= 1.0 - epsilon) return {sqrt_d, true};
  double lo = 0, hi = sqrt_d;  // p(lo) >= 1-eps, p(hi) < 1-eps
  while (hi - lo > tolerance) {
    double mid = 0.5 * (lo + hi);
    (p_of(mid) >= 1.0 - epsilon ? lo : hi) = mid;
  }
  return {lo, false};
}

EvalReport evaluate(const TrainedLcd& lcd, const Scene& scene, long long test_count,
                    std::uint64_t seed) {
  if (test_count < 1) fail(Err::InvalidArgument, "test_count must be >= 1");
  if (scene.dimension() != lcd.fmap.d)
    fail(Err::InvalidArgument, "scene dimension does not match model");
  std::uint64_t eval_seed = derive_seed(lcd.prov.seed, "eval");
  eval_seed = fnv1a64(&seed, sizeof(seed), eval_seed);

  EvalReport rep;
  rep.test_count = test_count;
  auto configs = scene.sample_uniform(test_count, eval_seed);
  for (const auto& x : configs) {
    Probe pr = scene.probe(x);
    int predicted = classify(lcd, x);
    bool interior = pr.clearance >= lcd.prov.delta;
    bool wrong = predicted != pr.label;
    rep.interior_count += interior;
    rep.errors_total += wrong;
    if (wrong) {
      (interior ? rep.errors_interior : rep.errors_boundary) += 1;
      (pr.label < 0 ? rep.false_positives : rep.false_negatives) += 1;
    }
  }
  rep.boundary_count = rep.test_count - rep.interior_count;
  rep.loss_total = static_cast<double>(rep.errors_total) / static_cast<double>(rep.test_count);
  rep.loss_interior = rep.interior_count
                          ? static_cast<double>(rep.errors_interior) / rep.interior_count
                          : 0.0;
  rep.loss_boundary = rep.boundary_count
                          ? static_cast<double>(rep.errors_boundary) / rep.boundary_count
                          : 0.0;
  double xi = lcd.prov.xi;
  rep.loss_total_upper = binomial_upper_bound(rep.loss_total, rep.test_count, xi).bound;
  rep.loss_interior_upper =
      rep.interior_count ? binomial_upper_bound(rep.loss_interior, rep.interior_count, xi).bound
                         : 1.0;
  rep.loss_boundary_upper =
      rep.boundary_count ? binomial_upper_bound(rep.loss_boundary, rep.boundary_count, xi).bound
                         : 1.0;
  return rep;
}

std::string eval_report_text(const EvalReport& rep) {
  std::ostringstream out;
  out << "test_count=" << rep.test_count << "\n"
      << "interior_count=" << rep.interior_count << "\n"
      << "boundary_count=" << rep.boundary_count << "\n"
      << "errors_total=" << rep.errors_total << "\n"
      << "errors_interior=" << rep.errors_interior << "\n"
      << "errors_boundary=" << rep.errors_boundary << "\n"
      << "false_positives=" << rep.false_positives << "\n"
      << "false_negatives=" << rep.false_negatives << "\n"
      << "loss_total=" << fmt17(rep.loss_total) << "\n"
      << "loss_interior=" << fmt17(rep.loss_interior) << "\n"
      << "loss_boundary=" << fmt17(rep.loss_boundary) << "\n"
      << "loss_total_upper=" << fmt17(rep.loss_total_upper) << "\n"
      << "loss_interior_upper=" << fmt17(rep.loss_interior_upper) << "\n"
      << "loss_boundary_upper=" << fmt17(rep.loss_boundary_upper) << "\n";
  return out.str();
}

}  // namespace certicd
