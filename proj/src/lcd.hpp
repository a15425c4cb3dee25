#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "feature_map.hpp"
#include "scene.hpp"
#include "stats.hpp"
#include "svm.hpp"

namespace certicd {

struct GuaranteeReport {
  double p_hat = 0;
  double epsilon_interior = 0;
  double required_m = std::numeric_limits<double>::infinity();
  long long sample_count = 0;
  long long interior_count = 0;
  bool c1 = false;  // epsilon_interior <= 0
  bool c2 = false;  // interior_count < required_m
  bool normal_approx_valid = false;
  double confidence = 0;  // 1 - xi
};

struct TraceEntry {
  long long m = 0;
  double delta = 0;
  bool success = false;
};

struct Provenance {
  std::string scene_id;
  std::uint64_t seed = 0;
  long long m = 0;
  double delta = 0, epsilon = 0, xi = 0;
  std::string generator;
  SvmConfig solver;
  bool certified = true;
  std::vector<TraceEntry> trace;
};

struct TrainedLcd {
  LinearModel model;
  FeatureMapParams fmap;
  GuaranteeReport report;
  Provenance prov;
};

struct LbcdOptions {
  double epsilon = 0.1;
  double xi = 0.05;
  double delta = 0.1;
  long long m = 1000;
  std::uint64_t seed = 0;
  // Certified runs enforce both C1 and C2. Empirical runs waive C2 (the
  // Eq.-(1) sample requirement) and mark the model accordingly; C1 still
  // gates because a non-positive interior error budget is meaningless.
  bool certified = true;
  std::size_t feature_cap = kDefaultFeatureCap;
  SvmConfig solver;
};

struct LbcdResult {
  std::optional<TrainedLcd> lcd;  // empty on Fail
  GuaranteeReport report;
};

// Algorithm: sample m configurations, keep those with clearance > delta,
// gate on C1/C2, then train a hard-margin SVM on the interior samples.
LbcdResult lbcd(const Scene& scene, const LbcdOptions& opts);

struct AdaptiveOptions {
  double epsilon = 0.1;
  double xi = 0.05;
  std::uint64_t seed = 0;
  long long m0 = 1000;
  double delta0 = -1;  // <= 0 means sqrt(d)/4
  int iteration_cap = 20;
  long long sample_budget = 10'000'000;
  bool certified = true;
  std::size_t feature_cap = kDefaultFeatureCap;
  SvmConfig solver;
};

// Doubling search: retry lbcd with m <- 2m, delta <- delta/2 until it
// succeeds. Throws Err::Infeasible (with the full trace in the message)
// when the iteration cap, the sample budget, or the feature cap is hit.
TrainedLcd adaptive_lcd(const Scene& scene, const AdaptiveOptions& opts);

int classify(const TrainedLcd& lcd, std::span<const double> x);

std::string model_to_text(const TrainedLcd& lcd);
TrainedLcd model_from_text(std::string_view text);
void save_model(const TrainedLcd& lcd, const std::string& path);
TrainedLcd load_model(const std::string& path);

}  // namespace certicd
