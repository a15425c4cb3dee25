#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace certicd {

// Labeled feature vectors, stored row-major.
class TrainingSet {
 public:
  explicit TrainingSet(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> features, int label);
  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  int label(std::size_t i) const { return labels_[i]; }

 private:
  std::size_t dim_;
  std::vector<double> data_;
  std::vector<int> labels_;
};

struct SvmConfig {
  // Hard margin realized as the C -> infinity limit: a huge box bound with
  // an explicit separability check.
  double c = 1e6;
  double kkt_tolerance = 1e-6;
  double stop_tolerance = 1e-9;  // working-pair violation threshold
  long long max_pair_updates = 10'000'000;
  bool fit_bias = true;
};

struct SolverDiagnostics {
  long long pair_updates = 0;
  double max_kkt_violation = 0;  // max over i of 1 - y_i (w.x_i + b), final
  double margin = 0;             // 1 / ||w||
};

struct LinearModel {
  std::vector<double> w;
  double b = 0;
  SolverDiagnostics diag;
};

// Solves min 1/2 ||w||^2 s.t. y_i (w.x_i + b) >= 1 by coordinate ascent on
// the dual. Deterministic for fixed inputs and settings. Throws a
// separability error when no feasible hyperplane exists.
LinearModel train_hard_svm(const TrainingSet& data, const SvmConfig& config = {});

double decision_value(const LinearModel& model, std::span<const double> features);

// Ties classify forbidden.
inline int classify_value(double decision) { return decision >= 0 ? +1 : -1; }

}  // namespace certicd
