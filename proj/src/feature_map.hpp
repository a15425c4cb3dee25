#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scene.hpp"

namespace certicd {

// Default cap on the materialized feature dimension n^d.
inline constexpr std::size_t kDefaultFeatureCap = 1'000'000;

struct FeatureMapParams {
  int d = 0;
  int n = 0;          // cells per axis
  double sigma = 0;   // kernel width
  double delta = 0;   // the clearance this map was derived from

  std::size_t feature_count() const;
};

// n = ceil(sqrt(d)/delta), sigma^2 = 2*delta^2 / ln(9*n^d). The ceiling
// keeps the cell diagonal sqrt(d)/n <= delta.
FeatureMapParams derive_params(int d, double delta, std::size_t feature_cap = kDefaultFeatureCap);

// 1-based cell indices; x_j = 1 is clamped into cell n.
std::vector<int> cell_of(const FeatureMapParams& p, std::span<const double> x);

Config cell_center(const FeatureMapParams& p, std::span<const int> index);

// Gaussian responses of x to all cell centers, last axis fastest.
std::vector<double> phi(const FeatureMapParams& p, std::span<const double> x);

// 8 / (9^{9/8} * n^{5d/8})
double margin_lower_bound(const FeatureMapParams& p);

struct ReferenceSeparator {
  std::vector<signed char> alpha;  // one of {-1, 0, +1} per cell, last axis fastest
  double norm = 0;                 // ||alpha||_2 before normalization

  // f(x) * (alpha . phi(x)) / ||alpha||
  double normalized_margin(const FeatureMapParams& p, std::span<const double> x, int label) const;
};

// Labels each cell +1/-1 when a probe lies in the delta-interior of the
// forbidden/free space, 0 when all probes are delta-boundary. Probes are
// the cell center plus (probes_per_cell - 1) low-discrepancy points.
// Mixed interior labels inside one cell raise a consistency error.
ReferenceSeparator build_reference_separator(const Scene& scene, const FeatureMapParams& p,
                                             int probes_per_cell = 9);

}  // namespace certicd
