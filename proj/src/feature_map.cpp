#include "feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace certicd {
namespace {

// Halton radical inverse, used for in-cell probe points.
double radical_inverse(int base, int index) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

std::size_t FeatureMapParams::feature_count() const {
  std::size_t count = 1;
  for (int j = 0; j < d; ++j) count *= static_cast<std::size_t>(n);
  return count;
}

FeatureMapParams derive_params(int d, double delta, std::size_t feature_cap) {
  if (d < 1) fail(Err::InvalidArgument, "dimension must be >= 1");
  double sqrt_d = std::sqrt(static_cast<double>(d));
  if (!(delta > 0) || !(delta < sqrt_d))
    fail(Err::InvalidArgument, "delta must lie in (0, sqrt(d))");
  double n_real = sqrt_d / delta;
  int n = static_cast<int>(std::ceil(n_real));
  // Guard against overflow when checking the cap.
  double count = std::pow(static_cast<double>(n), d);
  if (count > static_cast<double>(feature_cap))
    fail(Err::ResourceLimit, "feature dimension n^d = " + std::to_string(n) + "^" +
                                 std::to_string(d) + " exceeds cap " + std::to_string(feature_cap));
  FeatureMapParams p;
  p.d = d;
  p.n = n;
  p.delta = delta;
  p.sigma = std::sqrt(2.0 * delta * delta / std::log(9.0 * count));
  return p;
}

std::vector<int> cell_of(const FeatureMapParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.d)
    fail(Err::InvalidArgument, "configuration dimension does not match feature map");
  std::vector<int> idx(p.d);
  for (int j = 0; j < p.d; ++j) {
    if (!(x[j] >= 0.0 && x[j] <= 1.0)) fail(Err::InvalidArgument, "coordinate outside [0,1]");
    idx[j] = std::min(static_cast<int>(x[j] * p.n), p.n - 1) + 1;
  }
  return idx;
}

Config cell_center(const FeatureMapParams& p, std::span<const int> index) {
  if (static_cast<int>(index.size()) != p.d)
    fail(Err::InvalidArgument, "cell index dimension does not match feature map");
  Config c(p.d);
  for (int j = 0; j < p.d; ++j) {
    if (index[j] < 1 || index[j] > p.n) fail(Err::InvalidArgument, "cell index out of range");
    c[j] = (index[j] - 0.5) / p.n;
  }
  return c;
}

std::vector<double> phi(const FeatureMapParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.d)
    fail(Err::InvalidArgument, "configuration dimension does not match feature map");
  const std::size_t count = p.feature_count();
  const double inv_sigma2 = 1.0 / (p.sigma * p.sigma);
  std::vector<double> out(count);
  // Per-axis squared distances to each of the n center coordinates; the
  // flat entry is the product of axis factors, so accumulate in distance
  // space and exponentiate once per entry.
  std::vector<double> axis_sq(static_cast<std::size_t>(p.d) * p.n);
  for (int j = 0; j < p.d; ++j)
    for (int i = 0; i < p.n; ++i) {
      double c = (i + 0.5) / p.n;
      axis_sq[static_cast<std::size_t>(j) * p.n + i] = (x[j] - c) * (x[j] - c);
    }
  std::vector<int> idx(p.d, 0);  // 0-based, last axis fastest
  for (std::size_t flat = 0; flat < count; ++flat) {
    double s = 0;
    for (int j = 0; j < p.d; ++j) s += axis_sq[static_cast<std::size_t>(j) * p.n + idx[j]];
    out[flat] = std::exp(-s * inv_sigma2);
    for (int j = p.d - 1; j >= 0; --j) {
      if (++idx[j] < p.n) break;
      idx[j] = 0;
    }
  }
  return out;
}

double margin_lower_bound(const FeatureMapParams& p) {
  return 8.0 / (std::pow(9.0, 9.0 / 8.0) * std::pow(static_cast<double>(p.n), 5.0 * p.d / 8.0));
}

double ReferenceSeparator::normalized_margin(const FeatureMapParams& p, std::span<const double> x,
                                             int label) const {
  auto features = phi(p, x);
  double dot = 0;
  for (std::size_t i = 0; i < features.size(); ++i) dot += alpha[i] * features[i];
  return label * dot / norm;
}

ReferenceSeparator build_reference_separator(const Scene& scene, const FeatureMapParams& p,
                                             int probes_per_cell) {
  if (probes_per_cell < 1) fail(Err::InvalidArgument, "probes_per_cell must be >= 1");
  if (scene.dimension() != p.d)
    fail(Err::InvalidArgument, "scene dimension does not match feature map");
  if (p.d > static_cast<int>(std::size(kPrimes)))
    fail(Err::ResourceLimit, "probe sequence supports at most 12 dimensions");
  const std::size_t count = p.feature_count();
  ReferenceSeparator sep;
  sep.alpha.assign(count, 0);

  std::vector<int> idx(p.d, 0);
  Config probe_point(p.d);
  for (std::size_t flat = 0; flat < count; ++flat) {
    int interior_pos = 0, interior_neg = 0;
    for (int k = 0; k < probes_per_cell; ++k) {
      for (int j = 0; j < p.d; ++j) {
        double frac = k == 0 ? 0.5 : radical_inverse(kPrimes[j], k);
        probe_point[j] = (idx[j] + frac) / p.n;
      }
      Probe pr = scene.probe(probe_point);
      if (pr.clearance >= p.delta) {
        (pr.label > 0 ? interior_pos : interior_neg) = 1;
      }
    }
    if (interior_pos && interior_neg) {
      std::string cell_str;
      for (int j = 0; j < p.d; ++j) cell_str += (j ? "," : "") + std::to_string(idx[j] + 1);
      fail(Err::Consistency, "cell (" + cell_str +
                                 ") contains delta-interior probes of both labels; "
                                 "delta and n are inconsistent for this scene");
    }
    sep.alpha[flat] = static_cast<signed char>(interior_pos - interior_neg);
    for (int j = p.d - 1; j >= 0; --j) {
      if (++idx[j] < p.n) break;
      idx[j] = 0;
    }
  }
  std::size_t nonzero = 0;
  for (signed char a : sep.alpha) nonzero += a != 0;
  if (nonzero == 0)
    fail(Err::Consistency, "reference separator is all-zero; delta-interior is empty at this n");
  sep.norm = std::sqrt(static_cast<double>(nonzero));
  return sep;
}

}  // namespace certicd
