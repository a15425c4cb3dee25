// Brute-force maximal-margin oracle for small hard-SVM instances.
//
// The optimum of min 1/2||w||^2 s.t. y_i(w.x_i + b) >= 1 is determined by
// an active set of at most dim+1 support points with equality constraints.
// Enumerate every candidate subset, solve the equality-constrained KKT
// system exactly, keep the candidates whose (w, b) is feasible for all
// points, and return the smallest ||w||^2 among them (the true optimum is
// one of these candidates).
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "svm.hpp"

namespace oracle {

struct Solution {
  std::vector<double> w;
  double b = 0;
  double margin = 0;  // 1 / ||w||
};

namespace detail {

// Gaussian elimination with partial pivoting; empty on singular systems.
inline std::optional<std::vector<double>> solve(std::vector<std::vector<double>> a,
                                                std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / a[i][i];
  return x;
}

inline void subsets(std::size_t m, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (cur.size() == k) {
    fn(cur);
    return;
  }
  for (std::size_t i = start; i + (k - cur.size()) <= m; ++i) {
    cur.push_back(i);
    subsets(m, k, i + 1, cur, fn);
    cur.pop_back();
  }
}

}  // namespace detail

inline std::optional<Solution> max_margin(const certicd::TrainingSet& data) {
  const std::size_t m = data.size();
  const std::size_t dim = data.dim();
  double best_norm2 = std::numeric_limits<double>::infinity();
  std::optional<Solution> best;

  auto try_subset = [&](const std::vector<std::size_t>& s) {
    const std::size_t k = s.size();
    // Unknowns: lambda_1..lambda_k, b. Equations: the k active constraints
    // y_i (sum_j lambda_j y_j x_j . x_i + b) = 1, plus sum_j lambda_j y_j = 0.
    std::vector<std::vector<double>> a(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> rhs(k + 1, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      int yi = data.label(s[r]);
      for (std::size_t c = 0; c < k; ++c) {
        double dot = 0;
        auto xr = data.row(s[r]);
        auto xc = data.row(s[c]);
        for (std::size_t t = 0; t < dim; ++t) dot += xr[t] * xc[t];
        a[r][c] = yi * data.label(s[c]) * dot;
      }
      a[r][k] = yi;
      rhs[r] = 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) a[k][c] = data.label(s[c]);
    auto sol = detail::solve(std::move(a), std::move(rhs));
    if (!sol) return;

    std::vector<double> w(dim, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      double f = (*sol)[c] * data.label(s[c]);
      auto xc = data.row(s[c]);
      for (std::size_t t = 0; t < dim; ++t) w[t] += f * xc[t];
    }
    double b = (*sol)[k];
    double norm2 = 0;
    for (double v : w) norm2 += v * v;
    if (!(norm2 > 0) || norm2 >= best_norm2) return;
    for (std::size_t i = 0; i < m; ++i) {
      double f = b;
      auto xi = data.row(i);
      for (std::size_t t = 0; t < dim; ++t) f += w[t] * xi[t];
      if (data.label(i) * f < 1.0 - 1e-9) return;  // infeasible candidate
    }
    best_norm2 = norm2;
    best = Solution{std::move(w), b, 1.0 / std::sqrt(norm2)};
  };

  std::vector<std::size_t> cur;
  for (std::size_t k = 2; k <= std::min(m, dim + 1); ++k)
    detail::subsets(m, k, 0, cur, try_subset);
  return best;
}

}  // namespace oracle
