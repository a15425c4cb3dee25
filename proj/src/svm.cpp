#include "svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace certicd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

struct Workspace {
  const TrainingSet& data;
  const SvmConfig& cfg;
  std::vector<double> alpha;
  std::vector<double> u;      // sum_i alpha_i y_i x_i
  std::vector<double> grad;   // G_i = y_i (u . x_i) - 1
  std::vector<double> kdiag;
  long long updates = 0;

  explicit Workspace(const TrainingSet& d, const SvmConfig& c)
      : data(d), cfg(c), alpha(d.size(), 0.0), u(d.dim(), 0.0), grad(d.size(), -1.0),
        kdiag(d.size()) {
    for (std::size_t i = 0; i < d.size(); ++i) kdiag[i] = dot(d.row(i), d.row(i));
  }

  void refresh_gradient() {
    for (std::size_t t = 0; t < data.size(); ++t)
      grad[t] = data.label(t) * dot({u.data(), u.size()}, data.row(t)) - 1.0;
  }

  void bump(std::size_t i, double delta_alpha) {
    auto xi = data.row(i);
    double scale = data.label(i) * delta_alpha;
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += scale * xi[k];
  }
};

// Pairwise coordinate ascent with second-order working-pair selection,
// respecting the equality constraint sum alpha_i y_i = 0.
bool solve_with_bias(Workspace& ws, double* bias_out) {
  const auto& data = ws.data;
  const double c = ws.cfg.c;
  const std::size_t m = data.size();
  bool converged = false;
  std::vector<double> ki(m);

  while (ws.updates < ws.cfg.max_pair_updates) {
    ws.refresh_gradient();
    // i: most violating index in I_up.
    double gmax = -kInf;
    std::size_t i = m;
    for (std::size_t t = 0; t < m; ++t) {
      int y = data.label(t);
      bool in_up = (y == +1 && ws.alpha[t] < c) || (y == -1 && ws.alpha[t] > 0);
      if (in_up && -y * ws.grad[t] > gmax) {
        gmax = -y * ws.grad[t];
        i = t;
      }
    }
    if (i == m) break;

    auto xi = data.row(i);
    for (std::size_t t = 0; t < m; ++t) ki[t] = dot(xi, data.row(t));

    // j: best second-order gain among violating entries of I_low.
    double gmin = kInf, best_gain = 0;
    std::size_t j = m;
    for (std::size_t t = 0; t < m; ++t) {
      int y = data.label(t);
      bool in_low = (y == +1 && ws.alpha[t] > 0) || (y == -1 && ws.alpha[t] < c);
      if (!in_low) continue;
      double neg_yg = -y * ws.grad[t];
      gmin = std::min(gmin, neg_yg);
      double viol = gmax - neg_yg;
      if (viol > 0) {
        double a = ws.kdiag[i] + ws.kdiag[t] - 2.0 * ki[t];
        if (a <= 0) a = kTau;
        double gain = viol * viol / a;
        if (gain > best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (gmax - gmin <= ws.cfg.stop_tolerance || j == m) {
      converged = true;
      // Bias from the midpoint of the violating interval; with free
      // support vectors present this is their exact shared value.
      *bias_out = (gmax + gmin) / 2.0;
      return converged;
    }

    int yi = data.label(i), yj = data.label(j);
    double a = ws.kdiag[i] + ws.kdiag[j] - 2.0 * ki[j];
    if (a <= 0) a = kTau;
    double old_ai = ws.alpha[i], old_aj = ws.alpha[j];
    if (yi != yj) {
      double delta = (-ws.grad[i] - ws.grad[j]) / a;
      double diff = old_ai - old_aj;
      ws.alpha[i] += delta;
      ws.alpha[j] += delta;
      if (diff > 0) {
        if (ws.alpha[j] < 0) {
          ws.alpha[j] = 0;
          ws.alpha[i] = diff;
        }
        if (ws.alpha[i] > c) {
          ws.alpha[i] = c;
          ws.alpha[j] = c - diff;
        }
      } else {
        if (ws.alpha[i] < 0) {
          ws.alpha[i] = 0;
          ws.alpha[j] = -diff;
        }
        if (ws.alpha[j] > c) {
          ws.alpha[j] = c;
          ws.alpha[i] = c + diff;
        }
      }
    } else {
      double delta = (ws.grad[i] - ws.grad[j]) / a;
      double sum = old_ai + old_aj;
      ws.alpha[i] -= delta;
      ws.alpha[j] += delta;
      if (sum > c) {
        if (ws.alpha[i] > c) {
          ws.alpha[i] = c;
          ws.alpha[j] = sum - c;
        }
        if (ws.alpha[j] > c) {
          ws.alpha[j] = c;
          ws.alpha[i] = sum - c;
        }
      } else {
        if (ws.alpha[j] < 0) {
          ws.alpha[j] = 0;
          ws.alpha[i] = sum;
        }
        if (ws.alpha[i] < 0) {
          ws.alpha[i] = 0;
          ws.alpha[j] = sum;
        }
      }
    }
    ws.bump(i, ws.alpha[i] - old_ai);
    ws.bump(j, ws.alpha[j] - old_aj);
    ++ws.updates;
  }
  *bias_out = 0;
  return converged;
}

// Homogeneous variant (b fixed at 0): no equality constraint, so plain
// single-coordinate ascent on the most violating index.
bool solve_without_bias(Workspace& ws) {
  const auto& data = ws.data;
  const double c = ws.cfg.c;
  const std::size_t m = data.size();
  while (ws.updates < ws.cfg.max_pair_updates) {
    ws.refresh_gradient();
    double worst = 0;
    std::size_t i = m;
    for (std::size_t t = 0; t < m; ++t) {
      double g = ws.grad[t];
      double viol;
      if (ws.alpha[t] <= 0)
        viol = std::max(-g, 0.0);
      else if (ws.alpha[t] >= c)
        viol = std::max(g, 0.0);
      else
        viol = std::fabs(g);
      if (viol > worst) {
        worst = viol;
        i = t;
      }
    }
    if (i == m || worst <= ws.cfg.stop_tolerance) return true;
    double kii = std::max(ws.kdiag[i], kTau);
    double old_ai = ws.alpha[i];
    ws.alpha[i] = std::clamp(old_ai - ws.grad[i] / kii, 0.0, c);
    ws.bump(i, ws.alpha[i] - old_ai);
    ++ws.updates;
  }
  return false;
}

}  // namespace

void TrainingSet::add(std::span<const double> features, int label) {
  if (features.size() != dim_) fail(Err::InvalidArgument, "feature vector has wrong dimension");
  if (label != +1 && label != -1) fail(Err::InvalidArgument, "label must be +1 or -1");
  for (double v : features)
    if (!std::isfinite(v)) fail(Err::InvalidArgument, "feature values must be finite");
  data_.insert(data_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

LinearModel train_hard_svm(const TrainingSet& data, const SvmConfig& config) {
  if (data.size() < 2) fail(Err::InvalidArgument, "training set needs at least two samples");
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < data.size(); ++i) (data.label(i) > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    fail(Err::InvalidArgument, "training set must contain both labels");

  Workspace ws(data, config);
  double bias = 0;
  bool converged =
      config.fit_bias ? solve_with_bias(ws, &bias) : solve_without_bias(ws);

  LinearModel model;
  model.w = ws.u;
  model.b = config.fit_bias ? bias : 0.0;
  model.diag.pair_updates = ws.updates;

  double min_margin = kInf;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double val = data.label(i) * (dot({model.w.data(), model.w.size()}, data.row(i)) + model.b);
    if (val < min_margin) {
      min_margin = val;
      worst = i;
    }
  }
  model.diag.max_kkt_violation = std::max(0.0, 1.0 - min_margin);

  bool pinned = false;
  for (double a : ws.alpha)
    if (a >= config.c * (1.0 - 1e-9)) pinned = true;
  if (pinned || min_margin <= 0 ||
      (!converged && model.diag.max_kkt_violation > config.kkt_tolerance)) {
    fail(Err::Separability,
         "training data is not separable (worst violating sample " + std::to_string(worst) +
             ", margin " + std::to_string(min_margin) + ")");
  }
  if (model.diag.max_kkt_violation > config.kkt_tolerance)
    fail(Err::Separability,
         "solver stopped above KKT tolerance at sample " + std::to_string(worst));

  double norm2 = dot({model.w.data(), model.w.size()}, {model.w.data(), model.w.size()});
  if (!(norm2 > 0)) fail(Err::Separability, "degenerate solution with zero weight vector");
  model.diag.margin = 1.0 / std::sqrt(norm2);
  return model;
}

double decision_value(const LinearModel& model, std::span<const double> features) {
  if (features.size() != model.w.size())
    fail(Err::InvalidArgument, "feature vector has wrong dimension");
  return dot({model.w.data(), model.w.size()}, features) + model.b;
}

}  // namespace certicd
