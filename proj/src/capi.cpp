#include "certicd/certicd.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "error.hpp"
#include "experiments.hpp"
#include "lcd.hpp"
#include "scene.hpp"
#include "stats.hpp"

using namespace certicd;

struct certicd_scene {
  Scene scene;
};

struct certicd_model {
  TrainedLcd lcd;
};

namespace {

thread_local std::string g_last_error;

certicd_status status_of(Err code) {
  switch (code) {
    case Err::InvalidArgument: return CERTICD_ERR_INVALID_ARGUMENT;
    case Err::Io: return CERTICD_ERR_IO;
    case Err::Parse: return CERTICD_ERR_PARSE;
    case Err::Version: return CERTICD_ERR_VERSION;
    case Err::Checksum: return CERTICD_ERR_CHECKSUM;
    case Err::Truncated: return CERTICD_ERR_TRUNCATED;
    case Err::ResourceLimit: return CERTICD_ERR_RESOURCE_LIMIT;
    case Err::Separability: return CERTICD_ERR_SEPARABILITY;
    case Err::Consistency: return CERTICD_ERR_CONSISTENCY;
    case Err::Infeasible: return CERTICD_ERR_INFEASIBLE;
  }
  return CERTICD_ERR_INTERNAL;
}

template <typename Fn>
certicd_status guarded(Fn&& fn) {
  try {
    fn();
    return CERTICD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CERTICD_ERR_INTERNAL;
  }
}

certicd_status invalid(const char* msg) {
  g_last_error = msg;
  return CERTICD_ERR_INVALID_ARGUMENT;
}

void fill_report(const GuaranteeReport& rep, certicd_guarantee_report* out) {
  if (!out) return;
  out->p_hat = rep.p_hat;
  out->epsilon_interior = rep.epsilon_interior;
  out->required_m = rep.required_m;
  out->sample_count = rep.sample_count;
  out->interior_count = rep.interior_count;
  out->c1 = rep.c1;
  out->c2 = rep.c2;
  out->normal_approx_valid = rep.normal_approx_valid;
  out->confidence = rep.confidence;
}

}  // namespace

extern "C" {

const char* certicd_last_error(void) { return g_last_error.c_str(); }

certicd_status certicd_scene_load(const char* path, certicd_scene** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] { *out = new certicd_scene{Scene::from_file(path)}; });
}

certicd_status certicd_scene_parse(const char* text, certicd_scene** out) {
  if (!text || !out) return invalid("null argument");
  return guarded([&] { *out = new certicd_scene{Scene::parse(text)}; });
}

void certicd_scene_free(certicd_scene* scene) { delete scene; }

int certicd_scene_dimension(const certicd_scene* scene) {
  return scene ? scene->scene.dimension() : 0;
}

certicd_status certicd_scene_label(const certicd_scene* scene, const double* x, int dim,
                                   int* label_out) {
  if (!scene || !x || !label_out) return invalid("null argument");
  return guarded([&] {
    *label_out = scene->scene.label({x, static_cast<std::size_t>(dim)});
  });
}

certicd_status certicd_scene_clearance(const certicd_scene* scene, const double* x, int dim,
                                       double* clearance_out) {
  if (!scene || !x || !clearance_out) return invalid("null argument");
  return guarded([&] {
    *clearance_out = scene->scene.clearance({x, static_cast<std::size_t>(dim)});
  });
}

certicd_status certicd_z_critical(double xi, double* out) {
  if (!out) return invalid("null argument");
  return guarded([&] { *out = z_critical(xi); });
}

certicd_status certicd_sample_complexity(int d, double delta, double epsilon, double xi,
                                         double* out) {
  if (!out) return invalid("null argument");
  return guarded([&] { *out = sample_complexity_bound(epsilon, xi, delta, d); });
}

certicd_status certicd_interior_error(double epsilon, double xi, long long interior_count,
                                      long long sample_count, double* out) {
  if (!out) return invalid("null argument");
  return guarded([&] { *out = interior_error(epsilon, xi, interior_count, sample_count); });
}

certicd_status certicd_train(const certicd_scene* scene, const certicd_train_options* options,
                             certicd_model** out) {
  if (!scene || !options || !out) return invalid("null argument");
  return guarded([&] {
    AdaptiveOptions opts;
    opts.epsilon = options->epsilon;
    opts.xi = options->xi;
    opts.seed = options->seed;
    if (options->delta0 > 0) opts.delta0 = options->delta0;
    if (options->m0 > 0) opts.m0 = options->m0;
    if (options->iteration_cap > 0) opts.iteration_cap = options->iteration_cap;
    if (options->sample_budget > 0) opts.sample_budget = options->sample_budget;
    if (options->feature_cap > 0) opts.feature_cap = options->feature_cap;
    opts.certified = options->certified != 0;
    *out = new certicd_model{adaptive_lcd(scene->scene, opts)};
  });
}

certicd_status certicd_lbcd(const certicd_scene* scene, double epsilon, double xi, double delta,
                            long long m, uint64_t seed, int certified,
                            certicd_guarantee_report* report_out, certicd_model** out) {
  if (!scene || !out) return invalid("null argument");
  bool gated = false;
  certicd_status st = guarded([&] {
    LbcdOptions opts;
    opts.epsilon = epsilon;
    opts.xi = xi;
    opts.delta = delta;
    opts.m = m;
    opts.seed = seed;
    opts.certified = certified != 0;
    LbcdResult res = lbcd(scene->scene, opts);
    fill_report(res.report, report_out);
    if (!res.lcd) {
      gated = true;
      g_last_error = std::string("guarantee gate failed:") + (res.report.c1 ? " C1" : "") +
                     (res.report.c2 ? " C2" : "");
      return;
    }
    *out = new certicd_model{std::move(*res.lcd)};
  });
  if (st == CERTICD_OK && gated) return CERTICD_ERR_GUARANTEE_FAIL;
  return st;
}

void certicd_model_free(certicd_model* model) { delete model; }

certicd_status certicd_model_save(const certicd_model* model, const char* path) {
  if (!model || !path) return invalid("null argument");
  return guarded([&] { save_model(model->lcd, path); });
}

certicd_status certicd_model_load(const char* path, certicd_model** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] { *out = new certicd_model{load_model(path)}; });
}

int certicd_model_dimension(const certicd_model* model) {
  return model ? model->lcd.fmap.d : 0;
}

certicd_status certicd_model_report(const certicd_model* model,
                                    certicd_guarantee_report* report_out) {
  if (!model || !report_out) return invalid("null argument");
  fill_report(model->lcd.report, report_out);
  return CERTICD_OK;
}

certicd_status certicd_classify(const certicd_model* model, const double* x, int dim,
                                int* label_out) {
  if (!model || !x || !label_out) return invalid("null argument");
  return guarded([&] {
    *label_out = classify(model->lcd, {x, static_cast<std::size_t>(dim)});
  });
}

certicd_status certicd_evaluate(const certicd_model* model, const certicd_scene* scene,
                                long long test_count, uint64_t seed, char* buffer,
                                size_t buffer_size) {
  if (!model || !scene || !buffer || buffer_size == 0) return invalid("null argument");
  return guarded([&] {
    EvalReport rep = evaluate(model->lcd, scene->scene, test_count, seed);
    std::string text = eval_report_text(rep);
    std::size_t n = std::min(text.size(), buffer_size - 1);
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
  });
}

certicd_status certicd_sweep_csv(const certicd_scene* scene, const double* epsilons,
                                 int epsilon_count, const double* deltas, int delta_count,
                                 double xi, long long samples, uint64_t seed,
                                 const char* csv_path) {
  if (!scene || !epsilons || !deltas || !csv_path) return invalid("null argument");
  if (epsilon_count < 1 || delta_count < 1) return invalid("need at least one epsilon and delta");
  return guarded([&] {
    std::vector<double> eps(epsilons, epsilons + epsilon_count);
    std::vector<double> dg(deltas, deltas + delta_count);
    auto rows = sweep(scene->scene, eps, dg, xi, samples, seed);
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) fail(Err::Io, std::string("cannot open '") + csv_path + "' for writing");
    write_sweep_csv(rows, out);
    if (!out) fail(Err::Io, std::string("failed writing CSV to '") + csv_path + "'");
  });
}

certicd_status certicd_estimate_delta_max(const certicd_scene* scene, double epsilon,
                                          long long samples, uint64_t seed, double tolerance,
                                          double* delta_max_out, int* degenerate_out) {
  if (!scene || !delta_max_out) return invalid("null argument");
  return guarded([&] {
    auto est = estimate_delta_max(scene->scene, epsilon, samples, seed, tolerance);
    *delta_max_out = est.delta_max;
    if (degenerate_out) *degenerate_out = est.degenerate;
  });
}

certicd_status certicd_verify_margin(const certicd_scene* scene, double delta, long long samples,
                                     int probes_per_cell, uint64_t seed, double* min_margin_out,
                                     double* gamma_star_out, long long* checked_out) {
  if (!scene || !min_margin_out || !gamma_star_out) return invalid("null argument");
  return guarded([&] {
    const Scene& sc = scene->scene;
    FeatureMapParams params = derive_params(sc.dimension(), delta);
    auto sep = build_reference_separator(sc, params,
                                         probes_per_cell > 0 ? probes_per_cell : 9);
    auto configs = sc.sample_uniform(samples, seed);
    double min_margin = std::numeric_limits<double>::infinity();
    long long checked = 0;
    for (const auto& x : configs) {
      Probe pr = sc.probe(x);
      if (pr.clearance < delta) continue;
      ++checked;
      min_margin = std::min(min_margin, sep.normalized_margin(params, x, pr.label));
    }
    *min_margin_out = min_margin;
    *gamma_star_out = margin_lower_bound(params);
    if (checked_out) *checked_out = checked;
  });
}

}  // extern "C"
