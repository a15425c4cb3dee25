/* C API for the certicd learned-collision-detection library.
 *
 * All functions return a certicd_status; outputs are written through
 * pointers. On any failure certicd_last_error() carries a human-readable
 * message for the calling thread. Handles are opaque and must be released
 * with the matching *_free function. Scenes and models are immutable, so
 * queries on them are safe from multiple threads.
 */
#ifndef CERTICD_H
#define CERTICD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct certicd_scene certicd_scene;
typedef struct certicd_model certicd_model;

typedef enum certicd_status {
  CERTICD_OK = 0,
  CERTICD_ERR_INVALID_ARGUMENT = 1,
  CERTICD_ERR_IO = 2,
  CERTICD_ERR_PARSE = 3,
  CERTICD_ERR_VERSION = 4,
  CERTICD_ERR_CHECKSUM = 5,
  CERTICD_ERR_TRUNCATED = 6,
  CERTICD_ERR_RESOURCE_LIMIT = 7,
  CERTICD_ERR_SEPARABILITY = 8,
  CERTICD_ERR_GUARANTEE_FAIL = 9,  /* Algorithm-1 gate failed (C1/C2) */
  CERTICD_ERR_INFEASIBLE = 10,     /* adaptive search out of budget */
  CERTICD_ERR_CONSISTENCY = 11,
  CERTICD_ERR_INTERNAL = 12
} certicd_status;

/* Message for the most recent failure on this thread. */
const char* certicd_last_error(void);

/* ---- scenes ---- */
certicd_status certicd_scene_load(const char* path, certicd_scene** out);
certicd_status certicd_scene_parse(const char* text, certicd_scene** out);
void certicd_scene_free(certicd_scene* scene);
int certicd_scene_dimension(const certicd_scene* scene);
/* label: +1 forbidden, -1 free */
certicd_status certicd_scene_label(const certicd_scene* scene, const double* x, int dim,
                                   int* label_out);
certicd_status certicd_scene_clearance(const certicd_scene* scene, const double* x, int dim,
                                       double* clearance_out);

/* ---- closed-form statistics ---- */
certicd_status certicd_z_critical(double xi, double* out);
/* +inf means infeasible */
certicd_status certicd_sample_complexity(int d, double delta, double epsilon, double xi,
                                         double* out);
certicd_status certicd_interior_error(double epsilon, double xi, long long interior_count,
                                      long long sample_count, double* out);

/* ---- training ---- */
typedef struct certicd_train_options {
  double epsilon;
  double xi;
  double delta0;          /* <= 0: sqrt(d)/4 */
  long long m0;           /* <= 0: 1000 */
  uint64_t seed;
  int certified;          /* 0 = empirical mode (waives the C2 gate) */
  int iteration_cap;      /* <= 0: 20 */
  long long sample_budget;/* <= 0: 10^7 */
  size_t feature_cap;     /* 0: 10^6 */
} certicd_train_options;

typedef struct certicd_guarantee_report {
  double p_hat;
  double epsilon_interior;
  double required_m;
  long long sample_count;
  long long interior_count;
  int c1;
  int c2;
  int normal_approx_valid;
  double confidence;
} certicd_guarantee_report;

/* Adaptive doubling search. CERTICD_ERR_INFEASIBLE when out of budget. */
certicd_status certicd_train(const certicd_scene* scene, const certicd_train_options* options,
                             certicd_model** out);

/* Single fixed-(delta,m) run. CERTICD_ERR_GUARANTEE_FAIL on C1/C2, with the
 * report still filled in when report_out is non-null. */
certicd_status certicd_lbcd(const certicd_scene* scene, double epsilon, double xi, double delta,
                            long long m, uint64_t seed, int certified,
                            certicd_guarantee_report* report_out, certicd_model** out);

/* ---- models ---- */
void certicd_model_free(certicd_model* model);
certicd_status certicd_model_save(const certicd_model* model, const char* path);
certicd_status certicd_model_load(const char* path, certicd_model** out);
int certicd_model_dimension(const certicd_model* model);
certicd_status certicd_model_report(const certicd_model* model,
                                    certicd_guarantee_report* report_out);
/* label: +1 forbidden, -1 free; ties classify forbidden */
certicd_status certicd_classify(const certicd_model* model, const double* x, int dim,
                                int* label_out);

/* ---- experiments ---- */
/* key=value text report; buffer is NUL-terminated and truncated if needed */
certicd_status certicd_evaluate(const certicd_model* model, const certicd_scene* scene,
                                long long test_count, uint64_t seed, char* buffer,
                                size_t buffer_size);
certicd_status certicd_sweep_csv(const certicd_scene* scene, const double* epsilons,
                                 int epsilon_count, const double* deltas, int delta_count,
                                 double xi, long long samples, uint64_t seed, const char* csv_path);
certicd_status certicd_estimate_delta_max(const certicd_scene* scene, double epsilon,
                                          long long samples, uint64_t seed, double tolerance,
                                          double* delta_max_out, int* degenerate_out);
/* Theorem-1 margin verification: builds the reference separator for the
 * derived (n, sigma) and reports the minimum observed normalized margin
 * over uniformly sampled delta-interior points plus the bound gamma*. */
certicd_status certicd_verify_margin(const certicd_scene* scene, double delta, long long samples,
                                     int probes_per_cell, uint64_t seed, double* min_margin_out,
                                     double* gamma_star_out, long long* checked_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CERTICD_H */
