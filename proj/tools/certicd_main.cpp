// Command-line front end. Talks to the library exclusively through the
// C API so it doubles as a smoke test of the shared-library surface.
//
// Exit codes: 0 success, 2 guarantee failure / infeasible, 64 usage,
// 66 unreadable or malformed input file, 73 output write failure.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "certicd/certicd.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGuarantee = 2;
constexpr int kExitUsage = 64;
constexpr int kExitReadError = 66;
constexpr int kExitWriteError = 73;

struct SceneDeleter {
  void operator()(certicd_scene* s) const { certicd_scene_free(s); }
};
struct ModelDeleter {
  void operator()(certicd_model* m) const { certicd_model_free(m); }
};
using ScenePtr = std::unique_ptr<certicd_scene, SceneDeleter>;
using ModelPtr = std::unique_ptr<certicd_model, ModelDeleter>;

[[noreturn]] void die(int code, const std::string& msg) {
  std::fprintf(stderr, "certicd: error: %s\n", msg.c_str());
  std::exit(code);
}

int read_failure_code(certicd_status st) {
  switch (st) {
    case CERTICD_ERR_IO:
    case CERTICD_ERR_PARSE:
    case CERTICD_ERR_VERSION:
    case CERTICD_ERR_CHECKSUM:
    case CERTICD_ERR_TRUNCATED:
      return kExitReadError;
    case CERTICD_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return 1;
  }
}

ScenePtr load_scene(const std::string& path) {
  certicd_scene* s = nullptr;
  certicd_status st = certicd_scene_load(path.c_str(), &s);
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  return ScenePtr(s);
}

ModelPtr load_model(const std::string& path) {
  certicd_model* m = nullptr;
  certicd_status st = certicd_model_load(path.c_str(), &m);
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  return ModelPtr(m);
}

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string token = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      die(kExitUsage, std::string("bad ") + what + " value '" + token + "'");
    }
    while (used < token.size() && (token[used] == ' ' || token[used] == '\t')) ++used;
    if (used != token.size())
      die(kExitUsage, std::string("bad ") + what + " value '" + token + "'");
    out.push_back(value);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) die(kExitUsage, std::string("empty ") + what + " list");
  return out;
}

void print_report(std::FILE* f, const certicd_guarantee_report& rep) {
  std::fprintf(f, "p_hat=%.17g\n", rep.p_hat);
  std::fprintf(f, "eps_interior=%.17g\n", rep.epsilon_interior);
  std::fprintf(f, "required_m=%.17g\n", rep.required_m);
  std::fprintf(f, "sample_count=%lld\n", rep.sample_count);
  std::fprintf(f, "interior_count=%lld\n", rep.interior_count);
  std::fprintf(f, "c1=%d\n", rep.c1);
  std::fprintf(f, "c2=%d\n", rep.c2);
  std::fprintf(f, "normal_approx_valid=%d\n", rep.normal_approx_valid);
  std::fprintf(f, "confidence=%.17g\n", rep.confidence);
}

int cmd_train(const std::string& scene_path, double epsilon, double xi, double delta0,
              long long m0, std::uint64_t seed, const std::string& mode,
              const std::string& out_path) {
  if (mode != "certified" && mode != "empirical")
    die(kExitUsage, "--mode must be 'certified' or 'empirical'");
  ScenePtr scene = load_scene(scene_path);

  certicd_train_options opts{};
  opts.epsilon = epsilon;
  opts.xi = xi;
  opts.delta0 = delta0;
  opts.m0 = m0;
  opts.seed = seed;
  opts.certified = mode == "certified" ? 1 : 0;
  if (const char* cap = std::getenv("CERTICD_FEATURE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(cap, &end, 10);
    if (!end || *end != '\0' || v == 0)
      die(kExitUsage, "CERTICD_FEATURE_CAP must be a positive integer");
    opts.feature_cap = static_cast<size_t>(v);
  }

  certicd_model* raw = nullptr;
  certicd_status st = certicd_train(scene.get(), &opts, &raw);
  if (st == CERTICD_ERR_INFEASIBLE) {
    std::fprintf(stderr, "certicd: %s\n", certicd_last_error());
    std::printf("status=infeasible-at-this-scale\n");
    return kExitGuarantee;
  }
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  ModelPtr model(raw);

  if (certicd_model_save(model.get(), out_path.c_str()) != CERTICD_OK)
    die(kExitWriteError, certicd_last_error());

  certicd_guarantee_report rep{};
  certicd_model_report(model.get(), &rep);
  std::printf("status=ok\n");
  std::printf("model=%s\n", out_path.c_str());
  print_report(stdout, rep);
  std::fprintf(stderr, "certicd: trained model written to %s\n", out_path.c_str());
  return kExitOk;
}

int cmd_query(const std::string& model_path, const std::string& config_csv) {
  ModelPtr model = load_model(model_path);
  std::vector<double> x = parse_doubles(config_csv, "config");
  int d = certicd_model_dimension(model.get());
  if (static_cast<int>(x.size()) != d)
    die(kExitUsage, "config has " + std::to_string(x.size()) + " coordinates, model expects " +
                        std::to_string(d));
  int label = 0;
  certicd_status st = certicd_classify(model.get(), x.data(), d, &label);
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  std::printf("%s\n", label > 0 ? "FORBIDDEN" : "FREE");
  return kExitOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& scene_path, long long samples,
                 std::uint64_t seed) {
  ModelPtr model = load_model(model_path);
  ScenePtr scene = load_scene(scene_path);
  if (samples <= 0) die(kExitUsage, "--samples must be positive");
  std::string buffer(1 << 12, '\0');
  certicd_status st =
      certicd_evaluate(model.get(), scene.get(), samples, seed, buffer.data(), buffer.size());
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  std::fputs(buffer.c_str(), stdout);
  return kExitOk;
}

int cmd_sweep(const std::string& scene_path, const std::string& epsilons_csv, double delta_min,
              double delta_max, int steps, double xi, long long samples, std::uint64_t seed,
              const std::string& out_path) {
  ScenePtr scene = load_scene(scene_path);
  std::vector<double> epsilons = parse_doubles(epsilons_csv, "epsilon");
  if (steps < 1) die(kExitUsage, "--steps must be at least 1");
  if (delta_min < 0 || delta_max < delta_min) die(kExitUsage, "need 0 <= delta-min <= delta-max");
  std::vector<double> deltas;
  if (steps == 1) {
    deltas.push_back(delta_min);
  } else {
    for (int i = 0; i < steps; ++i)
      deltas.push_back(delta_min + (delta_max - delta_min) * i / (steps - 1));
  }
  certicd_status st =
      certicd_sweep_csv(scene.get(), epsilons.data(), static_cast<int>(epsilons.size()),
                        deltas.data(), static_cast<int>(deltas.size()), xi, samples, seed,
                        out_path.c_str());
  if (st == CERTICD_ERR_IO) die(kExitWriteError, certicd_last_error());
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  std::printf("csv=%s\n", out_path.c_str());
  std::fprintf(stderr, "certicd: sweep written to %s\n", out_path.c_str());
  return kExitOk;
}

int cmd_verify_margin(const std::string& scene_path, double delta, long long samples,
                      std::uint64_t seed) {
  ScenePtr scene = load_scene(scene_path);
  double min_margin = 0, gamma_star = 0;
  long long checked = 0;
  certicd_status st = certicd_verify_margin(scene.get(), delta, samples, 0, seed, &min_margin,
                                            &gamma_star, &checked);
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  std::printf("min_margin=%.17g\n", min_margin);
  std::printf("gamma_star=%.17g\n", gamma_star);
  std::printf("checked=%lld\n", checked);
  bool ok = min_margin >= gamma_star;
  std::printf("status=%s\n", ok ? "ok" : "violated");
  return ok ? kExitOk : kExitGuarantee;
}

int cmd_complexity(int d, double delta, double epsilon, double xi) {
  double value = 0;
  certicd_status st = certicd_sample_complexity(d, delta, epsilon, xi, &value);
  if (st != CERTICD_OK) die(kExitUsage, certicd_last_error());
  std::printf("%.17g\n", value);
  return kExitOk;
}

int cmd_delta_max(const std::string& scene_path, double epsilon, long long samples, double tol,
                  std::uint64_t seed) {
  ScenePtr scene = load_scene(scene_path);
  double delta_max = 0;
  int degenerate = 0;
  certicd_status st =
      certicd_estimate_delta_max(scene.get(), epsilon, samples, seed, tol, &delta_max, &degenerate);
  if (st != CERTICD_OK) die(read_failure_code(st), certicd_last_error());
  std::printf("delta_max=%.17g\n", delta_max);
  std::printf("degenerate=%d\n", degenerate);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certicd: learned collision detection with statistical guarantees"};
  app.require_subcommand(1);

  std::string scene_path, model_path, out_path, config_csv, epsilons_csv, mode = "certified";
  double epsilon = 0.1, xi = 0.05, delta = 0.1, delta0 = -1, delta_min = 0, delta_max_flag = 0.5;
  double tol = 1e-3;
  long long samples = 10000, m0 = -1;
  int steps = 11, d = 2;
  std::uint64_t seed = 0;

  auto* train = app.add_subcommand("train", "Adaptive training (doubling search)");
  train->add_option("--scene", scene_path)->required();
  train->add_option("--epsilon", epsilon)->required();
  train->add_option("--xi", xi)->required();
  train->add_option("--delta0", delta0);
  train->add_option("--m0", m0);
  train->add_option("--seed", seed);
  train->add_option("--mode", mode);
  train->add_option("--out", out_path)->default_val("model.lcd");

  auto* query = app.add_subcommand("query", "Classify one configuration");
  query->add_option("--model", model_path)->required();
  query->add_option("--config", config_csv)->required();

  auto* evaluate = app.add_subcommand("evaluate", "Held-out loss estimation");
  evaluate->add_option("--model", model_path)->required();
  evaluate->add_option("--scene", scene_path)->required();
  evaluate->add_option("--samples", samples)->required();
  evaluate->add_option("--seed", seed);

  auto* sweep = app.add_subcommand("sweep", "Feasibility sweep over (epsilon, delta)");
  sweep->add_option("--scene", scene_path)->required();
  sweep->add_option("--epsilons", epsilons_csv)->required();
  sweep->add_option("--delta-min", delta_min)->required();
  sweep->add_option("--delta-max", delta_max_flag)->required();
  sweep->add_option("--steps", steps)->required();
  sweep->add_option("--xi", xi);
  sweep->add_option("--samples", samples)->required();
  sweep->add_option("--seed", seed);
  sweep->add_option("--out", out_path)->required();

  auto* verify = app.add_subcommand("verify-margin", "Check the margin bound empirically");
  verify->add_option("--scene", scene_path)->required();
  verify->add_option("--delta", delta)->required();
  verify->add_option("--samples", samples)->required();
  verify->add_option("--seed", seed);

  auto* complexity = app.add_subcommand("complexity", "Evaluate the sample-complexity bound");
  complexity->add_option("--d", d)->required();
  complexity->add_option("--delta", delta)->required();
  complexity->add_option("--epsilon", epsilon)->required();
  complexity->add_option("--xi", xi)->required();

  auto* dmax = app.add_subcommand("delta-max", "Estimate the largest feasible delta");
  dmax->add_option("--scene", scene_path)->required();
  dmax->add_option("--epsilon", epsilon)->required();
  dmax->add_option("--samples", samples)->required();
  dmax->add_option("--tol", tol);
  dmax->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  if (train->parsed())
    return cmd_train(scene_path, epsilon, xi, delta0, m0, seed, mode, out_path);
  if (query->parsed()) return cmd_query(model_path, config_csv);
  if (evaluate->parsed()) return cmd_evaluate(model_path, scene_path, samples, seed);
  if (sweep->parsed())
    return cmd_sweep(scene_path, epsilons_csv, delta_min, delta_max_flag, steps, xi, samples,
                     seed, out_path);
  if (verify->parsed()) return cmd_verify_margin(scene_path, delta, samples, seed);
  if (complexity->parsed()) return cmd_complexity(d, delta, epsilon, xi);
  if (dmax->parsed()) return cmd_delta_max(scene_path, epsilon, samples, tol, seed);
  return kExitUsage;
}
