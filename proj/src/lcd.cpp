#include "lcd.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace certicd {
namespace {

std::string hexf(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hexf(const std::string& s, int line_no) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(Err::Parse, "model file line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  if (pos != s.size())
    fail(Err::Parse, "model file line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

long long parse_ll(const std::string& s, int line_no) {
  std::size_t pos = 0;
  long long v;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    fail(Err::Parse, "model file line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  if (pos != s.size())
    fail(Err::Parse, "model file line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  return v;
}

GuaranteeReport make_report(double epsilon, double xi, long long interior_count,
                            long long sample_count, double delta, int d) {
  GuaranteeReport rep;
  rep.sample_count = sample_count;
  rep.interior_count = interior_count;
  rep.p_hat = static_cast<double>(interior_count) / static_cast<double>(sample_count);
  rep.epsilon_interior = interior_error(epsilon, xi, interior_count, sample_count);
  rep.confidence = 1.0 - xi;
  rep.normal_approx_valid =
      static_cast<double>(sample_count) * std::min(rep.p_hat, 1.0 - rep.p_hat) >= 5.0;
  rep.c1 = !(rep.epsilon_interior > 0);
  if (!rep.c1) {
    rep.required_m = sample_complexity_bound(rep.epsilon_interior, xi, delta, d);
    rep.c2 = static_cast<double>(interior_count) < std::ceil(rep.required_m);
  } else {
    rep.required_m = std::numeric_limits<double>::infinity();
    rep.c2 = true;
  }
  return rep;
}

}  // namespace

LbcdResult lbcd(const Scene& scene, const LbcdOptions& opts) {
  if (opts.m < 1) fail(Err::InvalidArgument, "m must be >= 1");
  const int d = scene.dimension();
  double sqrt_d = std::sqrt(static_cast<double>(d));
  if (!(opts.delta > 0) || !(opts.delta < sqrt_d))
    fail(Err::InvalidArgument, "delta must lie in (0, sqrt(d))");
  if (!(opts.epsilon > 0) || !(opts.epsilon < 1))
    fail(Err::InvalidArgument, "epsilon must lie in (0, 1)");
  if (!(opts.xi > 0) || !(opts.xi < 1)) fail(Err::InvalidArgument, "xi must lie in (0, 1)");

  // One oracle call per sample; label and clearance are cached together.
  auto samples = scene.sample_uniform(opts.m, opts.seed);
  std::vector<Probe> probes(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) probes[i] = scene.probe(samples[i]);

  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (probes[i].clearance > opts.delta) interior.push_back(i);  // strict, per the filter step

  GuaranteeReport rep = make_report(opts.epsilon, opts.xi,
                                    static_cast<long long>(interior.size()), opts.m, opts.delta, d);
  bool gate_fail = opts.certified ? (rep.c1 || rep.c2) : rep.c1;
  if (gate_fail) return {std::nullopt, rep};

  bool has_pos = false, has_neg = false;
  for (std::size_t idx : interior) (probes[idx].label > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    fail(Err::Separability,
         "interior samples carry a single label; delta is too large for this scene at this m");

  FeatureMapParams fmap = derive_params(d, opts.delta, opts.feature_cap);
  TrainingSet train(fmap.feature_count());
  for (std::size_t idx : interior) train.add(phi(fmap, samples[idx]), probes[idx].label);
  LinearModel model = train_hard_svm(train, opts.solver);

  TrainedLcd lcd;
  lcd.model = std::move(model);
  lcd.fmap = fmap;
  lcd.report = rep;
  lcd.prov.scene_id = scene.id();
  lcd.prov.seed = opts.seed;
  lcd.prov.m = opts.m;
  lcd.prov.delta = opts.delta;
  lcd.prov.epsilon = opts.epsilon;
  lcd.prov.xi = opts.xi;
  lcd.prov.generator = std::string(kGeneratorId);
  lcd.prov.solver = opts.solver;
  lcd.prov.certified = opts.certified;
  lcd.prov.trace = {{opts.m, opts.delta, true}};
  return {std::move(lcd), rep};
}

TrainedLcd adaptive_lcd(const Scene& scene, const AdaptiveOptions& opts) {
  if (opts.m0 < 1) fail(Err::InvalidArgument, "m0 must be >= 1");
  const int d = scene.dimension();
  double sqrt_d = std::sqrt(static_cast<double>(d));
  double delta = opts.delta0 > 0 ? opts.delta0 : sqrt_d / 4.0;
  if (!(delta < sqrt_d)) fail(Err::InvalidArgument, "delta0 must lie in (0, sqrt(d))");
  long long m = opts.m0;

  std::vector<TraceEntry> trace;
  auto trace_text = [&]() {
    std::string s;
    for (const auto& e : trace)
      s += (s.empty() ? "" : ";") + std::to_string(e.m) + "@" + hexf(e.delta) +
           (e.success ? ":ok" : ":fail");
    return s;
  };

  for (int iter = 0; iter < opts.iteration_cap; ++iter) {
    if (m > opts.sample_budget) {
      trace.push_back({m, delta, false});
      fail(Err::Infeasible, "infeasible-at-this-scale: next iteration needs " + std::to_string(m) +
                                " samples, budget is " + std::to_string(opts.sample_budget) +
                                "; trace " + trace_text());
    }
    LbcdOptions lo;
    lo.epsilon = opts.epsilon;
    lo.xi = opts.xi;
    lo.delta = delta;
    lo.m = m;
    lo.seed = iter == 0 ? opts.seed : derive_seed(opts.seed, "alg2-iter:" + std::to_string(iter));
    lo.certified = opts.certified;
    lo.feature_cap = opts.feature_cap;
    lo.solver = opts.solver;
    LbcdResult res;
    try {
      res = lbcd(scene, lo);
    } catch (const Error& e) {
      if (e.code() == Err::ResourceLimit) {
        trace.push_back({m, delta, false});
        fail(Err::Infeasible,
             std::string("infeasible-at-this-scale: ") + e.what() + "; trace " + trace_text());
      }
      if (e.code() == Err::Separability) {
        // Halving delta restores separability (and a two-label interior),
        // so treat this like a gate failure and retry.
        trace.push_back({m, delta, false});
        m *= 2;
        delta /= 2;
        continue;
      }
      throw;
    }
    if (res.lcd) {
      trace.push_back({m, delta, true});
      res.lcd->prov.seed = opts.seed;
      res.lcd->prov.trace = trace;
      return std::move(*res.lcd);
    }
    trace.push_back({m, delta, false});
    m *= 2;
    delta /= 2;
  }
  fail(Err::Infeasible, "infeasible-at-this-scale: iteration cap " +
                            std::to_string(opts.iteration_cap) + " reached; trace " + trace_text());
}

int classify(const TrainedLcd& lcd, std::span<const double> x) {
  return classify_value(decision_value(lcd.model, phi(lcd.fmap, x)));
}

std::string model_to_text(const TrainedLcd& lcd) {
  std::string out;
  auto line = [&out](const std::string& s) { out += s + "\n"; };
  line("LCDMODEL v1");
  line("d=" + std::to_string(lcd.fmap.d));
  line("n=" + std::to_string(lcd.fmap.n));
  line("sigma=" + hexf(lcd.fmap.sigma));
  line("bias=" + hexf(lcd.model.b));
  line(std::string("mode=") + (lcd.prov.certified ? "certified" : "empirical"));
  line("prov.scene=" + lcd.prov.scene_id);
  line("prov.seed=" + std::to_string(lcd.prov.seed));
  line("prov.m=" + std::to_string(lcd.prov.m));
  line("prov.delta=" + hexf(lcd.prov.delta));
  line("prov.epsilon=" + hexf(lcd.prov.epsilon));
  line("prov.xi=" + hexf(lcd.prov.xi));
  line("prov.generator=" + lcd.prov.generator);
  line("prov.solver.c=" + hexf(lcd.prov.solver.c));
  line("prov.solver.kkt_tolerance=" + hexf(lcd.prov.solver.kkt_tolerance));
  line("prov.solver.stop_tolerance=" + hexf(lcd.prov.solver.stop_tolerance));
  line("prov.solver.max_pair_updates=" + std::to_string(lcd.prov.solver.max_pair_updates));
  line("prov.solver.fit_bias=" + std::to_string(lcd.prov.solver.fit_bias ? 1 : 0));
  std::string trace;
  for (const auto& e : lcd.prov.trace)
    trace += (trace.empty() ? "" : ";") + std::to_string(e.m) + "@" + hexf(e.delta) +
             (e.success ? ":ok" : ":fail");
  line("prov.trace=" + trace);
  line("guar.p_hat=" + hexf(lcd.report.p_hat));
  line("guar.epsilon_interior=" + hexf(lcd.report.epsilon_interior));
  line("guar.required_m=" + hexf(lcd.report.required_m));
  line("guar.sample_count=" + std::to_string(lcd.report.sample_count));
  line("guar.interior_count=" + std::to_string(lcd.report.interior_count));
  line("guar.c1=" + std::to_string(lcd.report.c1 ? 1 : 0));
  line("guar.c2=" + std::to_string(lcd.report.c2 ? 1 : 0));
  line("guar.normal_approx_valid=" + std::to_string(lcd.report.normal_approx_valid ? 1 : 0));
  line("guar.confidence=" + hexf(lcd.report.confidence));
  line("weights " + std::to_string(lcd.model.w.size()));
  for (double w : lcd.model.w) line(hexf(w));
  char csum[32];
  std::snprintf(csum, sizeof(csum), "%016llx",
                static_cast<unsigned long long>(fnv1a64(out.data(), out.size())));
  out += std::string("checksum=") + csum + "\n";
  return out;
}

TrainedLcd model_from_text(std::string_view text) {
  std::stringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto next_line = [&](const char* what) -> std::string {
    if (!std::getline(in, line))
      fail(Err::Truncated, std::string("model file is truncated (missing ") + what + ")");
    ++line_no;
    return line;
  };

  std::string header = next_line("header");
  if (header != "LCDMODEL v1") {
    if (header.rfind("LCDMODEL v", 0) == 0)
      fail(Err::Version, "unsupported model version '" + header + "'");
    fail(Err::Parse, "not an LCDMODEL file");
  }

  TrainedLcd lcd;
  std::size_t weight_count = 0;
  bool have_weights_header = false;
  std::string body = header + "\n";

  while (true) {
    std::string ln = next_line("checksum");
    if (ln.rfind("checksum=", 0) == 0) {
      char expect[32];
      std::snprintf(expect, sizeof(expect), "%016llx",
                    static_cast<unsigned long long>(fnv1a64(body.data(), body.size())));
      if (ln.substr(9) != expect)
        fail(Err::Checksum, "model file checksum mismatch (expected " + std::string(expect) +
                                ", found " + ln.substr(9) + ")");
      break;
    }
    body += ln + "\n";
    if (!have_weights_header) {
      if (ln.rfind("weights ", 0) == 0) {
        long long count = parse_ll(ln.substr(8), line_no);
        if (count < 1) fail(Err::Parse, "model file line " + std::to_string(line_no) +
                                            ": weight count must be >= 1");
        weight_count = static_cast<std::size_t>(count);
        have_weights_header = true;
        lcd.model.w.reserve(weight_count);
        continue;
      }
      auto eq = ln.find('=');
      if (eq == std::string::npos)
        fail(Err::Parse, "model file line " + std::to_string(line_no) + ": expected key=value");
      std::string key = ln.substr(0, eq), value = ln.substr(eq + 1);
      if (key == "d")
        lcd.fmap.d = static_cast<int>(parse_ll(value, line_no));
      else if (key == "n")
        lcd.fmap.n = static_cast<int>(parse_ll(value, line_no));
      else if (key == "sigma")
        lcd.fmap.sigma = parse_hexf(value, line_no);
      else if (key == "bias")
        lcd.model.b = parse_hexf(value, line_no);
      else if (key == "mode") {
        if (value != "certified" && value != "empirical")
          fail(Err::Parse, "model file line " + std::to_string(line_no) + ": bad mode '" + value + "'");
        lcd.prov.certified = value == "certified";
      } else if (key == "prov.scene")
        lcd.prov.scene_id = value;
      else if (key == "prov.seed")
        lcd.prov.seed = static_cast<std::uint64_t>(std::stoull(value));
      else if (key == "prov.m")
        lcd.prov.m = parse_ll(value, line_no);
      else if (key == "prov.delta")
        lcd.prov.delta = parse_hexf(value, line_no);
      else if (key == "prov.epsilon")
        lcd.prov.epsilon = parse_hexf(value, line_no);
      else if (key == "prov.xi")
        lcd.prov.xi = parse_hexf(value, line_no);
      else if (key == "prov.generator")
        lcd.prov.generator = value;
      else if (key == "prov.solver.c")
        lcd.prov.solver.c = parse_hexf(value, line_no);
      else if (key == "prov.solver.kkt_tolerance")
        lcd.prov.solver.kkt_tolerance = parse_hexf(value, line_no);
      else if (key == "prov.solver.stop_tolerance")
        lcd.prov.solver.stop_tolerance = parse_hexf(value, line_no);
      else if (key == "prov.solver.max_pair_updates")
        lcd.prov.solver.max_pair_updates = parse_ll(value, line_no);
      else if (key == "prov.solver.fit_bias")
        lcd.prov.solver.fit_bias = parse_ll(value, line_no) != 0;
      else if (key == "prov.trace") {
        lcd.prov.trace.clear();
        std::stringstream ts(value);
        std::string entry;
        while (std::getline(ts, entry, ';')) {
          auto at = entry.find('@');
          auto colon = entry.rfind(':');
          if (at == std::string::npos || colon == std::string::npos || colon < at)
            fail(Err::Parse, "model file line " + std::to_string(line_no) + ": bad trace entry");
          TraceEntry te;
          te.m = parse_ll(entry.substr(0, at), line_no);
          te.delta = parse_hexf(entry.substr(at + 1, colon - at - 1), line_no);
          te.success = entry.substr(colon + 1) == "ok";
          lcd.prov.trace.push_back(te);
        }
      } else if (key == "guar.p_hat")
        lcd.report.p_hat = parse_hexf(value, line_no);
      else if (key == "guar.epsilon_interior")
        lcd.report.epsilon_interior = parse_hexf(value, line_no);
      else if (key == "guar.required_m")
        lcd.report.required_m = parse_hexf(value, line_no);
      else if (key == "guar.sample_count")
        lcd.report.sample_count = parse_ll(value, line_no);
      else if (key == "guar.interior_count")
        lcd.report.interior_count = parse_ll(value, line_no);
      else if (key == "guar.c1")
        lcd.report.c1 = parse_ll(value, line_no) != 0;
      else if (key == "guar.c2")
        lcd.report.c2 = parse_ll(value, line_no) != 0;
      else if (key == "guar.normal_approx_valid")
        lcd.report.normal_approx_valid = parse_ll(value, line_no) != 0;
      else if (key == "guar.confidence")
        lcd.report.confidence = parse_hexf(value, line_no);
      else
        fail(Err::Parse, "model file line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    } else {
      if (lcd.model.w.size() >= weight_count)
        fail(Err::Parse, "model file line " + std::to_string(line_no) + ": extra weight line");
      lcd.model.w.push_back(parse_hexf(ln, line_no));
    }
  }
  if (!have_weights_header) fail(Err::Truncated, "model file is truncated (no weights section)");
  if (lcd.model.w.size() != weight_count)
    fail(Err::Truncated, "model file is truncated (expected " + std::to_string(weight_count) +
                             " weights, found " + std::to_string(lcd.model.w.size()) + ")");
  lcd.fmap.delta = lcd.prov.delta;
  if (lcd.fmap.d < 1 || lcd.fmap.n < 1 || !(lcd.fmap.sigma > 0))
    fail(Err::Parse, "model file is missing feature-map parameters");
  if (lcd.fmap.feature_count() != lcd.model.w.size())
    fail(Err::Parse, "weight count does not match n^d");
  return lcd;
}

void save_model(const TrainedLcd& lcd, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::Io, "cannot open '" + path + "' for writing");
  std::string text = model_to_text(lcd);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(Err::Io, "failed writing model to '" + path + "'");
}

TrainedLcd load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::Io, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_text(ss.str());
}

}  // namespace certicd
