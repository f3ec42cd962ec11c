// mtqueue: bounds, truncation and transient analysis for M_t|M_t|S queues
// with state-dependent catastrophes.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mtq/errors.hpp"
#include "mtq/example.hpp"
#include "mtq/io.hpp"

#ifndef MTQ_VERSION
#define MTQ_VERSION "0.0.0"
#endif

namespace {

using mtq::Json;

struct RunConfig {
  std::string model_path;
  std::string weights = "doubling";
  std::uint64_t k_eval = mtq::kDefaultKEval;
  std::size_t n = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::optional<double> step;
  std::uint64_t initial = 0;
  std::vector<std::uint64_t> states;
  double target = 1e-6;
  double horizon = 0.0;
  std::string criterion = "both";
  double settle = 0.0;
  std::optional<double> period;
  double tol = 1e-5;
  std::size_t samples = 101;
  std::size_t record_every = mtq::kDefaultRecordEvery;
  std::uint64_t paths = 10000;
  std::uint64_t seed = 1;
  std::vector<double> times;
  std::string regime;
  std::optional<double> eps;
  std::string out;
};

// Writes to --out, or stdout when no path was given.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw mtq::ConfigError("--out", "cannot write " + cfg.out);
  file << text;
}

Json provenance(const RunConfig& cfg, const mtq::QueueModel& model, const std::string& command) {
  return {{"tool", "mtqueue"},
          {"version", MTQ_VERSION},
          {"command", command},
          {"model", cfg.model_path},
          {"model_hash", mtq::hex64(mtq::model_hash(model))}};
}

mtq::Provenance csv_provenance(const RunConfig& cfg, const mtq::QueueModel& model,
                               const std::string& command) {
  return {{"tool", std::string("mtqueue ") + MTQ_VERSION},
          {"command", command},
          {"model", cfg.model_path},
          {"model_hash", mtq::hex64(mtq::model_hash(model))}};
}

double period_of(const RunConfig& cfg, const mtq::QueueModel& model) {
  if (cfg.period) return *cfg.period;
  const auto p = model.period();
  if (!p) throw mtq::PreconditionError("rates are not periodic; pass --period");
  return *p;
}

double step_of(const RunConfig& cfg, const mtq::QueueModel& model) {
  return cfg.step ? *cfg.step : mtq::default_step(model, cfg.n);
}

void require_level(const RunConfig& cfg) {
  if (cfg.n < 1) throw mtq::PreconditionError("--n must be >= 1");
  if (cfg.initial > cfg.n) throw mtq::PreconditionError("--initial must be <= --n");
}

int run_check(const RunConfig& cfg) {
  const auto model = mtq::load_model(cfg.model_path);
  const auto w = mtq::parse_weight_spec(cfg.weights);
  const auto verdict = mtq::check_weak_ergodicity(model, w, cfg.k_eval);
  Json out = provenance(cfg, model, "check");
  out["weights"] = w.describe();
  out["W"] = w.W();
  out["verdict"] = mtq::to_json(verdict);
  emit(cfg, out.dump(2) + "\n");
  return 0;
}

int run_bounds(const RunConfig& cfg) {
  const auto model = mtq::load_model(cfg.model_path);
  const auto w = mtq::parse_weight_spec(cfg.weights);
  std::optional<mtq::Regime> mode;
  if (!cfg.regime.empty()) mode = mtq::parse_regime(cfg.regime);
  std::vector<double> times = cfg.times.empty() ? std::vector<double>{0, 1, 2, 4, 8} : cfg.times;
  std::vector<mtq::State> states =
      cfg.states.empty() ? std::vector<mtq::State>{cfg.initial} : cfg.states;
  for (double t : times) {
    if (!(t >= 0.0)) throw mtq::PreconditionError("--times must be >= 0");
  }

  Json out = provenance(cfg, model, "bounds");
  out["weighted"] = mtq::to_json(mtq::bound_report(model, w, times, states, cfg.k_eval));
  if (mode) {
    Json rows = Json::array();
    for (double t : times) {
      for (mtq::State k : states) {
        if (cfg.eps) {
          rows.push_back(mtq::to_json(mtq::regime_bounds(model, *mode, *cfg.eps, t, k)));
        } else {
          const auto best = mtq::sweep_epsilon(model, *mode, t, k);
          Json row = mtq::to_json(best.bound);
          row["eps_feasible_points"] = best.feasible;
          rows.push_back(std::move(row));
        }
      }
    }
    out["regime"] = std::move(rows);
  }
  emit(cfg, out.dump(2) + "\n");
  return 0;
}

int run_truncate(const RunConfig& cfg) {
  const auto model = mtq::load_model(cfg.model_path);
  const auto criterion = mtq::parse_criterion(cfg.criterion);
  if (!(cfg.horizon >= 0.0)) throw mtq::PreconditionError("--horizon must be >= 0");
  if (!(cfg.target > 0.0) || !std::isfinite(cfg.target)) {
    throw mtq::PreconditionError("--target must be finite and positive");
  }
  Json out = provenance(cfg, model, "truncate");
  mtq::TruncationChoice choice;
  if (!cfg.regime.empty()) {
    // Regime weights (1 + eps)^k with the regime's own envelope.
    const auto mode = mtq::parse_regime(cfg.regime);
    if (!cfg.eps) throw mtq::PreconditionError("--regime needs --eps");
    const double L = mtq::essential_bound(model).value;
    const auto w = mtq::WeightSequence::powers(1.0 + *cfg.eps);
    const auto probe = mtq::regime_truncation_bounds(model, mode, *cfg.eps, 1, cfg.horizon, cfg.initial);
    mtq::Envelope env;
    env.M = probe.M;
    env.log_M = probe.log_M;
    env.a = probe.a;
    choice = mtq::min_truncation_level(L, w, env, cfg.horizon, cfg.initial, cfg.target, criterion);
    out["regime"] = mtq::to_string(mode);
    out["eps"] = *cfg.eps;
    out["envelope"] = {{"log_M", probe.log_M}, {"a", probe.a}};
  } else {
    const auto w = mtq::parse_weight_spec(cfg.weights);
    const auto alpha = mtq::alpha_decay(model, w, cfg.k_eval);
    const auto env = mtq::fit_envelope(alpha, period_of(cfg, model));
    choice = mtq::min_truncation_level(model, w, env, cfg.horizon, cfg.initial, cfg.target,
                                       criterion);
    out["envelope"] = mtq::to_json(env);
  }
  out["target"] = cfg.target;
  out["criterion"] = cfg.criterion;
  out["n"] = choice.n;
  out["report"] = mtq::to_json(choice.report);
  emit(cfg, out.dump(2) + "\n");
  return 0;
}

int run_solve(const RunConfig& cfg) {
  const auto model = mtq::load_model(cfg.model_path);
  require_level(cfg);
  if (!(cfg.t1 >= cfg.t0)) throw mtq::PreconditionError("--t1 must be >= --t0");
  const double h = step_of(cfg, model);
  const auto traj = mtq::integrate_forward(model, cfg.n, mtq::ProbabilityVector::point_mass(cfg.n, cfg.initial),
                                           cfg.t0, cfg.t1, h, cfg.record_every);
  auto prov = csv_provenance(cfg, model, "solve");
  prov.insert(prov.end(), {{"n", std::to_string(cfg.n)},
                           {"initial", std::to_string(cfg.initial)},
                           {"t0", mtq::format_real(cfg.t0)},
                           {"t1", mtq::format_real(cfg.t1)},
                           {"step", mtq::format_real(h)},
                           {"record_every", std::to_string(cfg.record_every)},
                           {"max_drift", mtq::format_real(traj.max_drift)}});
  std::ostringstream csv;
  mtq::write_trajectory_csv(csv, traj, prov);
  emit(cfg, csv.str());
  return 0;
}

int run_limit(const RunConfig& cfg) {
  const auto model = mtq::load_model(cfg.model_path);
  require_level(cfg);
  const double h = step_of(cfg, model);
  const double period = period_of(cfg, model);
  const auto limit = mtq::limiting_regime(model, cfg.n, cfg.settle, period, cfg.tol, h, cfg.samples);
  auto prov = csv_provenance(cfg, model, "limit");
  prov.insert(prov.end(), {{"n", std::to_string(cfg.n)},
                           {"settle", mtq::format_real(cfg.settle)},
                           {"period", mtq::format_real(period)},
                           {"step", mtq::format_real(h)},
                           {"tol", mtq::format_real(cfg.tol)},
                           {"start_gap", mtq::format_real(limit.start_gap)},
                           {"period_gap", mtq::format_real(limit.period_gap)},
                           {"max_period_gap", mtq::format_real(limit.max_period_gap)}});
  std::ostringstream csv;
  mtq::write_trajectory_csv(csv, limit.trajectory, prov);
  emit(cfg, csv.str());
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  const auto model = mtq::load_model(cfg.model_path);
  if (cfg.times.empty()) throw mtq::PreconditionError("--times needs at least one time");
  const auto est = mtq::simulate_estimate(model, cfg.initial, cfg.times, cfg.paths, cfg.seed);
  Json out = provenance(cfg, model, "simulate");
  out["initial"] = cfg.initial;
  out["simulation"] = mtq::to_json(est);
  emit(cfg, out.dump(2) + "\n");
  return 0;
}

int run_example(const RunConfig& cfg) {
  mtq::ExampleOptions opts;
  if (cfg.step) opts.h = *cfg.step;
  const auto run = mtq::run_example(opts);
  const auto model = mtq::example_model();
  const auto& c = run.constants;

  std::cout << fmt::format("W = {:.17g}\n", c.W);
  std::cout << fmt::format("W_{} = 2^{:.12g} / {}   (log W_n = {:.17g})\n", c.n,
                           c.log_W_n / std::log(2.0) + std::log2(static_cast<double>(c.n)), c.n,
                           c.log_W_n);
  std::cout << fmt::format("L = {:.6e}   (grid max {:.6e}, step {:.1e})\n", c.L.value, c.L.grid_max,
                           c.L.grid_step);
  std::cout << fmt::format("envelope of {}: M = {:.6f}, a = {:.12g}, verified {} ({} pairs)\n",
                           c.envelope.alpha_description, c.envelope.M, c.envelope.a,
                           c.envelope_check.ok ? "yes" : "NO", c.envelope_check.pairs);
  std::cout << fmt::format("envelope of inf_k alpha_k: M = {:.6f}, a = {:.12g}\n",
                           c.alpha_envelope.M, c.alpha_envelope.a);
  std::cout << fmt::format("weakly ergodic: {} ({})\n", mtq::to_string(c.verdict.outcome),
                           c.verdict.reason);
  std::cout << fmt::format("n = {} certified for t <= {}: {} (tv {:.3e}, mean {:.3e}); "
                           "smallest certified n = {}\n\n",
                           opts.n, opts.horizon, run.certified ? "yes" : "NO",
                           run.certificate.tv_bound, run.certificate.mean_bound, run.min_level.n);

  std::cout << fmt::format("truncation bounds at t = {}, X(0) = 0\n", opts.horizon);
  std::cout << fmt::format("{:>6} {:>14} {:>14} {:>14} {:>14}\n", "n", "tv exact", "tv rounded",
                           "mean exact", "mean rounded");
  for (const auto& row : run.truncation_table) {
    std::cout << fmt::format("{:>6} {:>14.4e} {:>14.4e} {:>14.4e} {:>14.4e}\n", row.n,
                             row.exact.tv_bound, row.rounded_tv, row.exact.mean_bound,
                             row.rounded_mean);
  }
  std::cout << fmt::format("\nbound vs actual, X(0) = {} against X(0) = 0, n = {}\n",
                           opts.contrast_state, opts.n);
  std::cout << fmt::format("{:>4} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "t", "l1 actual",
                           "4 g_k e^-A", "lower form", "2^(k+4)e^-3t", "|dE| actual");
  for (const auto& row : run.contraction) {
    std::cout << fmt::format("{:>4} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}\n", row.t,
                             row.l1, row.tv_bound, row.lower_form, row.simple_form, row.mean_gap);
  }
  std::cout << fmt::format("\nlimiting regime witnesses: start gap {:.3e}, period gap {:.3e}, "
                           "max period gap {:.3e}\n",
                           run.limit.start_gap, run.limit.period_gap, run.limit.max_period_gap);

  if (!cfg.out.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    RunConfig named = cfg;
    named.model_path = "<built-in example>";
    auto prov = csv_provenance(named, model, "example");
    prov.insert(prov.end(), {{"n", std::to_string(opts.n)},
                             {"settle", mtq::format_real(opts.settle)},
                             {"step", mtq::format_real(opts.h)}});
    const auto& traj = run.limit.trajectory;
    std::vector<double> p0;
    for (const auto& p : traj.states) p0.push_back(p[0]);
    std::ofstream f1(dir / "limit_p0.csv", std::ios::binary);
    mtq::write_series_csv(f1, "p0", traj.times, p0, prov);
    std::ofstream f2(dir / "limit_mean.csv", std::ios::binary);
    mtq::write_series_csv(f2, "mean", traj.times, traj.means, prov);

    Json report = provenance(named, model, "example");
    report["W"] = c.W;
    report["n"] = c.n;
    report["W_n"] = c.W_n;
    report["log_W_n"] = c.log_W_n;
    report["L"] = {{"value", c.L.value}, {"grid_max", c.L.grid_max}, {"grid_step", c.L.grid_step}};
    report["envelope"] = mtq::to_json(c.envelope);
    report["envelope_verified"] = c.envelope_check.ok;
    report["alpha_envelope"] = mtq::to_json(c.alpha_envelope);
    report["verdict"] = mtq::to_json(c.verdict);
    report["certificate"] = mtq::to_json(run.certificate);
    report["certified"] = run.certified;
    report["min_level"] = run.min_level.n;
    Json table = Json::array();
    for (const auto& row : run.truncation_table) {
      Json r = mtq::to_json(row.exact);
      r["rounded_tv"] = row.rounded_tv;
      r["rounded_mean"] = row.rounded_mean;
      table.push_back(std::move(r));
    }
    report["truncation_table"] = std::move(table);
    Json contraction = Json::array();
    for (const auto& row : run.contraction) {
      contraction.push_back({{"t", row.t},
                             {"l1", row.l1},
                             {"mean_gap", row.mean_gap},
                             {"tv_bound", row.tv_bound},
                             {"lower_form", row.lower_form},
                             {"simple_form", row.simple_form}});
    }
    report["contraction"] = std::move(contraction);
    report["limit"] = {{"start_gap", run.limit.start_gap},
                       {"period_gap", run.limit.period_gap},
                       {"max_period_gap", run.limit.max_period_gap}};
    std::ofstream f3(dir / "report.json", std::ios::binary);
    f3 << report.dump(2) << "\n";
  }
  return 0;
}

int fail(int code, const std::string& kind, const std::string& message,
         const std::string& path = "") {
  Json err{{"error", kind}, {"message", message}};
  if (!path.empty()) err["path"] = path;
  std::cerr << err.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds, truncation and transient analysis for M_t|M_t|S queues with catastrophes"};
  app.set_version_flag("--version", MTQ_VERSION);
  app.require_subcommand(1);
  RunConfig cfg;

  auto model_opt = [&](CLI::App* sub) { sub->add_option("--model", cfg.model_path, "model JSON")->required(); };
  auto weights_opt = [&](CLI::App* sub) {
    sub->add_option("--weights", cfg.weights, "doubling | geometric:R[:D1] | custom:path.json")
        ->capture_default_str();
    sub->add_option("--k-eval", cfg.k_eval, "states scanned explicitly for inf_k alpha_k")
        ->capture_default_str();
  };
  auto out_opt = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "output path (default stdout)"); };
  auto step_opt = [&](CLI::App* sub) {
    sub->add_option("--step", cfg.step, "RK4 step (default: 0.1 / Lambda_n rounded down)");
  };

  auto* check = app.add_subcommand("check", "weak-ergodicity verdict and alpha statistics");
  model_opt(check);
  weights_opt(check);
  out_opt(check);

  auto* bounds = app.add_subcommand("bounds", "weighted-norm and regime bound tables");
  model_opt(bounds);
  weights_opt(bounds);
  bounds->add_option("--times", cfg.times, "evaluation times")->delimiter(',');
  bounds->add_option("--initial", cfg.initial, "initial state k");
  bounds->add_option("--states", cfg.states, "initial states (overrides --initial)")->delimiter(',');
  bounds->add_option("--regime", cfg.regime, "catastrophe | service");
  bounds->add_option("--eps", cfg.eps, "regime eps (default: swept)");
  out_opt(bounds);

  auto* truncate = app.add_subcommand("truncate", "smallest certified truncation level");
  model_opt(truncate);
  weights_opt(truncate);
  truncate->add_option("--target", cfg.target, "error target")->capture_default_str();
  truncate->add_option("--horizon", cfg.horizon, "time horizon")->required();
  truncate->add_option("--initial", cfg.initial, "initial state j")->capture_default_str();
  truncate->add_option("--criterion", cfg.criterion, "tv | mean | both")->capture_default_str();
  truncate->add_option("--period", cfg.period, "envelope period (default: rate period)");
  truncate->add_option("--regime", cfg.regime, "use regime weights (1+eps)^k: catastrophe | service");
  truncate->add_option("--eps", cfg.eps, "regime eps");
  out_opt(truncate);

  auto* solve = app.add_subcommand("solve", "integrate the truncated forward equations to CSV");
  model_opt(solve);
  solve->add_option("--n", cfg.n, "truncation level")->required();
  solve->add_option("--t0", cfg.t0, "start time")->capture_default_str();
  solve->add_option("--t1", cfg.t1, "end time")->required();
  step_opt(solve);
  solve->add_option("--initial", cfg.initial, "initial state")->capture_default_str();
  solve->add_option("--record-every", cfg.record_every, "steps between rows")->capture_default_str();
  out_opt(solve);

  auto* limit = app.add_subcommand("limit", "limiting regime over one period to CSV");
  model_opt(limit);
  limit->add_option("--n", cfg.n, "truncation level")->required();
  limit->add_option("--settle", cfg.settle, "settling time")->required();
  limit->add_option("--period", cfg.period, "period (default: rate period)");
  limit->add_option("--tol", cfg.tol, "witness tolerance")->capture_default_str();
  limit->add_option("--samples", cfg.samples, "samples over the period")->capture_default_str();
  step_opt(limit);
  out_opt(limit);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates by thinning to JSON");
  model_opt(simulate);
  simulate->add_option("--initial", cfg.initial, "initial state")->capture_default_str();
  simulate->add_option("--times", cfg.times, "evaluation times")->delimiter(',')->required();
  simulate->add_option("--paths", cfg.paths, "number of paths")->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "seed")->capture_default_str();
  out_opt(simulate);

  auto* example = app.add_subcommand("example", "worked example: S = 1e12, periodic rates");
  step_opt(example);
  example->add_option("--out", cfg.out, "directory for the limiting-regime CSVs and report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "config", e.what());
  }

  try {
    if (*check) return run_check(cfg);
    if (*bounds) return run_bounds(cfg);
    if (*truncate) return run_truncate(cfg);
    if (*solve) return run_solve(cfg);
    if (*limit) return run_limit(cfg);
    if (*simulate) return run_simulate(cfg);
    if (*example) return run_example(cfg);
  } catch (const mtq::ConfigError& e) {
    return fail(2, "config", e.reason(), e.path());
  } catch (const mtq::PreconditionError& e) {
    return fail(3, "precondition", e.what());
  } catch (const mtq::NumericalError& e) {
    return fail(4, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(4, "numerical", e.what());
  }
  return 0;
}
