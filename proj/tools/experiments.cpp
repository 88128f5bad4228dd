#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "driftlab/csv.hpp"
#include "driftlab/drift.hpp"
#include "driftlab/landscape.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/parallel.hpp"
#include "driftlab/rng.hpp"
#include "driftlab/spectral.hpp"
#include "driftlab/targets.hpp"
#include "driftlab/transport.hpp"

namespace driftlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

double positive(const Config& cfg, const std::string& key, double fallback) {
  const double v = cfg.number_or(key, fallback);
  if (!(v > 0.0)) throw ConfigError("config field " + key + " must be positive");
  return v;
}

long positive_int(const Config& cfg, const std::string& key, long fallback) {
  const long v = cfg.integer_or(key, fallback);
  if (v < 1) throw ConfigError("config field " + key + " must be a positive integer");
  return v;
}

KernelFamily kernel_family_from(const std::string& name, const std::string& key) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "laplacian") return KernelFamily::Laplacian;
  throw ConfigError("config field " + key + " must be \"gaussian\" or \"laplacian\"");
}

}  // namespace

TargetSampler make_target_sampler(const Config& cfg, const std::string& prefix,
                                  int* dim_out) {
  const std::string target = cfg.str_or(prefix + ".target", "checkerboard");
  if (dim_out) *dim_out = 2;
  if (target == "checkerboard")
    return [](std::size_t n, std::uint64_t seed) { return sample_checkerboard(n, seed); };
  if (target == "swiss_roll")
    return [](std::size_t n, std::uint64_t seed) { return sample_swiss_roll(n, seed); };
  if (target == "gmm4") {
    const GaussianMixture m = GaussianMixture::four_modes();
    return [m](std::size_t n, std::uint64_t seed) { return sample_gmm(m, n, seed); };
  }
  throw ConfigError("config field " + prefix +
                    ".target must be checkerboard, swiss_roll, or gmm4");
}

TrainConfig make_train_config(const Config& cfg, const std::string& prefix) {
  TrainConfig tc;
  const std::string mode = cfg.str_or(prefix + ".loss_mode", "stop_gradient");
  if (mode == "stop_gradient")
    tc.loss_mode = LossMode::StopGradient;
  else if (mode == "coupled")
    tc.loss_mode = LossMode::Coupled;
  else
    throw ConfigError("config field " + prefix +
                      ".loss_mode must be stop_gradient or coupled");
  const std::string backend = cfg.str_or(prefix + ".backend", "kernel");
  if (backend == "kernel")
    tc.backend = DriftBackend::KernelMeanShift;
  else if (backend == "sinkhorn")
    tc.backend = DriftBackend::Sinkhorn;
  else
    throw ConfigError("config field " + prefix + ".backend must be kernel or sinkhorn");

  tc.kernel_family = kernel_family_from(cfg.str_or(prefix + ".kernel", "laplacian"),
                                        prefix + ".kernel");
  tc.kernel_bandwidth = positive(cfg, prefix + ".bandwidth", 0.05);
  tc.sinkhorn.eps = positive(cfg, prefix + ".sinkhorn_eps", 0.05);
  tc.sinkhorn.tol = positive(cfg, prefix + ".sinkhorn_tol", 1e-6);
  tc.sinkhorn.max_iter = static_cast<int>(positive_int(cfg, prefix + ".sinkhorn_max_iter", 300));
  tc.eta = positive(cfg, prefix + ".eta", 1.0);
  tc.batch = static_cast<int>(positive_int(cfg, prefix + ".batch", 2048));
  tc.steps = positive_int(cfg, prefix + ".steps", 50000);
  tc.lr = positive(cfg, prefix + ".lr", 1e-3);
  tc.hidden = static_cast<int>(positive_int(cfg, prefix + ".hidden", 256));
  tc.noise_dim = static_cast<int>(positive_int(cfg, prefix + ".noise_dim", 2));
  tc.data_dim = 2;
  tc.metric_cadence = positive_int(cfg, prefix + ".metric_cadence", 500);
  tc.sw_samples = static_cast<int>(positive_int(cfg, prefix + ".sw_samples", 5000));
  tc.sw_projections = static_cast<int>(positive_int(cfg, prefix + ".sw_projections", 200));
  tc.record_snapshots = cfg.bool_or(prefix + ".record_snapshots", false);
  tc.snapshot_cadence = positive_int(cfg, prefix + ".snapshot_cadence", 500);
  try {
    tc.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid [") + prefix + "] table: " + e.what());
  }
  return tc;
}

namespace {

struct RunContext {
  Config cfg;
  fs::path out;
  std::uint64_t seed = 0;
  std::string type;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

// ---- verify_score -------------------------------------------------------

void run_verify_score(RunContext& ctx) {
  const Config& cfg = ctx.cfg;
  const double sigma = positive(cfg, "verify_score.sigma", 0.3);
  const long n = positive_int(cfg, "verify_score.n_samples", 50000);
  const long grid_n = positive_int(cfg, "verify_score.grid_n", 20);
  const double extent = positive(cfg, "verify_score.extent", 2.0);
  const double q_std = positive(cfg, "verify_score.q_std", 1.0);
  const double comp_std = positive(cfg, "verify_score.component_std", 0.15);

  GaussianMixture gmm = GaussianMixture::four_modes();
  gmm.component_std = comp_std;
  IsotropicGaussian q{{0.0, 0.0}, q_std};

  const ParticleSet probes = probe_grid_2d(static_cast<int>(grid_n), static_cast<int>(grid_n),
                                           -extent, extent, -extent, extent);
  const ScoreIdentityReport rep =
      verify_score_identity(gmm, q, sigma, static_cast<std::size_t>(n), probes, ctx.seed);

  rep.empirical.write_csv(ctx.file("empirical_field.csv").string());
  rep.analytic.write_csv(ctx.file("analytic_field.csv").string());
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.errors.size(); ++i)
      rows.push_back({rep.empirical.probes.data[2 * i], rep.empirical.probes.data[2 * i + 1],
                      rep.errors[i]});
    write_csv(ctx.file("errors.csv").string(), {"x0", "x1", "l2_error"}, rows);
  }
  json j{{"mean", rep.mean_error},
         {"max", rep.max_error},
         {"n_samples", rep.n_samples},
         {"sigma", rep.sigma},
         {"seed", rep.seed},
         {"per_probe_csv", "errors.csv"}};
  write_json(ctx.file("report.json"), j);
  std::cout << "verify_score: mean l2 error " << rep.mean_error << ", max "
            << rep.max_error << "\n";
}

// ---- spectral -----------------------------------------------------------

void run_spectral(RunContext& ctx) {
  const Config& cfg = ctx.cfg;
  const double sigma = positive(cfg, "spectral.sigma", 0.3);
  const double tau = positive(cfg, "spectral.tau", 0.3);
  const double eps = positive(cfg, "spectral.eps", 1e-3);
  const double A = positive(cfg, "spectral.amplitude", 1e-6);
  const long k_max = positive_int(cfg, "spectral.k_max", 20);
  const double t_max = positive(cfg, "spectral.t_max", 2e7);

  std::vector<double> modes;
  for (long k = 1; k <= k_max; ++k) modes.push_back(static_cast<double>(k));

  std::vector<std::vector<double>> combined;  // series id, k, measured, analytic
  auto emit = [&](const std::string& name, int series_id, const ModeDecaySim& sim,
                  const std::function<double(double)>& analytic) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      rows.push_back({modes[i], sim.times[i], analytic(modes[i])});
      combined.push_back({static_cast<double>(series_id), modes[i], sim.times[i],
                          analytic(modes[i])});
    }
    write_csv(ctx.file("times_" + name + ".csv").string(),
              {"k", "t_measured", "t_analytic"}, rows);
  };

  DecayRateSpec gspec{RateFamily::GaussianRate, sigma};
  emit("gaussian", 0, simulate_mode_decay(gspec, modes, A, 0.0, eps, t_max),
       [&](double k) { return analytic_convergence_time(gspec, k, eps); });

  DecayRateSpec lspec{RateFamily::LaplacianRate, tau};
  emit("laplacian", 1, simulate_mode_decay(lspec, modes, A, 0.0, eps, t_max),
       [&](double k) { return analytic_convergence_time(lspec, k, eps); });

  BandwidthSchedule ann;
  ann.kind = ScheduleKind::Exponential;
  ann.sigma0 = positive(cfg, "spectral.sigma0", 1.5);
  ann.sigma_min = positive(cfg, "spectral.sigma_min", 0.03);
  ann.rate = positive(cfg, "spectral.rate",
                      std::log(ann.sigma0 / ann.sigma_min) / 50.0);
  emit("annealed", 2, simulate_mode_decay(ann, modes, A, 0.0, eps, t_max),
       [&](double k) { return annealed_convergence_time(ann, k, eps); });

  write_csv(ctx.file("times.csv").string(), {"series", "k", "t_measured", "t_analytic"},
            combined);
  std::cout << "spectral: wrote T(k) for gaussian/laplacian/annealed, k=1.." << k_max
            << "\n";
}

// ---- schedule ablation --------------------------------------------------

void run_schedule_ablation(RunContext& ctx) {
  const Config& cfg = ctx.cfg;
  const double sigma0 = positive(cfg, "ablation.sigma0", 1.5);
  const double sigma_min = positive(cfg, "ablation.sigma_min", 0.03);
  const double rate = positive(cfg, "ablation.rate", 0.01);
  const double horizon = positive(cfg, "ablation.horizon", 2000.0);
  const double eps = positive(cfg, "ablation.eps", 1e-3);
  const double A = positive(cfg, "ablation.amplitude", 1e-6);
  const double t_max = positive(cfg, "ablation.t_max", 4000.0);
  const double e_dt = positive(cfg, "ablation.e_sample_dt", 1.0);
  const long k_max = positive_int(cfg, "ablation.k_max", 20);

  std::vector<double> modes;
  for (long k = 1; k <= k_max; ++k) modes.push_back(static_cast<double>(k));

  std::vector<std::pair<std::string, BandwidthSchedule>> schedules = {
      {"exponential", {ScheduleKind::Exponential, sigma0, sigma_min, rate, 0.0}},
      {"linear", {ScheduleKind::Linear, sigma0, sigma_min, 0.0, horizon}},
      {"cosine", {ScheduleKind::Cosine, sigma0, sigma_min, 0.0, horizon}},
  };
  const auto results = schedule_ablation(schedules, modes, eps, A, t_max, e_dt);

  std::ofstream combined(ctx.file("ablation_times.csv"));
  combined << "schedule,k,t_measured,t_analytic\n";
  std::ofstream etotal(ctx.file("ablation_etotal.csv"));
  etotal << "schedule,t,e_total\n";
  for (const auto& r : results) {
    std::vector<std::vector<double>> rows, erows;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double analytic = annealed_convergence_time(r.schedule, modes[i], eps);
      rows.push_back({modes[i], r.sim.times[i], analytic});
      combined << r.name << ',' << modes[i] << ',' << r.sim.times[i] << ',' << analytic
               << '\n';
    }
    for (std::size_t i = 0; i < r.sim.e_times.size(); ++i) {
      erows.push_back({r.sim.e_times[i], r.sim.e_values[i]});
      etotal << r.name << ',' << r.sim.e_times[i] << ',' << r.sim.e_values[i] << '\n';
    }
    write_csv(ctx.file("times_" + r.name + ".csv").string(),
              {"k", "t_measured", "t_analytic"}, rows);
    write_csv(ctx.file("etotal_" + r.name + ".csv").string(), {"t", "e_total"}, erows);
  }
  std::cout << "schedule_ablation: exponential r=" << rate << ", linear/cosine horizon="
            << horizon << ", modes 1.." << k_max << "\n";
}

// ---- train / sinkhorn_train --------------------------------------------

int run_train(RunContext& ctx, bool force_sinkhorn) {
  const Config& cfg = ctx.cfg;
  TrainConfig tc = make_train_config(cfg, "train");
  if (force_sinkhorn) {
    tc.backend = DriftBackend::Sinkhorn;
    tc.validate();
  }
  int dim = 2;
  const TargetSampler sampler = make_target_sampler(cfg, "train", &dim);
  const long sample_cadence = cfg.integer_or("train.sample_snapshot_cadence", 0);
  const long sample_n = positive_int(cfg, "train.sample_snapshot_n", 2000);

  TrainObserver observer;
  if (sample_cadence > 0) {
    observer = [&](long step, const MlpGenerator& model) {
      if (step % sample_cadence != 0) return;
      const ParticleSet snap = generate_samples(model, static_cast<std::size_t>(sample_n),
                                                mix_seed(ctx.seed, 0xAB + step));
      write_particles_csv(snap, ctx.file("samples_step_" + std::to_string(step) + ".csv")
                                    .string());
    };
  }

  const TrainResult res = train(tc, sampler, ctx.seed, observer);
  res.history.write_csv(ctx.file("history.csv").string());
  if (res.nan_abort) {
    json snap{{"nan_step", res.nan_step},
              {"note", "loss became non-finite; aborted with diagnostic snapshot"}};
    write_json(ctx.file("nan_snapshot.json"), snap);
    std::cerr << "train: NaN loss at step " << res.nan_step << "\n";
    return 3;
  }
  save_checkpoint(res.model, ctx.file("model.bin").string(), ctx.seed, tc.steps);
  ctx.outputs.push_back("model.bin.json");
  const ParticleSet final_samples =
      generate_samples(res.model, 5000, mix_seed(ctx.seed, 0xF1));
  write_particles_csv(final_samples, ctx.file("final_samples.csv").string());
  json j{{"final_sliced_wasserstein", res.final_sw},
         {"final_mean_drift_norm", res.final_drift_norm},
         {"steps", tc.steps},
         {"records", res.history.records.size()}};
  write_json(ctx.file("train_summary.json"), j);
  std::cout << "train: final SW " << res.final_sw << ", final drift norm "
            << res.final_drift_norm << "\n";
  return 0;
}

// ---- landscape ----------------------------------------------------------

int run_landscape(RunContext& ctx) {
  const Config& cfg = ctx.cfg;
  TrainConfig tc = make_train_config(cfg, "landscape.train");
  tc.record_snapshots = true;
  if (!cfg.has("landscape.train.snapshot_cadence"))
    tc.snapshot_cadence = std::max(1l, tc.steps / 50);
  int dim = 2;
  const TargetSampler sampler = make_target_sampler(cfg, "landscape.train", &dim);

  const TrainResult res = train(tc, sampler, ctx.seed);
  res.history.write_csv(ctx.file("history.csv").string());
  if (res.nan_abort) {
    json snap{{"nan_step", res.nan_step}};
    write_json(ctx.file("nan_snapshot.json"), snap);
    return 3;
  }
  save_checkpoint(res.model, ctx.file("model.bin").string(), ctx.seed, tc.steps);
  ctx.outputs.push_back("model.bin.json");

  LandscapeConfig lc;
  lc.half_width = positive(cfg, "landscape.half_width", 1.0);
  lc.grid_n = static_cast<int>(positive_int(cfg, "landscape.grid_n", 31));
  lc.eval_batch = static_cast<int>(positive_int(cfg, "landscape.eval_batch", 2048));
  lc.sw_samples = static_cast<int>(positive_int(cfg, "landscape.sw_samples", 2048));
  lc.sw_projections =
      static_cast<int>(positive_int(cfg, "landscape.sw_projections", 100));
  lc.kernel_family = tc.kernel_family;
  lc.kernel_bandwidth = tc.kernel_bandwidth;
  lc.eta = tc.eta;
  lc.seed = mix_seed(ctx.seed, 0x1a);

  const LandscapeResult scan =
      landscape_scan(res.model, res.gradient_snapshots, lc, sampler);
  scan.write_csv(ctx.file("landscape.csv").string());
  json j{{"degenerate_pca", scan.degenerate_pca},
         {"argmin_loss_index", scan.argmin_loss()},
         {"grid_n", scan.grid_n},
         {"half_width", scan.half_width}};
  write_json(ctx.file("landscape_summary.json"), j);
  std::cout << "landscape: " << scan.grid_n << "x" << scan.grid_n << " scan done\n";
  return 0;
}

}  // namespace

int run_experiment(const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx;
  try {
    ctx.cfg = Config::parse_file(opt.config_path);
    ctx.type = ctx.cfg.str("experiment.type");
    ctx.seed = opt.seed_override
                   ? opt.seed
                   : static_cast<std::uint64_t>(ctx.cfg.integer_or("experiment.seed", 1));
    const std::string out_dir =
        !opt.out_dir.empty() ? opt.out_dir : ctx.cfg.str_or("experiment.out_dir", ".");
    ctx.out = fs::path(out_dir);
    fs::create_directories(ctx.out);

    int status = 0;
    if (ctx.type == "verify_score")
      run_verify_score(ctx);
    else if (ctx.type == "spectral")
      run_spectral(ctx);
    else if (ctx.type == "schedule_ablation")
      run_schedule_ablation(ctx);
    else if (ctx.type == "train")
      status = run_train(ctx, false);
    else if (ctx.type == "sinkhorn_train")
      status = run_train(ctx, true);
    else if (ctx.type == "landscape")
      status = run_landscape(ctx);
    else
      throw ConfigError("config field experiment.type has unknown value \"" + ctx.type +
                        "\"");

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest{{"experiment", ctx.type},
                  {"config_path", opt.config_path},
                  {"seed", ctx.seed},
                  {"version", kVersion},
                  {"threads", max_threads()},
                  {"wall_time_s", wall},
                  {"status", status},
                  {"outputs", ctx.outputs},
                  {"config_echo", ctx.cfg.raw_text()}};
    write_json(ctx.out / "manifest.json", manifest);
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}

int validate_config(const std::string& path) {
  try {
    const Config cfg = Config::parse_file(path);
    const std::string type = cfg.str("experiment.type");
    if (type == "verify_score") {
      positive(cfg, "verify_score.sigma", 0.3);
      positive_int(cfg, "verify_score.n_samples", 50000);
    } else if (type == "spectral") {
      positive(cfg, "spectral.sigma", 0.3);
      positive(cfg, "spectral.tau", 0.3);
    } else if (type == "schedule_ablation") {
      positive(cfg, "ablation.sigma0", 1.5);
      positive(cfg, "ablation.rate", 0.01);
    } else if (type == "train" || type == "sinkhorn_train") {
      TrainConfig tc = make_train_config(cfg, "train");
      if (type == "sinkhorn_train") {
        tc.backend = DriftBackend::Sinkhorn;
        tc.validate();
      }
      make_target_sampler(cfg, "train", nullptr);
    } else if (type == "landscape") {
      make_train_config(cfg, "landscape.train");
      make_target_sampler(cfg, "landscape.train", nullptr);
      positive(cfg, "landscape.half_width", 1.0);
    } else {
      throw ConfigError("config field experiment.type has unknown value \"" + type + "\"");
    }
    std::cout << "config ok: " << path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace driftlab::cli
