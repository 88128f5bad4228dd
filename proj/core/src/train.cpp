#include "driftlab/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "driftlab/detail/pairwise.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/rng.hpp"
#include "driftlab/transport.hpp"

namespace driftlab {

void TrainConfig::validate() const {
  if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("TrainConfig: eta must be positive");
  if (steps < 1) throw std::invalid_argument("TrainConfig: steps must be >= 1");
  if (hidden < 1 || noise_dim < 1 || data_dim < 1)
    throw std::invalid_argument("TrainConfig: dims must be positive");
  if (metric_cadence < 1) throw std::invalid_argument("TrainConfig: metric_cadence >= 1");
  if (backend == DriftBackend::KernelMeanShift) {
    KernelSpec spec{kernel_family, kernel_bandwidth, data_dim};
    spec.validate();
  } else {
    if (!(sinkhorn.eps > 0.0)) throw std::invalid_argument("TrainConfig: sinkhorn.eps > 0");
    if (loss_mode == LossMode::Coupled)
      throw std::invalid_argument(
          "TrainConfig: Coupled gradients through the Sinkhorn solver are unsupported");
  }
}

RowMat sample_noise(std::size_t n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  RowMat Z(n, dim);
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (Eigen::Index j = 0; j < Z.cols(); ++j) Z(i, j) = rng.normal();
  return Z;
}

ParticleSet generate_samples(const MlpGenerator& model, std::size_t n, std::uint64_t seed) {
  const RowMat Y = mlp_forward(model, sample_noise(n, model.in_dim, seed));
  ParticleSet ps(static_cast<int>(n), model.out_dim);
  std::copy(Y.data(), Y.data() + Y.size(), ps.data.data());
  return ps;
}

void TrainHistory::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "step,mean_drift_norm,sliced_wasserstein,loss\n";
  char buf[140];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g\n", r.step, r.mean_drift_norm,
                  r.sliced_w, r.loss);
    out << buf;
  }
}

namespace {

ParticleSet particles_from(const RowMat& Y) {
  ParticleSet ps(static_cast<int>(Y.rows()), static_cast<int>(Y.cols()));
  std::copy(Y.data(), Y.data() + Y.size(), ps.data.data());
  return ps;
}

double mean_norm_rows(const RowMat& V) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < V.rows(); ++i) acc += V.row(i).norm();
  return acc / static_cast<double>(V.rows());
}

struct StepEval {
  RowMat V;
  RowMat dY;
  double loss = 0.0;
};

// drift + loss gradient at the current batch; p-samples are constants.
void eval_step(const TrainConfig& cfg, const RowMat& Y, const ParticleSet& data,
               StepEval& ev) {
  const std::size_t B = Y.rows();
  const int d = cfg.data_dim;
  ev.V.resize(B, d);
  if (cfg.backend == DriftBackend::KernelMeanShift) {
    if (cfg.loss_mode == LossMode::Coupled) {
      ev.dY.resize(B, d);
      detail::coupled_loss_and_input_grad(Y.data(), B, data.data.data(), data.n(), d,
                                          cfg.kernel_family, cfg.kernel_bandwidth, cfg.eta,
                                          ev.V.data(), &ev.loss, ev.dY.data());
      return;
    }
    detail::mean_shift_field(Y.data(), B, data.data.data(), data.n(), Y.data(), B, d,
                             cfg.kernel_family, cfg.kernel_bandwidth, ev.V.data(), nullptr);
  } else {
    const SinkhornDrift sd = sinkhorn_drift(particles_from(Y), data, cfg.sinkhorn.eps,
                                            cfg.sinkhorn.max_iter, cfg.sinkhorn.tol);
    std::copy(sd.field.vectors.data.begin(), sd.field.vectors.data.end(), ev.V.data());
  }
  // stop-gradient: targets x + eta V are constants, so
  // dL/dY = (2/B)(Y - (Y + eta V)) = -(2 eta / B) V and L = eta^2 mean |V|^2.
  const double invB = 1.0 / static_cast<double>(B);
  ev.dY = (-2.0 * cfg.eta * invB) * ev.V;
  ev.loss = cfg.eta * cfg.eta * invB * ev.V.squaredNorm();
}

}  // namespace

TrainResult train(const TrainConfig& config, const TargetSampler& sampler,
                  std::uint64_t seed, const TrainObserver& observer) {
  config.validate();
  TrainResult res;
  res.model = MlpGenerator::init_he(config.noise_dim, config.hidden, config.data_dim,
                                    mix_seed(seed, 1));
  Eigen::VectorXd params = res.model.params();
  AdamState adam;
  adam.init(params.size());
  MlpGrads grads;
  grads.resize_like(res.model);
  MlpCache cache;
  StepEval ev;
  const std::uint64_t proj_seed = mix_seed(seed, 7);
  const KernelSpec metric_kernel{config.kernel_family, config.kernel_bandwidth,
                                 config.data_dim};

  auto sw_eval = [&](std::uint64_t stream) {
    const ParticleSet gen =
        generate_samples(res.model, config.sw_samples, mix_seed(seed, stream));
    const ParticleSet ref = sampler(config.sw_samples, mix_seed(seed, stream + 1));
    return sliced_wasserstein(gen, ref, config.sw_projections, proj_seed);
  };

  for (long s = 0; s < config.steps; ++s) {
    const RowMat Z = sample_noise(config.batch, config.noise_dim, mix_seed(seed, 100 + 2 * s));
    mlp_forward_cached(res.model, Z, cache);
    const ParticleSet data = sampler(config.batch, mix_seed(seed, 101 + 2 * s));
    eval_step(config, cache.Y, data, ev);

    if (!std::isfinite(ev.loss)) {
      res.nan_abort = true;
      res.nan_step = s;
      break;
    }

    if (s % config.metric_cadence == 0) {
      TrainRecord rec;
      rec.step = s;
      rec.mean_drift_norm = mean_norm_rows(ev.V);
      rec.loss = ev.loss;
      rec.sliced_w = sw_eval(1000000 + 2 * static_cast<std::uint64_t>(s));
      res.history.records.push_back(rec);
      if (observer) observer(s, res.model);
    }

    mlp_backward(res.model, cache, ev.dY, grads);
    const Eigen::VectorXd flat = grads.flat();
    if (config.record_snapshots && s % config.snapshot_cadence == 0)
      res.gradient_snapshots.push_back(flat);
    adam_step(params, flat, adam, config.lr);
    res.model.set_params(params);
  }

  if (!res.nan_abort) {
    // final metrics on the post-update model
    const RowMat Zf =
        sample_noise(config.batch, config.noise_dim, mix_seed(seed, 3000001));
    const RowMat Yf = mlp_forward(res.model, Zf);
    const ParticleSet dataf = sampler(config.batch, mix_seed(seed, 3000002));
    res.final_drift_norm =
        config.backend == DriftBackend::KernelMeanShift
            ? mean_drift_norm(particles_from(Yf), dataf, metric_kernel)
            : [&] {
                const SinkhornDrift sd =
                    sinkhorn_drift(particles_from(Yf), dataf, config.sinkhorn.eps,
                                   config.sinkhorn.max_iter, config.sinkhorn.tol);
                double acc = 0.0;
                for (std::size_t i = 0; i < sd.field.vectors.n(); ++i) {
                  double n2 = 0.0;
                  for (int j = 0; j < sd.field.vectors.dim; ++j)
                    n2 += sd.field.vectors.data[i * sd.field.vectors.dim + j] *
                          sd.field.vectors.data[i * sd.field.vectors.dim + j];
                  acc += std::sqrt(n2);
                }
                return acc / static_cast<double>(sd.field.vectors.n());
              }();
    res.final_sw = sw_eval(4000000);
    TrainRecord rec;
    rec.step = config.steps;
    rec.mean_drift_norm = res.final_drift_norm;
    rec.sliced_w = res.final_sw;
    rec.loss = res.history.records.empty() ? 0.0 : res.history.records.back().loss;
    res.history.records.push_back(rec);
  }
  return res;
}

void save_checkpoint(const MlpGenerator& model, const std::string& path,
                     std::uint64_t seed, long step) {
  const Eigen::VectorXd p = model.params();
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open for write: " + path);
  bin.write(reinterpret_cast<const char*>(p.data()),
            static_cast<std::streamsize>(p.size() * sizeof(double)));
  std::ofstream hdr(path + ".json");
  hdr << "{\"in_dim\":" << model.in_dim << ",\"hidden\":" << model.hidden
      << ",\"out_dim\":" << model.out_dim << ",\"params\":" << p.size()
      << ",\"seed\":" << seed << ",\"step\":" << step << "}\n";
}

MlpGenerator load_checkpoint(const std::string& path) {
  std::ifstream hdr(path + ".json");
  if (!hdr) throw std::runtime_error("missing checkpoint header: " + path + ".json");
  std::string text((std::istreambuf_iterator<char>(hdr)), std::istreambuf_iterator<char>());
  auto field = [&](const std::string& key) {
    const auto pos = text.find("\"" + key + "\":");
    if (pos == std::string::npos)
      throw std::runtime_error("checkpoint header missing field " + key);
    return std::strtol(text.c_str() + pos + key.size() + 3, nullptr, 10);
  };
  const int in_dim = static_cast<int>(field("in_dim"));
  const int hidden = static_cast<int>(field("hidden"));
  const int out_dim = static_cast<int>(field("out_dim"));
  MlpGenerator g = MlpGenerator::init_he(in_dim, hidden, out_dim, 0);
  Eigen::VectorXd p(g.param_count());
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open checkpoint: " + path);
  bin.read(reinterpret_cast<char*>(p.data()),
           static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(p.size() * sizeof(double)))
    throw std::runtime_error("checkpoint truncated: " + path);
  g.set_params(p);
  return g;
}

}  // namespace driftlab
