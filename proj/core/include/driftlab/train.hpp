#pragma once

#include <functional>
#include <string>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/mlp.hpp"
#include "driftlab/particle_set.hpp"

namespace driftlab {

enum class LossMode { StopGradient, Coupled };
enum class DriftBackend { KernelMeanShift, Sinkhorn };

struct SinkhornBackendConfig {
  double eps = 0.05;
  double tol = 1e-6;
  int max_iter = 300;
};

struct TrainConfig {
  LossMode loss_mode = LossMode::StopGradient;
  DriftBackend backend = DriftBackend::KernelMeanShift;
  KernelFamily kernel_family = KernelFamily::Laplacian;
  double kernel_bandwidth = 0.05;
  SinkhornBackendConfig sinkhorn;
  double eta = 1.0;  // drift step scale in x_tilde = x + eta V
  int batch = 2048;
  long steps = 50000;
  double lr = 1e-3;
  int hidden = 256;
  int noise_dim = 2;
  int data_dim = 2;
  long metric_cadence = 500;
  int sw_samples = 5000;
  int sw_projections = 200;
  bool record_snapshots = false;
  long snapshot_cadence = 500;

  void validate() const;  // rejects Sinkhorn + Coupled (unsupported, declared)
};

using TargetSampler = std::function<ParticleSet(std::size_t, std::uint64_t)>;

struct TrainRecord {
  long step = 0;
  double mean_drift_norm = 0.0;
  double sliced_w = 0.0;
  double loss = 0.0;
};

struct TrainHistory {
  std::vector<TrainRecord> records;
  void write_csv(const std::string& path) const;
};

struct TrainResult {
  MlpGenerator model;
  TrainHistory history;
  std::vector<Eigen::VectorXd> gradient_snapshots;
  bool nan_abort = false;
  long nan_step = -1;
  double final_drift_norm = 0.0;
  double final_sw = 0.0;
};

// Called at every metric-cadence step with the pre-update model.
using TrainObserver = std::function<void(long step, const MlpGenerator& model)>;

// Per step: fresh noise batch -> forward -> drift targets against a fresh
// data batch (the generated batch doubles as q-samples) -> loss-mode gradient
// -> Adam. Metrics recorded every metric_cadence steps and once after the
// final update.
TrainResult train(const TrainConfig& config, const TargetSampler& sampler,
                  std::uint64_t seed, const TrainObserver& observer = {});

RowMat sample_noise(std::size_t n, int dim, std::uint64_t seed);
ParticleSet generate_samples(const MlpGenerator& model, std::size_t n, std::uint64_t seed);

// Flat-binary checkpoint (parameter array) with a JSON sidecar header.
void save_checkpoint(const MlpGenerator& model, const std::string& path,
                     std::uint64_t seed, long step);
MlpGenerator load_checkpoint(const std::string& path);

}  // namespace driftlab
