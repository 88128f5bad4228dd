#pragma once

#include <string>
#include <vector>

#include "driftlab/train.hpp"

namespace driftlab {

struct LandscapeConfig {
  double half_width = 1.0;
  int grid_n = 31;
  int eval_batch = 2048;
  int sw_samples = 2048;
  int sw_projections = 100;
  KernelFamily kernel_family = KernelFamily::Laplacian;
  double kernel_bandwidth = 0.05;
  double eta = 1.0;
  std::uint64_t seed = 1;
};

struct LandscapeResult {
  int grid_n = 0;
  double half_width = 0.0;
  std::vector<double> alpha, beta;  // axis values, size grid_n
  std::vector<double> loss, sw;     // [ib*grid_n + ia]
  bool degenerate_pca = false;
  Eigen::VectorXd d1, d2;

  std::size_t argmin_loss() const;
  void write_csv(const std::string& path) const;
};

// Top-2 principal directions of the centered gradient snapshots (snapshot
// Gram trick; same eigenvectors as the covariance). Falls back to top-1 plus
// a random orthogonal complement when the snapshot rank is < 2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> top2_pca_directions(
    const std::vector<Eigen::VectorXd>& snapshots, bool* degenerate, std::uint64_t seed);

// theta(alpha,beta) = theta* + alpha d1 + beta d2 on a grid; at each node the
// training loss eta^2 mean |V|^2 (targets detached) and SW against fresh
// target samples, all nodes sharing the same eval batches and projections.
LandscapeResult landscape_scan(const MlpGenerator& model,
                               const std::vector<Eigen::VectorXd>& gradient_snapshots,
                               const LandscapeConfig& cfg, const TargetSampler& sampler);

}  // namespace driftlab
