#pragma once

#include <span>
#include <string>
#include <vector>

namespace driftlab {

// n points in d dimensions, row-major, value semantics. The empirical
// carrier for both data samples and generated samples.
struct ParticleSet {
  int dim = 0;
  std::vector<double> data;  // size() == n()*dim

  ParticleSet() = default;
  ParticleSet(int n, int d) : dim(d), data(static_cast<std::size_t>(n) * d, 0.0) {}

  std::size_t n() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return {data.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> point(std::size_t i) {
    return {data.data() + i * dim, static_cast<std::size_t>(dim)};
  }

  // Throws std::invalid_argument on non-finite entries or empty/invalid shape.
  void validate() const;

  bool all_finite() const;
};

// Plain-decimal CSV, one row per point, 17 significant digits (lossless
// double round-trip).
void write_particles_csv(const ParticleSet& ps, const std::string& path);
ParticleSet read_particles_csv(const std::string& path);

}  // namespace driftlab
