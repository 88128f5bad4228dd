#include "driftlab/particle_set.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace driftlab {

bool ParticleSet::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

void ParticleSet::validate() const {
  if (dim <= 0) throw std::invalid_argument("ParticleSet: dim must be positive");
  if (data.empty() || data.size() % dim != 0)
    throw std::invalid_argument("ParticleSet: data size must be a positive multiple of dim");
  if (!all_finite()) throw std::invalid_argument("ParticleSet: non-finite entry");
}

void write_particles_csv(const ParticleSet& ps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  char buf[40];
  for (std::size_t i = 0; i < ps.n(); ++i) {
    for (int j = 0; j < ps.dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ps.data[i * ps.dim + j]);
      out << buf << (j + 1 == ps.dim ? '\n' : ',');
    }
  }
}

ParticleSet read_particles_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  ParticleSet ps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int d = 0;
    while (std::getline(ss, cell, ',')) {
      ps.data.push_back(std::stod(cell));
      ++d;
    }
    if (ps.dim == 0)
      ps.dim = d;
    else if (d != ps.dim)
      throw std::runtime_error("ragged CSV row in " + path);
  }
  if (ps.dim == 0) throw std::runtime_error("empty particle CSV: " + path);
  return ps;
}

}  // namespace driftlab
