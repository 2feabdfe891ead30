#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "bnsswap/io.hpp"
#include "bnsswap/levy.hpp"
#include "bnsswap/model.hpp"

namespace testsupport {

inline std::string fixture(const std::string& name) { return std::string(BNSSWAP_FIXTURE_DIR) + "/" + name; }

inline bnsswap::ModelParams load_params(const std::string& name) {
  return bnsswap::io::params_from_json(bnsswap::io::read_json_file(fixture(name)));
}

struct Estimate {
  double mean = 0.0;
  double stderr = 0.0;
};

/// Sample moments E[Yd^k], k = 1..4, of Yd = e^{-lambda t} int_0^{lambda t} e^s dZ_s.
/// [0, lambda t] is cut into cells of length <= h; each cell's increment is drawn exactly and
/// placed at a uniform time inside the cell.
inline std::array<Estimate, 4> simulate_y_moments(const bnsswap::levy::SubordinatorSpec& z,
                                                  double lambda, double t, int n_paths,
                                                  std::uint64_t seed, double h = 0.05) {
  const double L = lambda * t;
  const int cells = std::max(64, static_cast<int>(std::ceil(L / h)));
  const double dh = L / cells;
  bnsswap::RandomStream rng(seed);
  bnsswap::levy::IncrementSampler draw(z, dh);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<double, 4> s{}, ss{};
  for (int p = 0; p < n_paths; ++p) {
    double y = 0.0;
    for (int c = 0; c < cells; ++c) {
      const double at = (c + u(rng)) * dh;
      y += std::exp(at - L) * draw(rng);
    }
    double yk = 1.0;
    for (int k = 0; k < 4; ++k) {
      yk *= y;
      s[k] += yk;
      ss[k] += yk * yk;
    }
  }
  std::array<Estimate, 4> out{};
  for (int k = 0; k < 4; ++k) {
    const double m = s[k] / n_paths;
    const double var = std::max(0.0, ss[k] / n_paths - m * m) * n_paths / (n_paths - 1.0);
    out[k] = {m, std::sqrt(var / n_paths)};
  }
  return out;
}

}  // namespace testsupport
