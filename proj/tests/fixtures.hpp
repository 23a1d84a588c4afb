#pragma once

#include "oracles.hpp"
#include "rectfree/measures.hpp"

namespace fixture {

inline rectfree::SymmetricMeasure gridded_semicircle(int n, double radius = 2.0) {
  std::vector<double> grid = rectfree::clustered_nodes(-radius, radius, n);
  std::vector<double> dens;
  for (double x : grid) dens.push_back(oracle::semicircle_density(x, radius));
  return rectfree::SymmetricMeasure::normalized({}, grid, dens, 1e-3);
}

inline std::vector<double> even_moments(const rectfree::SymmetricMeasure& mu, int kmax) {
  std::vector<double> m;
  for (int k = 1; k <= kmax; ++k) m.push_back(mu.moment(2 * k));
  return m;
}

}  // namespace fixture
