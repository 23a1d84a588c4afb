#pragma once

#include <vector>

namespace rectfree::detail {

struct GaussRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// n-point Gauss-Legendre rule mapped to [0, 1]; cached per n.
const GaussRule& gauss_legendre(int n);

}  // namespace rectfree::detail
