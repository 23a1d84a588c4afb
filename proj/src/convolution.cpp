#include "rectfree/convolution.hpp"

#include <algorithm>
#include <cmath>

#include "rectfree/error.hpp"

namespace rectfree {

namespace {

bool is_dirac_zero(const SymmetricMeasure& mu) { return mu.support_radius() == 0.0; }

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
}

}  // namespace

SymmetricMeasure rect_convolve(const SymmetricMeasure& mu, const SymmetricMeasure& nu, double lambda,
                               const ContourConfig& cfg) {
  check_lambda(lambda);
  if (is_dirac_zero(mu)) return nu;
  if (is_dirac_zero(nu)) return mu;
  // ‖A + B‖ <= ‖A‖ + ‖B‖ bounds the support; the moment heuristic is tighter for wide tails.
  double hint = std::min(mu.support_radius() + nu.support_radius(),
                         4.0 * (std::sqrt(mu.moment(2)) + std::sqrt(nu.moment(2))));
  RTransformPtr c = sum_r_transform({measure_r_transform(mu, lambda), measure_r_transform(nu, lambda)});
  return recover_measure(*c, lambda, cfg, hint);
}

SymmetricMeasure rect_convolve_power(const SymmetricMeasure& mu, double lambda, int k, const ContourConfig& cfg) {
  check_lambda(lambda);
  if (k < 1) throw ValidationError("convolution power must be a positive integer");
  if (k == 1 || is_dirac_zero(mu)) return mu;
  double hint = std::min(k * mu.support_radius(), 4.0 * std::sqrt(k * mu.moment(2)));
  RTransformPtr c = scaled_r_transform(static_cast<double>(k), measure_r_transform(mu, lambda));
  return recover_measure(*c, lambda, cfg, hint);
}

}  // namespace rectfree
