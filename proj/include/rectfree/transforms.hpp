#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rectfree/measures.hpp"

namespace rectfree {

struct ContourConfig {
  // Sector {z : |arg z - pi| < alpha, 0 < |z| < beta} around the negative axis.
  double alpha = 0.75 * 3.14159265358979323846;
  double beta = 0.5;
  // Density nodes per support interval in recovery; sample count for transform grids.
  int n_points = 801;
  // Offsets below the real axis for Stieltjes inversion, largest first.
  std::vector<double> epsilon_schedule = {4e-9, 2e-9, 1e-9, 5e-10};
  // Worker threads for independent contour points; 0 means RECTFREE_THREADS or hardware.
  int threads = 0;
};

// z^{1/2} with the cut on (-inf, 0] (principal branch).
Complex sqrt_cut_negative(Complex z);
// √z with the cut on [0, inf) and √(-1) = i.
Complex sqrt_cut_positive(Complex z);

enum class AuxMap { U, T, V };
// U(z) = (-λ-1 + [(λ+1)^2 + 4λz]^{1/2}) / (2λ), T(X) = (λX+1)(X+1),
// V(h) = (λ-1 + [(λ-1)^2 + 4λh]^{1/2}) / (2λ); U and V reduce to z and h at λ = 0.
Complex auxiliary_map(AuxMap kind, double lambda, Complex z);

Complex cauchy_transform(const GriddedMeasure& mu, Complex z);
// H(z) = z (λ g^2 + (1-λ) g) with g = G(1/√z)/√z.
Complex h_transform(const SymmetricMeasure& mu, double lambda, Complex z);
Jet h_transform_jet(const SymmetricMeasure& mu, double lambda, Complex z);
// z with H(z) = w for w in the configured sector.
Complex invert_h(const SymmetricMeasure& mu, double lambda, Complex w, const ContourConfig& cfg = {});
// C(z) = U(z / H^{-1}(z) - 1).
Complex rect_r_transform(const SymmetricMeasure& mu, double lambda, Complex z, const ContourConfig& cfg = {});

// Rectangular R-transform written as a weighted sum of terms. A term is either the
// transform of a measure (at its own ratio) or an explicit function with derivative.
class RTransform {
 public:
  struct Term {
    double weight = 1.0;
    std::shared_ptr<const SymmetricMeasure> measure;  // null for explicit terms
    double lambda = 0.0;
    std::function<Jet(Complex)> fn;
  };

  RTransform() = default;  // C ≡ 0
  explicit RTransform(std::vector<Term> terms);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  // C and C' at z; measure terms invert H by continuation from 0.
  Jet eval(Complex z) const;

 private:
  std::vector<Term> terms_;
};

using RTransformPtr = std::shared_ptr<const RTransform>;

RTransformPtr measure_r_transform(SymmetricMeasure mu, double lambda);
RTransformPtr closed_form_r_transform(std::function<Jet(Complex)> c);
// Derivative by a one-sided difference pointing away from [0, inf).
RTransformPtr value_r_transform(std::function<Complex(Complex)> c);
RTransformPtr sum_r_transform(const std::vector<RTransformPtr>& parts);
RTransformPtr scaled_r_transform(double k, const RTransformPtr& part);

// Recovers μ from its R-transform by solving H^{-1}(h) = w / T(C(h)) along paths
// in the lower half plane and reading G(x - iε). The H-inversions hidden in measure
// terms are solved jointly with the outer equation. `support_hint` bounds the support.
SymmetricMeasure recover_measure(const RTransform& c, double lambda, const ContourConfig& cfg,
                                 double support_hint);
SymmetricMeasure recover_measure(const std::function<Complex(Complex)>& c, double lambda,
                                 const ContourConfig& cfg, double support_hint);

// (1/π) Im g(x - iε) extrapolated to ε = 0 over the schedule.
double stieltjes_density(const std::function<Complex(Complex)>& g, double x, const ContourConfig& cfg = {});

struct TransformGrid {
  enum class Kind { G, H, HInverse, C };
  Kind kind = Kind::H;
  std::vector<Complex> points;
  std::vector<Complex> values;
};

// Samples a transform of μ on points of the sector (G is sampled at 1/√z).
TransformGrid sample_transform(const SymmetricMeasure& mu, double lambda, TransformGrid::Kind kind,
                               const ContourConfig& cfg = {});
// CSV with header re_z,im_z,re_value,im_value,kind.
std::string transform_grid_csv(const TransformGrid& grid);

int resolve_threads(int requested);

}  // namespace rectfree
