#pragma once

#include "rectfree/measures.hpp"
#include "rectfree/transforms.hpp"

namespace rectfree {

struct NamedLaw {
  enum class Kind {
    RectGaussian,
    RectCauchy,
    RectPoisson,
    MarchenkoPastur,
    ClassicalGaussian,    // param = variance
    ClassicalSymPoisson,  // param = c
    ClassicalCauchy,      // param = t
  };
  Kind kind = Kind::ClassicalGaussian;
  double lambda = 0.0;
  double param = 1.0;
};

// C(z) = z ∫ (1 + t²)/(1 - z t²) dG(t); the same for every ratio λ.
Complex levy_c_transform(const LevyMeasure& g, Complex z);
RTransformPtr levy_r_transform(const LevyMeasure& g);
// log of the characteristic function, ∫ (cos tξ - 1)(1 + t²)/t² dG(t), with -ξ²/2 per unit mass at 0.
double classical_levy_exponent(const LevyMeasure& g, double xi);
// The ⊞_λ-infinitely divisible law with Lévy measure G.
SymmetricMeasure bercovici_pata(const LevyMeasure& g, double lambda, const ContourConfig& cfg = {});

LevyMeasure add_levy(const LevyMeasure& a, const LevyMeasure& b);
LevyMeasure scale_levy(double k, const LevyMeasure& g);

// Lévy-measure constructors for the classical laws.
LevyMeasure gaussian_levy(double variance = 1.0);
LevyMeasure poisson_levy(double c);
// t 𝒞_1 truncated to capture mass 1 - 1e-6 of 𝒞_1.
LevyMeasure cauchy_levy(double t);
LevyMeasure levy_measure_of(const NamedLaw& law);

SymmetricMeasure rect_gaussian(double lambda);
// Density of the rectangular Cauchy law; zero on the gap |x| < t(1-λ)/2.
double rect_cauchy_density(double lambda, double t, double x);
// Mass of the density beyond |x| > radius, by quadrature in u = 1/x.
double rect_cauchy_tail_mass(double lambda, double t, double radius);
// The density restricted to [-radius, radius] on a graded grid, not renormalized.
LevyMeasure rect_cauchy_truncated(double lambda, double t, double radius);
// Truncated at `radius` (default 1e4 t) and rescaled by the missing tail mass.
SymmetricMeasure rect_cauchy(double lambda, double t, double radius = 0.0);
// Image of rect_cauchy(λ, t) under x -> 1/x.
SymmetricMeasure rect_cauchy_reciprocal(double lambda, double t);
SymmetricMeasure rect_poisson(double lambda, double c, const ContourConfig& cfg = {});
NonnegativeMeasure marchenko_pastur(double c);

struct SquareLimit {
  double gamma = 0.0;
  HalfLineMeasure sigma;
};
// (γ, σ) of the classical limit law of squared sums: γ = ∫ (1+t²)/(1+t⁴) dG,
// σ = (s²+s)/(s²+1) dF(s) with F the push-forward of G under t -> t².
SquareLimit square_limit_params(const LevyMeasure& g);

}  // namespace rectfree
