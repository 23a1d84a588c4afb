#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rectfree/convolution.hpp"
#include "rectfree/error.hpp"
#include "rectfree/infdiv.hpp"
#include "rectfree/nc.hpp"

using namespace rectfree;
using fixture::even_moments;

namespace {

constexpr double kPi = std::numbers::pi;

double zero_atom(const SymmetricMeasure& mu) {
  for (const Atom& a : mu.atoms())
    if (a.x == 0.0) return a.mass;
  return 0.0;
}

// Taylor coefficients c_2, c_4, c_6 of C_μ from a circle of radius 0.02.
std::vector<double> taylor_cumulants(const SymmetricMeasure& mu, double lambda) {
  RTransformPtr c = measure_r_transform(mu, lambda);
  const int n = 64;
  std::vector<double> coef(3, 0.0);
  for (int j = 0; j < n; ++j) {
    Complex z = std::polar(0.02, 2.0 * kPi * (j + 0.5) / n);
    Complex v = c->eval(z).value;
    for (int k = 0; k < 3; ++k) coef[k] += (v / std::pow(z, k + 1)).real() / n;
  }
  return coef;
}

}  // namespace

TEST_CASE("Lévy C-transform closed forms") {
  for (Complex z : {Complex(-0.1, 0.0), Complex(-0.3, 0.2), Complex(-0.05, -0.4)}) {
    CHECK(std::abs(levy_c_transform(gaussian_levy(), z) - z) < 1e-15);
    CHECK(std::abs(levy_c_transform(poisson_levy(0.7), z) - 0.7 * z / (1.0 - z)) < 1e-14);
    for (double t : {0.5, 2.0}) {
      Complex ref = Complex(0.0, t) * sqrt_cut_positive(z);
      CHECK(std::abs(levy_c_transform(cauchy_levy(t), z) - ref) < 3e-6 * t);
    }
  }
  CHECK(std::abs(levy_c_transform(cauchy_levy(1.0), -0.25) + 0.5) < 3e-6);
  CHECK_THROWS_AS(levy_c_transform(poisson_levy(1.0), 2.0), ValidationError);
  // Series branch near 0 agrees with the direct form.
  LevyMeasure g = add_levy(poisson_levy(0.4), gaussian_levy(0.3));
  Complex z(-2e-4, 1e-4);
  CHECK(std::abs(levy_c_transform(g, z) - (0.3 * z + 0.4 * z / (1.0 - z))) < 1e-18);
}

TEST_CASE("classical Lévy exponent") {
  for (double xi : {0.0, 0.5, 1.3, -2.0}) {
    CHECK(std::abs(classical_levy_exponent(gaussian_levy(), xi) + 0.5 * xi * xi) < 1e-15);
    CHECK(std::abs(classical_levy_exponent(poisson_levy(0.8), xi) - 0.8 * (std::cos(xi) - 1.0)) < 1e-15);
  }
  // Cauchy: exp(ψ) = e^{-t|ξ|} up to the truncated tail.
  CHECK(std::abs(classical_levy_exponent(cauchy_levy(1.0), 1.0) + 1.0) < 1e-4);
  LevyMeasure g = add_levy(cauchy_levy(0.3), poisson_levy(1.0));
  CHECK(classical_levy_exponent(g, 0.0) == 0.0);
  CHECK(classical_levy_exponent(g, 0.7) <= 0.0);
  CHECK(classical_levy_exponent(g, 0.7) == doctest::Approx(classical_levy_exponent(g, -0.7)).epsilon(1e-14));
}

TEST_CASE("named laws and their Lévy measures") {
  LevyMeasure g = levy_measure_of({NamedLaw::Kind::ClassicalGaussian, 0.0, 1.0});
  REQUIRE(g.atoms().size() == 1);
  CHECK(g.atoms()[0].x == 0.0);
  CHECK(g.mass() == 1.0);
  LevyMeasure p = levy_measure_of({NamedLaw::Kind::ClassicalSymPoisson, 0.0, 2.0});
  CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.moment(2) == doctest::Approx(1.0).epsilon(1e-15));
  LevyMeasure c = levy_measure_of({NamedLaw::Kind::ClassicalCauchy, 0.0, 2.0});
  CHECK(std::abs(c.mass() - 2.0 * (1.0 - 1e-6)) < 2e-7);
  CHECK_THROWS_AS(levy_measure_of({NamedLaw::Kind::RectGaussian, 0.5, 1.0}), ValidationError);
  CHECK_THROWS_AS(poisson_levy(-1.0), ValidationError);
}

TEST_CASE("rectangular Gaussian") {
  for (double lambda : {0.0, 0.3, 0.5, 1.0}) {
    SymmetricMeasure g = rect_gaussian(lambda);
    std::vector<double> ref = nc::moments_from_rect_cumulants(lambda, {1.0, 0.0, 0.0});
    for (int k = 0; k < 3; ++k) CHECK(std::abs(g.moment(2 * k + 2) - ref[k]) < 1e-6 * ref[k]);
  }
  SymmetricMeasure g = rect_gaussian(0.5);
  CHECK(std::abs(g.moment(4) - 1.5) < 1e-6);
  CHECK(std::abs(g.moment(6) - 2.75) < 1e-6);
  CHECK(g.density_at(0.2) == 0.0);
  CHECK(std::abs(g.support_radius() - (1.0 + std::sqrt(0.5))) < 1e-12);
  SymmetricMeasure s = rect_gaussian(1.0);
  CHECK(std::abs(s.density_at(0.0) - 1.0 / kPi) < 1e-8);
  CHECK(std::abs(s.density_at(1.0) - oracle::semicircle_density(1.0)) < 1e-6);
  CHECK(rect_gaussian(0.0).atoms().size() == 2);
  // The closed-form density integrates to 1; the grid carries it to 1e-7 before rescaling.
  for (double lambda : {0.3, 0.5, 1.0}) {
    double a = 1.0 - std::sqrt(lambda);
    double b = 1.0 + std::sqrt(lambda);
    auto f = [&](double x) {
      double v = 4.0 * lambda - (x * x - 1.0 - lambda) * (x * x - 1.0 - lambda);
      return v > 0.0 ? std::sqrt(v) / (2.0 * kPi * lambda * x) : 0.0;
    };
    CHECK(std::abs(2.0 * oracle::edge_integral(f, a, b) - 1.0) < 1e-8);
    std::vector<double> grid = rect_gaussian(lambda).grid();
    std::vector<double> d;
    for (double x : grid) d.push_back(std::abs(x) > 0.0 ? f(std::abs(x)) : 1.0 / kPi);
    GriddedMeasure raw({}, grid, d);
    CHECK(std::abs(raw.mass() - 1.0) < 1e-7);
  }
}

TEST_CASE("rectangular Cauchy") {
  for (double lambda : {0.0, 0.25, 0.5, 1.0})
    for (double t : {0.5, 1.0, 2.0}) {
      double a = 0.5 * t * (1.0 - lambda);
      double radius = 1e4 * t;
      LevyMeasure g = rect_cauchy_truncated(lambda, t, radius);
      CHECK(std::abs(g.mass() + rect_cauchy_tail_mass(lambda, t, radius) - 1.0) < 1e-6);
      if (a > 0.0) {
        CHECK(rect_cauchy_density(lambda, t, 0.999 * a) == 0.0);
        CHECK(rect_cauchy_density(lambda, t, a * (1.0 + 1e-10)) < 1e-4);
      }
      SymmetricMeasure mu = rect_cauchy(lambda, t);
      CHECK(std::abs(mu.mass() - 1.0) < 1e-12);
    }
  for (double x : {0.0, 0.3, 2.0, 50.0})
    CHECK(std::abs(rect_cauchy_density(1.0, 2.0, x) - 2.0 / (kPi * (4.0 + x * x))) < 1e-15);
  CHECK_THROWS_AS(rect_cauchy(0.5, 0.0), ValidationError);
}

TEST_CASE("reciprocal of the rectangular Cauchy law") {
  SymmetricMeasure s = rect_cauchy_reciprocal(0.0, 1.0);
  CHECK(std::abs(s.moment(2) - 1.0) < 1e-6);
  CHECK(std::abs(s.moment(4) - 2.0) < 1e-6);
  SymmetricMeasure s2 = rect_cauchy_reciprocal(0.0, 2.0);
  CHECK(std::abs(s2.moment(2) - 0.25) < 1e-7);  // radius 2/t, variance 1/t²
  SymmetricMeasure r = rect_cauchy_reciprocal(0.5, 1.0);
  CHECK(std::abs(r.support_radius() - 4.0) < 1e-12);
  SymmetricMeasure c = rect_cauchy_reciprocal(1.0, 2.0);
  CHECK(std::abs(c.density_at(0.0) - 1.0 / (kPi * 0.5)) < 1e-4);
  // Push-forward check: E[X²] under the image equals E[1/Y²] under rect_cauchy.
  auto inv2 = [](double y) { return rect_cauchy_density(0.5, 1.0, y) / (y * y); };
  double direct = 2.0 * (oracle::edge_integral(inv2, 0.25, 2.0) + oracle::simpson(inv2, 2.0, 1e4, 1e-13));
  CHECK(std::abs(r.moment(2) - direct) < 1e-6);
}

TEST_CASE("Marchenko-Pastur law") {
  for (double c : {0.5, 1.0, 2.0}) {
    NonnegativeMeasure mp = marchenko_pastur(c);
    for (int n = 1; n <= 6; ++n) CHECK(std::abs(mp.moment(n) - nc::mp_moment(c, n)) < 1e-6 * nc::mp_moment(c, n));
  }
  NonnegativeMeasure one = marchenko_pastur(1.0);
  CHECK(std::abs(one.moment(3) - 5.0) < 1e-6);
  NonnegativeMeasure half = marchenko_pastur(0.5);
  REQUIRE(!half.atoms().empty());
  CHECK(half.atoms()[0].x == 0.0);
  CHECK(std::abs(half.atoms()[0].mass - 0.5) < 1e-13);
  NonnegativeMeasure two = marchenko_pastur(2.0);
  CHECK(two.atoms().empty());
  CHECK(std::abs(two.grid().front() - std::pow(1.0 - std::sqrt(2.0), 2)) < 1e-12);
  CHECK(std::abs(two.grid().back() - std::pow(1.0 + std::sqrt(2.0), 2)) < 1e-12);
}

TEST_CASE("rectangular Poisson") {
  SymmetricMeasure p0 = rect_poisson(0.0, 0.5);
  CHECK(std::abs(zero_atom(p0) - 0.5) < 1e-13);
  CHECK(std::abs(p0.moment(2) - 0.5) < 1e-6);
  SymmetricMeasure p = rect_poisson(0.5, 1.0);
  CHECK(std::abs(p.moment(2) - 1.0) < 1e-4);
  CHECK(std::abs(p.moment(4) - 2.5) < 1e-4);
  // Semigroup P_1 ⊞ P_2 = P_3.
  SymmetricMeasure lhs = rect_convolve(p, rect_poisson(0.5, 2.0), 0.5);
  SymmetricMeasure rhs = rect_poisson(0.5, 3.0);
  CHECK(std::abs(lhs.moment(2) - rhs.moment(2)) < 1e-4);
  CHECK(std::abs(lhs.moment(4) - rhs.moment(4)) < 1e-4 * rhs.moment(4));
  CHECK(std::abs(rhs.moment(4) - (3.0 + 1.5 * 9.0)) < 1e-4 * rhs.moment(4));
}

TEST_CASE("Bercovici-Pata images") {
  SymmetricMeasure s = bercovici_pata(gaussian_levy(), 1.0);
  CHECK(std::abs(s.moment(2) - 1.0) < 1e-5);
  CHECK(std::abs(s.moment(4) - 2.0) < 1e-5);
  CHECK(std::abs(s.density_at(0.5) - oracle::semicircle_density(0.5)) < 1e-4);
  SymmetricMeasure b = bercovici_pata(gaussian_levy(), 0.0);
  CHECK(zero_atom(b) < 1e-6);
  CHECK(std::abs(b.moment(2) - 1.0) < 1e-5);
  CHECK(std::abs(b.moment(4) - 1.0) < 1e-5);
  CHECK(bercovici_pata(LevyMeasure(), 0.5).support_radius() == 0.0);

  // C-cumulants do not depend on λ.
  LevyMeasure g = add_levy(gaussian_levy(0.5), poisson_levy(0.5));
  std::vector<double> c05 = taylor_cumulants(bercovici_pata(g, 0.5), 0.5);
  std::vector<double> c1 = taylor_cumulants(bercovici_pata(g, 1.0), 1.0);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(c05[k] - c1[k]) < 1e-6 * std::max(1.0, std::abs(c1[k])));

  // Dilation: the Lévy image of D_2 on δ0 is 4 δ0.
  SymmetricMeasure d = bercovici_pata(gaussian_levy(4.0), 0.5);
  SymmetricMeasure ref = dilate(bercovici_pata(gaussian_levy(), 0.5), 2.0);
  for (int k = 2; k <= 4; k += 2) CHECK(std::abs(d.moment(k) - ref.moment(k)) < 1e-4 * ref.moment(k));

  // Support radius of N_c at λ = 1 grows as 2√c.
  for (double c : {1.0, 4.0}) {
    SymmetricMeasure n = bercovici_pata(gaussian_levy(c), 1.0);
    const auto& grid = n.grid();
    double step = grid.back() - grid[grid.size() - 2];
    CHECK(std::abs(n.support_radius() - 2.0 * std::sqrt(c)) <= 2.0 * std::max(step, 1e-3 * std::sqrt(c)));
  }
}

TEST_CASE("square limit parameters") {
  SquareLimit g = square_limit_params(gaussian_levy());
  CHECK(g.gamma == 1.0);
  CHECK(g.sigma.mass() == 0.0);
  SquareLimit p = square_limit_params(poisson_levy(0.6));
  CHECK(std::abs(p.gamma - 0.3) < 1e-15);
  auto atoms = p.sigma.atoms();
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].x == 1.0);
  CHECK(std::abs(atoms[0].mass - 0.3) < 1e-15);
  LevyMeasure c = cauchy_levy(1.0);
  CHECK(std::abs(square_limit_params(scale_levy(2.0, c)).gamma - 2.0 * square_limit_params(c).gamma) < 1e-12);
}
