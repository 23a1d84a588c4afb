#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rectfree/error.hpp"
#include "rectfree/nc.hpp"
#include "rectfree/transforms.hpp"

using namespace rectfree;
using fixture::even_moments;
using fixture::gridded_semicircle;

namespace {

constexpr double kPi = std::numbers::pi;

Complex bernoulli_h(double lambda, Complex z) {
  return z * (1.0 - (1.0 - lambda) * z) / ((1.0 - z) * (1.0 - z));
}

// Solves 1/G(s) = zeta by Newton, G given with its derivative.
template <class G>
Complex invert_f(G g, Complex zeta) {
  Complex s = zeta;
  for (int it = 0; it < 200; ++it) {
    Jet j = g(s);
    Complex f = 1.0 / j.value - zeta;
    Complex df = -j.derivative / (j.value * j.value);
    Complex step = f / df;
    s -= step;
    if (std::abs(step) < 1e-15 * std::abs(s)) break;
  }
  return s;
}

// Random points of the sector, kept away from the positive axis.
std::vector<Complex> sector_points(int n, double radius, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r(0.05 * radius, radius);
  std::uniform_real_distribution<double> phi(-0.7 * kPi, 0.7 * kPi);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.push_back(-std::polar(r(rng), phi(rng)));
  return out;
}

}  // namespace

TEST_CASE("square roots") {
  CHECK(std::abs(sqrt_cut_positive(-1.0) - Complex(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(sqrt_cut_positive(-4.0) - Complex(0.0, 2.0)) < 1e-15);
  CHECK(std::abs(sqrt_cut_negative(4.0) - 2.0) < 1e-15);
  for (Complex z : {Complex(-1.0, 0.3), Complex(2.0, -0.5), Complex(0.1, 1e-3), Complex(-3.0, -2.0)}) {
    Complex s = sqrt_cut_positive(z);
    CHECK(std::abs(s * s - z) < 1e-14);
    CHECK(s.imag() > 0.0);  // image of C \ [0, inf) is the upper half plane
  }
}

TEST_CASE("auxiliary maps") {
  for (double lambda : {0.0, 0.3, 0.5, 1.0}) {
    CHECK(std::abs(auxiliary_map(AuxMap::U, lambda, 0.0)) == 0.0);
    CHECK(std::abs(auxiliary_map(AuxMap::T, lambda, 0.0) - 1.0) == 0.0);
    CHECK(std::abs(auxiliary_map(AuxMap::V, lambda, 1.0) - 1.0) < 1e-15);
    for (Complex z : {Complex(-0.2, 0.0), Complex(-0.1, 0.05), Complex(0.03, -0.2)}) {
      Complex u = auxiliary_map(AuxMap::U, lambda, z);
      CHECK(std::abs(auxiliary_map(AuxMap::T, lambda, u) - (z + 1.0)) < 1e-14);
      Complex v = auxiliary_map(AuxMap::V, lambda, z);
      CHECK(std::abs(lambda * v * v + (1.0 - lambda) * v - z) < 1e-14);
    }
  }
  CHECK(std::abs(auxiliary_map(AuxMap::U, 0.0, Complex(-0.3, 0.1)) - Complex(-0.3, 0.1)) < 1e-16);
  CHECK(std::abs(auxiliary_map(AuxMap::V, 0.0, Complex(-0.3, 0.1)) - Complex(-0.3, 0.1)) < 1e-16);
  CHECK_THROWS_AS(auxiliary_map(AuxMap::U, 1.5, 0.1), ValidationError);
  CHECK_THROWS_AS(auxiliary_map(AuxMap::U, -0.1, 0.1), ValidationError);
}

TEST_CASE("H transform of closed forms") {
  SymmetricMeasure b = symmetric_bernoulli();
  for (double lambda : {0.0, 0.25, 0.5, 1.0})
    for (Complex z : {Complex(-0.1, 0.0), Complex(-0.3, 0.2), Complex(0.4, -0.4), Complex(-2.0, 1.0)})
      CHECK(std::abs(h_transform(b, lambda, z) - bernoulli_h(lambda, z)) < 1e-14 * std::abs(z));
  CHECK(std::abs(h_transform(b, 1.0, -1.0) + 0.25) < 1e-15);
  // δ0 has H(z) = z.
  CHECK(std::abs(h_transform(dirac_zero(), 0.5, Complex(-0.2, 0.1)) - Complex(-0.2, 0.1)) < 1e-16);
  CHECK_THROWS_AS(h_transform(b, 0.5, 0.3), ValidationError);

  // Small-z normalisation H(z)/z -> 1.
  SymmetricMeasure s = gridded_semicircle(801);
  double prev = 1.0;
  for (double r : {1e-2, 1e-4, 1e-6}) {
    double dev = std::abs(h_transform(s, 0.5, -r) / (-r) - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-5);

  // Dilation: H_{D_c μ}(z) = H_μ(c^2 z) / c^2.
  SymmetricMeasure d = dilate(s, 2.0);
  Complex z(-0.1, 0.02);
  CHECK(std::abs(h_transform(d, 0.5, z) - h_transform(s, 0.5, 4.0 * z) / 4.0) < 1e-13);
}

TEST_CASE("H inversion") {
  SymmetricMeasure b = symmetric_bernoulli();
  // Critical value of the λ = 1 Bernoulli transform: a double root, so only ~√tol accuracy.
  CHECK(std::abs(invert_h(b, 1.0, -0.25) + 1.0) < 1e-6);
  CHECK(std::abs(invert_h(dirac_zero(), 0.3, Complex(-0.2, 0.1)) - Complex(-0.2, 0.1)) < 1e-15);

  SymmetricMeasure s = gridded_semicircle(801);
  for (const SymmetricMeasure* mu : {&b, &s})
    for (double lambda : {0.0, 0.5, 1.0})
      for (Complex w : sector_points(20, 0.1, 7)) {
        Complex a = invert_h(*mu, lambda, w);
        CHECK(std::abs(h_transform(*mu, lambda, a) - w) < 1e-12 * std::abs(w));
        CHECK(std::abs(a / w - 1.0) < 1.0);  // stays on the branch through 0
      }

  CHECK_THROWS_AS(invert_h(b, 0.5, 0.1), ValidationError);
  CHECK_THROWS_AS(invert_h(b, 0.5, -0.8), ValidationError);
  CHECK_THROWS_AS(invert_h(b, 0.5, 0.0), ValidationError);
  ContourConfig narrow;
  narrow.alpha = 0.25 * kPi;
  CHECK_THROWS_AS(invert_h(b, 0.5, Complex(-0.1, 0.2), narrow), ValidationError);
}

TEST_CASE("rectangular R-transform identities") {
  SymmetricMeasure b = symmetric_bernoulli();
  SymmetricMeasure s = gridded_semicircle(2001);
  // Dilation: C_{D_c μ}(z) = C_μ(c^2 z).
  Complex z = -0.05;
  CHECK(std::abs(rect_r_transform(dilate(b, 1.5), 0.5, z) - rect_r_transform(b, 0.5, 2.25 * z)) < 1e-10);
  CHECK(std::abs(rect_r_transform(dilate(s, 1.5), 0.5, z) - rect_r_transform(s, 0.5, 2.25 * z)) < 1e-10);
  // δ0 has C ≡ 0.
  CHECK(std::abs(rect_r_transform(dirac_zero(), 0.5, z)) < 1e-16);

  // Conjugation symmetry of G, H and C.
  for (Complex w : sector_points(50, 0.3, 11)) {
    Complex zeta = 1.0 / sqrt_cut_positive(w);
    CHECK(std::abs(cauchy_transform(s, std::conj(zeta)) - std::conj(cauchy_transform(s, zeta))) < 1e-14);
    CHECK(std::abs(h_transform(s, 0.5, std::conj(w)) - std::conj(h_transform(s, 0.5, w))) < 1e-14);
    CHECK(std::abs(rect_r_transform(s, 0.5, std::conj(w)) - std::conj(rect_r_transform(s, 0.5, w))) < 1e-12);
  }
}

TEST_CASE("C at λ = 1 matches the Voiculescu transform") {
  // C(z) = √z φ(1/√z) with φ(ζ) = F^{-1}(ζ) - ζ, F = 1/G.
  SymmetricMeasure b = symmetric_bernoulli();
  SymmetricMeasure s = gridded_semicircle(2001);
  for (const SymmetricMeasure* mu : {&b, &s})
    for (Complex z : {Complex(-0.05, 0.0), Complex(-0.08, 0.03), Complex(-0.02, -0.06)}) {
      Complex root = sqrt_cut_positive(z);
      Complex zeta = 1.0 / root;
      Complex sol = invert_f([&](Complex t) { return mu->cauchy(t); }, zeta);
      Complex ref = root * (sol - zeta);
      CHECK(std::abs(rect_r_transform(*mu, 1.0, z) - ref) < 1e-8);
    }
  // Semicircle: φ(ζ) = 1/ζ, so C(z) = z.
  CHECK(std::abs(rect_r_transform(s, 1.0, Complex(-0.1, 0.02)) - Complex(-0.1, 0.02)) < 1e-6);
}

TEST_CASE("C at λ = 0 matches the Voiculescu transform of the square") {
  // C(z) = z φ_ρ(1/z) with ρ the push-forward of μ under t -> t^2; G_ρ by direct quadrature.
  SymmetricMeasure b = symmetric_bernoulli();
  SymmetricMeasure s = gridded_semicircle(2001);
  for (const SymmetricMeasure* mu : {&b, &s}) {
    auto g_rho = [&](Complex t) {
      auto part = [&](int power, bool imag) {
        return mu->integrate([&](double x) {
          Complex v = std::pow(1.0 / (t - x * x), power);
          return imag ? v.imag() : v.real();
        });
      };
      return Jet{Complex(part(1, false), part(1, true)), -Complex(part(2, false), part(2, true))};
    };
    for (Complex z : {Complex(-0.05, 0.0), Complex(-0.08, 0.03), Complex(-0.02, -0.06)}) {
      Complex zeta = 1.0 / z;
      Complex sol = invert_f(g_rho, zeta);
      CHECK(std::abs(rect_r_transform(*mu, 0.0, z) - z * (sol - zeta)) < 1e-8);
    }
  }
}

TEST_CASE("Taylor coefficients of C are the rectangular cumulants") {
  SymmetricMeasure b = symmetric_bernoulli();
  SymmetricMeasure s = gridded_semicircle(4001);
  for (const SymmetricMeasure* mu : {&b, &s})
    for (double lambda : {0.0, 0.5, 1.0}) {
      // Taylor coefficients by the trapezoid rule on a small circle; the measure
      // term continues H^{-1} analytically from 0, also across [0, inf).
      RTransformPtr c = measure_r_transform(*mu, lambda);
      const int n = 64;
      const double r = 0.02;
      double coef[3] = {0.0, 0.0, 0.0};
      for (int j = 0; j < n; ++j) {
        Complex z = std::polar(r, 2.0 * kPi * (j + 0.5) / n);
        Complex v = c->eval(z).value;
        for (int k = 0; k < 3; ++k) coef[k] += (v / std::pow(z, k + 1)).real() / n;
      }
      std::vector<double> cum = nc::rect_cumulants_from_moments(lambda, even_moments(*mu, 3));
      for (int k = 0; k < 3; ++k) CHECK(std::abs(coef[k] - cum[k]) < 1e-6 * std::max(1.0, std::abs(cum[k])));
    }
}

TEST_CASE("R-transform objects") {
  SymmetricMeasure b = symmetric_bernoulli();
  RTransformPtr c = measure_r_transform(b, 0.5);
  Complex z(-0.1, 0.03);
  Jet j = c->eval(z);
  CHECK(std::abs(j.value - rect_r_transform(b, 0.5, z)) < 1e-13);
  double h = 1e-6;
  Complex fd = (c->eval(z + h).value - c->eval(z - h).value) / (2.0 * h);
  CHECK(std::abs(j.derivative - fd) < 1e-7);
  CHECK(std::abs(c->eval(0.0).derivative - 1.0) < 1e-15);

  RTransformPtr sum = sum_r_transform({c, scaled_r_transform(2.0, c)});
  CHECK(std::abs(sum->eval(z).value - 3.0 * j.value) < 1e-13);
  CHECK(RTransform().eval(z).value == Complex(0.0));

  RTransformPtr v = value_r_transform([](Complex w) { return w * w; });
  CHECK(std::abs(v->eval(z).derivative - 2.0 * z) < 1e-8);
  CHECK_THROWS_AS(closed_form_r_transform({}), ValidationError);
  CHECK_THROWS_AS(measure_r_transform(b, 2.0), ValidationError);
}

TEST_CASE("Stieltjes inversion") {
  auto semicircle_g = [](Complex z) { return (z - std::sqrt(z - 2.0) * std::sqrt(z + 2.0)) / 2.0; };
  CHECK(std::abs(stieltjes_density(semicircle_g, 0.0) - 1.0 / kPi) < 1e-8);
  CHECK(std::abs(stieltjes_density(semicircle_g, 1.0) - oracle::semicircle_density(1.0)) < 1e-8);
  CHECK(stieltjes_density(semicircle_g, 3.0) == 0.0);
  // Standard Cauchy law seen from below: G(z) = 1/(z - i).
  auto cauchy_g = [](Complex z) { return 1.0 / (z - Complex(0.0, 1.0)); };
  CHECK(std::abs(stieltjes_density(cauchy_g, 0.0) - 1.0 / kPi) < 1e-8);
  CHECK(std::abs(stieltjes_density(cauchy_g, 2.0) - 1.0 / (5.0 * kPi)) < 1e-8);
  // A transform with negative imaginary part is flagged.
  CHECK_THROWS_AS(stieltjes_density([](Complex z) { return 1.0 / (z + Complex(0.0, 1.0)); }, 0.0),
                  NumericalError);
  ContourConfig bad;
  bad.epsilon_schedule = {};
  CHECK_THROWS_AS(stieltjes_density(cauchy_g, 0.0, bad), ValidationError);
}

TEST_CASE("recovery of closed forms") {
  ContourConfig cfg;
  SymmetricMeasure zero = recover_measure([](Complex) { return Complex(0.0); }, 0.5, cfg, 1.0);
  CHECK(zero.moment(2) < 1e-12);

  SymmetricMeasure sc = recover_measure(*closed_form_r_transform([](Complex z) { return Jet{z, 1.0}; }), 1.0,
                                        cfg, 2.0);
  CHECK(std::abs(sc.moment(2) - 1.0) < 1e-5);
  CHECK(std::abs(sc.moment(4) - 2.0) < 1e-5);
  CHECK(std::abs(sc.moment(6) - 5.0) < 1e-4);
  CHECK(std::abs(sc.density_at(0.0) - 1.0 / kPi) < 1e-5);
  CHECK(sc.atoms().empty());

  // Free Poisson at λ = 0 with rate 1/2: an atom of mass 1/2 at 0.
  SymmetricMeasure p = recover_measure(
      *closed_form_r_transform([](Complex z) {
        return Jet{0.5 * z / (1.0 - z), 0.5 / ((1.0 - z) * (1.0 - z))};
      }),
      0.0, cfg, 3.0);
  double zero_mass = 0.0;
  for (const Atom& a : p.atoms())
    if (a.x == 0.0) zero_mass = a.mass;
  CHECK(std::abs(zero_mass - 0.5) < 1e-4);
  CHECK(std::abs(p.moment(2) - 0.5) < 1e-5);
  CHECK(std::abs(p.moment(4) - 0.75) < 1e-5);
}

TEST_CASE("recovery round trip") {
  ContourConfig cfg;
  SymmetricMeasure b = symmetric_bernoulli();
  SymmetricMeasure back = recover_measure(*measure_r_transform(b, 0.5), 0.5, cfg, 1.0);
  for (int k = 2; k <= 6; k += 2) CHECK(std::abs(back.moment(k) - 1.0) < 1e-4);

  SymmetricMeasure s = gridded_semicircle(2001);
  for (double lambda : {0.0, 0.5}) {
    SymmetricMeasure r = recover_measure(*measure_r_transform(s, lambda), lambda, cfg, 2.0);
    for (int k = 2; k <= 6; k += 2) CHECK(std::abs(r.moment(k) - s.moment(k)) < 1e-4 * s.moment(k));
  }
  CHECK_THROWS_AS(recover_measure(*measure_r_transform(b, 0.5), 1.0, cfg, 1.0), ValidationError);
}

TEST_CASE("transform grids") {
  ContourConfig cfg;
  cfg.n_points = 25;
  SymmetricMeasure b = symmetric_bernoulli();
  TransformGrid g = sample_transform(b, 0.5, TransformGrid::Kind::H, cfg);
  REQUIRE(g.points.size() == 25);
  for (std::size_t i = 0; i < g.points.size(); ++i)
    CHECK(std::abs(g.values[i] - bernoulli_h(0.5, g.points[i])) < 1e-14);
  TransformGrid c = sample_transform(b, 0.5, TransformGrid::Kind::C, cfg);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    CHECK(std::abs(std::arg(c.points[i]) ) > kPi - cfg.alpha);
    CHECK(std::abs(c.points[i]) <= cfg.beta);
  }
  std::string csv = transform_grid_csv(c);
  CHECK(csv.rfind("re_z,im_z,re_value,im_value,kind\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
  CHECK(csv.find(",C\n") != std::string::npos);
}
