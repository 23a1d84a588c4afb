#include "rectfree/infdiv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadrature.hpp"
#include "rectfree/error.hpp"

namespace rectfree {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kEdgeNodes = 8001;
constexpr int kTailNodes = 20000;

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive");
}

// Symmetric lift of the Marchenko-Pastur density: √((x²-a²)(b²-x²)) / (2π|x|)
// on a <= |x| <= b with a = |1 - √c|, b = 1 + √c. Its mass is min(c, 1).
void mp_lift(double c, std::vector<double>& grid, std::vector<double>& dens) {
  double a = std::abs(1.0 - std::sqrt(c));
  double b = 1.0 + std::sqrt(c);
  grid = mirror_nodes(clustered_nodes(a, b, kEdgeNodes));
  dens.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x = std::abs(grid[i]);
    if (x <= a || x >= b) {
      dens[i] = (a == 0.0 && x == 0.0) ? b / (2.0 * kPi) : 0.0;
      continue;
    }
    double inner = a == 0.0 ? 1.0 : (x - a) * (x + a) / (x * x);
    dens[i] = std::sqrt(inner * (b - x) * (b + x)) / (2.0 * kPi);
  }
}

// Scales a closed-form density sampled on a grid so its piecewise-linear mass is exactly `target`.
void rescale_density(const std::vector<double>& grid, std::vector<double>& dens, double target) {
  double mass = GriddedMeasure({}, grid, dens).mass();
  if (std::abs(mass - target) > 1e-7) throw NumericalError("closed-form density grid loses more than 1e-7 of its mass");
  for (double& v : dens) v *= target / mass;
}

// Geometric nodes from x0 to x1 inclusive.
std::vector<double> geometric_nodes(double x0, double x1, int n) {
  std::vector<double> x(n);
  double q = std::log(x1 / x0) / (n - 1);
  for (int i = 0; i < n; ++i) x[i] = x0 * std::exp(q * i);
  x.front() = x0;
  x.back() = x1;
  return x;
}

// Positive nodes: graded near `lo` on [lo, mid], geometric on [mid, hi].
std::vector<double> tail_nodes(double lo, double mid, double hi) {
  std::vector<double> x = clustered_nodes(lo, mid, 2001);
  std::vector<double> g = geometric_nodes(mid, hi, kTailNodes);
  x.insert(x.end(), g.begin() + 1, g.end());
  return x;
}

}  // namespace

Complex levy_c_transform(const LevyMeasure& g, Complex z) {
  return levy_r_transform(g)->eval(z).value;
}

RTransformPtr levy_r_transform(const LevyMeasure& g) {
  double r = g.support_radius();
  double m0 = g.mass();
  std::vector<double> coef;  // coef[k] = M_{2k} + M_{2k+2}
  for (int k = 0; k < 12; ++k) coef.push_back(g.moment(2 * k) + g.moment(2 * k + 2));
  return closed_form_r_transform([g, r, m0, coef](Complex z) -> Jet {
    if (r > 0.0 && z.imag() == 0.0 && z.real() >= 0.0 && z.real() * r * r >= 1.0)
      throw ValidationError("Lévy C-transform is singular on the positive axis");
    if (std::abs(z) * r * r < 1e-3) {
      // C(z) = Σ z^{k+1} (M_{2k} + M_{2k+2}).
      Complex v = 0.0;
      Complex d = 0.0;
      for (int k = static_cast<int>(coef.size()) - 1; k >= 0; --k) {
        v = v * z + coef[k];
        d = d * z + static_cast<double>(k + 1) * coef[k];
      }
      return {v * z, d};
    }
    if (z.imag() == 0.0 && z.real() >= 0.0) throw ValidationError("Lévy C-transform is singular on the positive axis");
    // (1 + t²)/(1 - z t²) = -1/z + (1 + 1/z)/(1 - z t²).
    Jet red = g.reduced(z);
    return {(z + 1.0) * red.value - m0, red.value + (z + 1.0) * red.derivative};
  });
}

double classical_levy_exponent(const LevyMeasure& g, double xi) {
  return g.integrate([xi](double t) {
    if (t == 0.0) return -0.5 * xi * xi;
    double s = std::sin(0.5 * t * xi) / t;
    return -2.0 * s * s * (1.0 + t * t);
  });
}

SymmetricMeasure bercovici_pata(const LevyMeasure& g, double lambda, const ContourConfig& cfg) {
  check_lambda(lambda);
  if (g.mass() == 0.0) return dirac_zero();
  double c2 = g.mass() + g.moment(2);
  double hint = 2.5 * std::sqrt(c2) + 2.0 * g.support_radius();
  return recover_measure(*levy_r_transform(g), lambda, cfg, hint);
}

LevyMeasure add_levy(const LevyMeasure& a, const LevyMeasure& b) {
  std::vector<Atom> atoms = a.atoms();
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  std::vector<double> grid = a.grid();
  grid.insert(grid.end(), b.grid().begin(), b.grid().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> dens(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) dens[i] = a.density_at(grid[i]) + b.density_at(grid[i]);
  return LevyMeasure::symmetrized(std::move(atoms), std::move(grid), std::move(dens));
}

LevyMeasure scale_levy(double k, const LevyMeasure& g) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw ValidationError("Lévy measure scale must be nonnegative");
  std::vector<Atom> atoms = g.atoms();
  for (Atom& at : atoms) at.mass *= k;
  std::vector<double> dens = g.density();
  for (double& v : dens) v *= k;
  return LevyMeasure::symmetrized(std::move(atoms), g.grid(), std::move(dens));
}

LevyMeasure gaussian_levy(double variance) {
  check_positive(variance, "variance");
  return LevyMeasure({{0.0, variance}}, {}, {});
}

LevyMeasure poisson_levy(double c) {
  check_positive(c, "Poisson rate");
  return LevyMeasure({{-1.0, 0.25 * c}, {1.0, 0.25 * c}}, {}, {});
}

LevyMeasure cauchy_levy(double t) {
  check_positive(t, "Cauchy parameter");
  // 𝒞_1 puts mass 1e-6 beyond this radius.
  double radius = std::tan(0.5 * kPi * (1.0 - 1e-6));
  std::vector<double> grid = mirror_nodes(tail_nodes(0.0, 1.0, radius));
  std::vector<double> dens(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) dens[i] = t / (kPi * (1.0 + grid[i] * grid[i]));
  return LevyMeasure({}, std::move(grid), std::move(dens));
}

LevyMeasure levy_measure_of(const NamedLaw& law) {
  switch (law.kind) {
    case NamedLaw::Kind::ClassicalGaussian: return gaussian_levy(law.param);
    case NamedLaw::Kind::ClassicalSymPoisson: return poisson_levy(law.param);
    case NamedLaw::Kind::ClassicalCauchy: return cauchy_levy(law.param);
    default: throw ValidationError("Lévy measure is only defined for the classical named laws");
  }
}

SymmetricMeasure rect_gaussian(double lambda) {
  check_lambda(lambda);
  if (lambda == 0.0) return symmetric_bernoulli();
  std::vector<double> grid;
  std::vector<double> dens;
  mp_lift(lambda, grid, dens);
  for (double& v : dens) v /= lambda;
  rescale_density(grid, dens, 1.0);
  return SymmetricMeasure::normalized({}, std::move(grid), std::move(dens), 1e-12);
}

double rect_cauchy_density(double lambda, double t, double x) {
  check_lambda(lambda);
  check_positive(t, "Cauchy parameter");
  double a = 0.5 * t * (1.0 - lambda);
  double ax = std::abs(x);
  if (ax <= a) return a == 0.0 ? 1.0 / (kPi * t) : 0.0;
  double root = a == 0.0 ? 1.0 : std::sqrt((ax - a) * (ax + a)) / ax;
  return t / (kPi * (lambda * t * t + x * x)) * root;
}

double rect_cauchy_tail_mass(double lambda, double t, double radius) {
  check_lambda(lambda);
  check_positive(t, "Cauchy parameter");
  double a = 0.5 * t * (1.0 - lambda);
  if (!(radius > 2.0 * a)) throw ValidationError("tail radius must exceed twice the gap half-width");
  // 2 ∫_0^{1/R} ρ(1/u)/u² du; the integrand is smooth for u < 1/a.
  const auto& rule = detail::gauss_legendre(24);
  double ub = 1.0 / radius;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double u = ub * rule.nodes[i];
    sum += rule.weights[i] * t / (kPi * (lambda * t * t * u * u + 1.0)) * std::sqrt(1.0 - a * a * u * u);
  }
  return 2.0 * ub * sum;
}

LevyMeasure rect_cauchy_truncated(double lambda, double t, double radius) {
  check_lambda(lambda);
  check_positive(t, "Cauchy parameter");
  double a = 0.5 * t * (1.0 - lambda);
  double mid = a + t;
  if (!(radius > 2.0 * mid)) throw ValidationError("truncation radius too small");
  std::vector<double> grid = mirror_nodes(tail_nodes(a, mid, radius));
  std::vector<double> dens(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) dens[i] = rect_cauchy_density(lambda, t, grid[i]);
  return LevyMeasure({}, std::move(grid), std::move(dens));
}

SymmetricMeasure rect_cauchy(double lambda, double t, double radius) {
  check_positive(t, "Cauchy parameter");
  if (radius == 0.0) radius = 1e4 * t;
  LevyMeasure g = rect_cauchy_truncated(lambda, t, radius);
  double tail = rect_cauchy_tail_mass(lambda, t, radius);
  return SymmetricMeasure::normalized(g.atoms(), g.grid(), g.density(), tail + 1e-6);
}

SymmetricMeasure rect_cauchy_reciprocal(double lambda, double t) {
  check_lambda(lambda);
  check_positive(t, "Cauchy parameter");
  if (lambda == 1.0) return rect_cauchy(1.0, 1.0 / t);
  // ρ(1/x)/x² for the rectangular Cauchy density ρ.
  double b = 2.0 / (t * (1.0 - lambda));
  std::vector<double> grid = mirror_nodes(right_clustered_nodes(0.0, b, kEdgeNodes));
  std::vector<double> dens(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x = std::abs(grid[i]);
    dens[i] = x >= b ? 0.0 : t / (kPi * (lambda * t * t * x * x + 1.0)) * std::sqrt((1.0 - x / b) * (1.0 + x / b));
  }
  rescale_density(grid, dens, 1.0);
  return SymmetricMeasure::normalized({}, std::move(grid), std::move(dens), 1e-12);
}

SymmetricMeasure rect_poisson(double lambda, double c, const ContourConfig& cfg) {
  check_lambda(lambda);
  check_positive(c, "Poisson rate");
  if (lambda == 0.0) return symmetrize_sqrt(marchenko_pastur(c));
  RTransformPtr tr = closed_form_r_transform([c](Complex z) {
    return Jet{c * z / (1.0 - z), c / ((1.0 - z) * (1.0 - z))};
  });
  return recover_measure(*tr, lambda, cfg, 2.5 * std::sqrt(c) + 2.0);
}

NonnegativeMeasure marchenko_pastur(double c) {
  check_positive(c, "Marchenko-Pastur parameter");
  std::vector<double> grid;
  std::vector<double> dens;
  mp_lift(c, grid, dens);
  rescale_density(grid, dens, std::min(c, 1.0));
  std::vector<Atom> atoms;
  if (c < 1.0) atoms.push_back({0.0, 1.0 - c});
  return NonnegativeMeasure(SymmetricMeasure::normalized(std::move(atoms), std::move(grid), std::move(dens), 1e-12));
}

SquareLimit square_limit_params(const LevyMeasure& g) {
  auto weight = [](double x) {
    double x2 = x * x;
    return (x2 * x2 + x2) / (x2 * x2 + 1.0);
  };
  SquareLimit out;
  out.gamma = g.integrate([](double t) { return (1.0 + t * t) / (1.0 + t * t * t * t); });
  std::vector<Atom> atoms;
  for (const Atom& a : g.atoms())
    if (a.x != 0.0) atoms.push_back({a.x, a.mass * weight(a.x)});
  std::vector<double> dens = g.density();
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] *= weight(g.grid()[i]);
  out.sigma = HalfLineMeasure(LevyMeasure::symmetrized(std::move(atoms), g.grid(), std::move(dens)));
  return out;
}

}  // namespace rectfree
