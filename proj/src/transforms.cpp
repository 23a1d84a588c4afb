#include "rectfree/transforms.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "rectfree/error.hpp"

namespace rectfree {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Jet h_jet(const SymmetricMeasure& mu, double lambda, Complex z) {
  Jet g = mu.reduced(z);
  Complex q = lambda * g.value * g.value + (1.0 - lambda) * g.value;
  Complex dq = (2.0 * lambda * g.value + (1.0 - lambda)) * g.derivative;
  return {z * q, q + z * dq};
}

// Damped Newton for H(a) = w from `a`; returns the final derivative H'(a) through `dh`.
bool newton_h(const SymmetricMeasure& mu, double lambda, Complex w, Complex& a, Complex& dh, double tol) {
  Jet j = h_jet(mu, lambda, a);
  if (!finite(j.value)) return false;
  Complex res = j.value - w;
  for (int it = 0; it < 120; ++it) {
    if (std::abs(res) <= tol * std::abs(w)) {
      dh = j.derivative;
      return true;
    }
    if (!finite(j.derivative) || j.derivative == Complex(0.0)) return false;
    Complex step = res / j.derivative;
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k) {
      Complex cand = a - t * step;
      Jet jc = h_jet(mu, lambda, cand);
      Complex rc = jc.value - w;
      if (finite(jc.value) && std::abs(rc) < std::abs(res)) {
        a = cand;
        j = jc;
        res = rc;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  if (std::abs(res) <= 1e3 * tol * std::abs(w)) {
    dh = j.derivative;
    return true;
  }
  return false;
}

// Inversion by continuation along the segment from a tiny multiple of w.
bool invert_h_homotopy(const SymmetricMeasure& mu, double lambda, Complex w, Complex& a, Complex& dh) {
  int levels = std::max(0, static_cast<int>(std::ceil(std::log2(std::abs(w) / 1e-7))));
  a = w * std::ldexp(1.0, -levels);
  for (int j = levels; j >= 0; --j) {
    Complex target = w * std::ldexp(1.0, -j);
    if (!newton_h(mu, lambda, target, a, dh, 1e-14)) return false;
  }
  return true;
}

}  // namespace

Complex sqrt_cut_negative(Complex z) { return std::sqrt(z); }

Complex sqrt_cut_positive(Complex z) { return Complex(0.0, 1.0) * std::sqrt(-z); }

Complex auxiliary_map(AuxMap kind, double lambda, Complex z) {
  check_lambda(lambda);
  switch (kind) {
    case AuxMap::U: {
      Complex s = std::sqrt((lambda + 1.0) * (lambda + 1.0) + 4.0 * lambda * z);
      return 2.0 * z / (s + lambda + 1.0);
    }
    case AuxMap::T:
      return (lambda * z + 1.0) * (z + 1.0);
    case AuxMap::V: {
      Complex s = std::sqrt((lambda - 1.0) * (lambda - 1.0) + 4.0 * lambda * z);
      return 2.0 * z / (s + 1.0 - lambda);
    }
  }
  return kNaN;
}

Complex cauchy_transform(const GriddedMeasure& mu, Complex z) {
  Complex g = mu.cauchy(z).value;
  if (!finite(g)) throw ValidationError("Cauchy transform evaluated on the support");
  return g;
}

Jet h_transform_jet(const SymmetricMeasure& mu, double lambda, Complex z) {
  check_lambda(lambda);
  if (z.imag() == 0.0 && z.real() >= 0.0) throw ValidationError("H is defined off [0, inf)");
  Jet j = h_jet(mu, lambda, z);
  if (!finite(j.value)) throw NumericalError("H evaluation is not finite");
  return j;
}

Complex h_transform(const SymmetricMeasure& mu, double lambda, Complex z) {
  return h_transform_jet(mu, lambda, z).value;
}

Complex invert_h(const SymmetricMeasure& mu, double lambda, Complex w, const ContourConfig& cfg) {
  check_lambda(lambda);
  double dist = std::numbers::pi - std::abs(std::arg(w));
  if (w == Complex(0.0) || !(std::abs(w) <= cfg.beta) || !(dist < cfg.alpha))
    throw ValidationError("point lies outside the inversion sector");
  Complex a = w;
  Complex dh;
  if (newton_h(mu, lambda, w, a, dh, 1e-14)) return a;
  if (invert_h_homotopy(mu, lambda, w, a, dh)) return a;
  throw NumericalError("H inversion failed; shrink the sector radius");
}

Complex rect_r_transform(const SymmetricMeasure& mu, double lambda, Complex z, const ContourConfig& cfg) {
  Complex a = invert_h(mu, lambda, z, cfg);
  return auxiliary_map(AuxMap::U, lambda, z / a - 1.0);
}

RTransform::RTransform(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (const Term& t : terms_) {
    if (!std::isfinite(t.weight)) throw ValidationError("R-transform weight must be finite");
    if (t.measure) check_lambda(t.lambda);
    else if (!t.fn) throw ValidationError("R-transform term without a function");
  }
}

Jet RTransform::eval(Complex z) const {
  Jet total{0.0, 0.0};
  for (const Term& t : terms_) {
    Jet j;
    if (t.measure) {
      if (z == Complex(0.0)) {
        j = {0.0, t.measure->moment(2)};
      } else {
        Complex a;
        Complex dh;
        if (!invert_h_homotopy(*t.measure, t.lambda, z, a, dh)) throw NumericalError("H inversion failed");
        Complex x = auxiliary_map(AuxMap::U, t.lambda, z / a - 1.0);
        Complex dv = 1.0 / a - z / (a * a * dh);
        j = {x, dv / (2.0 * t.lambda * x + t.lambda + 1.0)};
      }
    } else {
      j = t.fn(z);
    }
    total.value += t.weight * j.value;
    total.derivative += t.weight * j.derivative;
  }
  return total;
}

RTransformPtr measure_r_transform(SymmetricMeasure mu, double lambda) {
  check_lambda(lambda);
  RTransform::Term t;
  t.measure = std::make_shared<const SymmetricMeasure>(std::move(mu));
  t.lambda = lambda;
  return std::make_shared<RTransform>(std::vector<RTransform::Term>{t});
}

RTransformPtr closed_form_r_transform(std::function<Jet(Complex)> c) {
  if (!c) throw ValidationError("empty R-transform function");
  RTransform::Term t;
  t.fn = std::move(c);
  return std::make_shared<RTransform>(std::vector<RTransform::Term>{t});
}

RTransformPtr value_r_transform(std::function<Complex(Complex)> c) {
  if (!c) throw ValidationError("empty R-transform function");
  return closed_form_r_transform([c = std::move(c)](Complex z) {
    Complex dir = z.real() > 0.0 ? Complex(0.0, z.imag() >= 0.0 ? 1.0 : -1.0) : Complex(-1.0, 0.0);
    Complex s = 1e-5 * std::max(std::abs(z), 1e-12) * dir;
    Complex f0 = c(z);
    Complex f1 = c(z + s);
    Complex f2 = c(z + 2.0 * s);
    return Jet{f0, (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * s)};
  });
}

RTransformPtr sum_r_transform(const std::vector<RTransformPtr>& parts) {
  std::vector<RTransform::Term> terms;
  for (const auto& p : parts) {
    if (!p) throw ValidationError("null R-transform");
    terms.insert(terms.end(), p->terms().begin(), p->terms().end());
  }
  return std::make_shared<RTransform>(std::move(terms));
}

RTransformPtr scaled_r_transform(double k, const RTransformPtr& part) {
  if (!part) throw ValidationError("null R-transform");
  std::vector<RTransform::Term> terms = part->terms();
  for (auto& t : terms) t.weight *= k;
  return std::make_shared<RTransform>(std::move(terms));
}

double stieltjes_density(const std::function<Complex(Complex)>& g, double x, const ContourConfig& cfg) {
  const auto& eps = cfg.epsilon_schedule;
  if (eps.empty()) throw ValidationError("empty epsilon schedule");
  std::vector<double> table;
  for (double e : eps) {
    if (!(e > 0.0)) throw ValidationError("epsilon schedule must be positive");
    table.push_back(g(Complex(x, -e)).imag() / std::numbers::pi);
  }
  // Neville extrapolation to ε = 0.
  for (std::size_t level = 1; level < table.size(); ++level)
    for (std::size_t i = table.size() - 1; i >= level; --i) {
      double e1 = eps[i - level];
      double e2 = eps[i];
      table[i] = (e1 * table[i] - e2 * table[i - 1]) / (e1 - e2);
      if (i == level) break;
    }
  double f = table.back();
  if (f < -1e-9) throw NumericalError("negative density from Stieltjes inversion; result unreliable");
  return std::max(f, 0.0);
}

TransformGrid sample_transform(const SymmetricMeasure& mu, double lambda, TransformGrid::Kind kind,
                               const ContourConfig& cfg) {
  check_lambda(lambda);
  int side = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(cfg.n_points))));
  TransformGrid out;
  out.kind = kind;
  double span = std::min(cfg.alpha, std::numbers::pi) * 0.9;
  for (int i = 0; i < side; ++i) {
    double r = cfg.beta * 0.9 * std::pow(1e-3, 1.0 - static_cast<double>(i) / (side - 1));
    for (int k = 0; k < side; ++k) {
      double phi = std::numbers::pi - span + 2.0 * span * k / (side - 1);
      Complex z = std::polar(r, phi);
      if (z.imag() == 0.0 && z.real() > 0.0) continue;
      switch (kind) {
        case TransformGrid::Kind::G: {
          Complex zeta = 1.0 / sqrt_cut_positive(z);
          out.points.push_back(zeta);
          out.values.push_back(cauchy_transform(mu, zeta));
          break;
        }
        case TransformGrid::Kind::H:
          out.points.push_back(z);
          out.values.push_back(h_transform(mu, lambda, z));
          break;
        case TransformGrid::Kind::HInverse:
          out.points.push_back(z);
          out.values.push_back(invert_h(mu, lambda, z, cfg));
          break;
        case TransformGrid::Kind::C:
          out.points.push_back(z);
          out.values.push_back(rect_r_transform(mu, lambda, z, cfg));
          break;
      }
    }
  }
  return out;
}

std::string transform_grid_csv(const TransformGrid& grid) {
  const char* name = "H";
  switch (grid.kind) {
    case TransformGrid::Kind::G: name = "G"; break;
    case TransformGrid::Kind::H: name = "H"; break;
    case TransformGrid::Kind::HInverse: name = "Hinv"; break;
    case TransformGrid::Kind::C: name = "C"; break;
  }
  std::ostringstream out;
  out.precision(17);
  out << "re_z,im_z,re_value,im_value,kind\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    out << grid.points[i].real() << ',' << grid.points[i].imag() << ',' << grid.values[i].real() << ','
        << grid.values[i].imag() << ',' << name << '\n';
  return out.str();
}

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("RECTFREE_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

}  // namespace rectfree
