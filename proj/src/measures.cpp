#include "rectfree/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "quadrature.hpp"
#include "rectfree/error.hpp"

namespace rectfree {

namespace {

constexpr int kFarTerms = 44;
constexpr double kFarRatio = 3.0;
constexpr std::size_t kBlockSegments = 32;
constexpr std::size_t kBlockFanout = 8;
constexpr int kBlockTerms = 32;

std::vector<Atom> canonical_atoms(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.x) || !std::isfinite(a.mass) || a.mass < 0.0)
      throw ValidationError("atom with non-finite location or negative mass");
  }
  std::erase_if(atoms, [](const Atom& a) { return a.mass == 0.0; });
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && a.x == merged.back().x) {
      merged.back().mass += a.mass;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

void check_grid(const std::vector<double>& grid, const std::vector<double>& density) {
  if (grid.size() != density.size()) throw ValidationError("grid and density sizes differ");
  if (grid.size() == 1) throw ValidationError("a density grid needs at least two nodes");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(density[i]))
      throw ValidationError("non-finite grid node or density value");
    if (density[i] < 0.0) throw ValidationError("negative density value");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ValidationError("grid is not strictly increasing");
  }
}

Complex clog1p(Complex e) {
  double re = 0.5 * std::log1p(2.0 * e.real() + std::norm(e));
  double im = std::atan2(e.imag(), 1.0 + e.real());
  return {re, im};
}

bool near(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct Parts {
  std::vector<Atom> atoms;
  std::vector<double> grid;
  std::vector<double> density;
};

// Returns a symmetric copy, averaging mirror pairs that agree within `tol`.
Parts symmetrize(std::vector<Atom> atoms, std::vector<double> grid, std::vector<double> density,
                 double tol) {
  check_grid(grid, density);
  atoms = canonical_atoms(std::move(atoms));
  Parts out;

  double mass_scale = 0.0;
  for (const Atom& a : atoms) mass_scale = std::max(mass_scale, a.mass);
  Atom centre{0.0, 0.0};
  std::vector<Atom> neg;
  std::vector<Atom> pos;
  for (const Atom& a : atoms) {
    if (std::abs(a.x) <= tol) {
      centre.mass += a.mass;
    } else if (a.x < 0.0) {
      neg.push_back(a);
    } else {
      pos.push_back(a);
    }
  }
  std::reverse(neg.begin(), neg.end());
  if (neg.size() != pos.size()) throw ValidationError("atoms are not symmetric");
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (!near(-neg[i].x, pos[i].x, tol) ||
        std::abs(neg[i].mass - pos[i].mass) > tol * std::max(1.0, mass_scale))
      throw ValidationError("atoms are not symmetric");
    double x = 0.5 * (pos[i].x - neg[i].x);
    double m = 0.5 * (pos[i].mass + neg[i].mass);
    out.atoms.push_back({-x, m});
    out.atoms.push_back({x, m});
  }
  if (centre.mass > 0.0) out.atoms.push_back(centre);
  std::sort(out.atoms.begin(), out.atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });

  const std::size_t n = grid.size();
  double dscale = 0.0;
  for (double d : density) dscale = std::max(dscale, d);
  out.grid.resize(n);
  out.density.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = n - 1 - i;
    if (!near(-grid[j], grid[i], tol) || std::abs(density[i] - density[j]) > tol * std::max(1.0, dscale))
      throw ValidationError("density is not symmetric");
    out.grid[i] = 0.5 * (grid[i] - grid[j]);
    out.density[i] = 0.5 * (density[i] + density[j]);
  }
  if (n % 2 == 1) out.grid[n / 2] = 0.0;
  return out;
}

}  // namespace

// ---------------------------------------------------------------- GriddedMeasure

GriddedMeasure::GriddedMeasure(std::vector<Atom> atoms, std::vector<double> grid,
                               std::vector<double> density)
    : atoms_(canonical_atoms(std::move(atoms))), grid_(std::move(grid)), density_(std::move(density)) {
  check_grid(grid_, density_);
  radius_ = 0.0;
  for (const Atom& a : atoms_) radius_ = std::max(radius_, std::abs(a.x));
  std::size_t first = grid_.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (density_[i] > 0.0) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first < grid_.size()) {
    std::size_t lo = first > 0 ? first - 1 : first;
    std::size_t hi = last + 1 < grid_.size() ? last + 1 : last;
    radius_ = std::max({radius_, std::abs(grid_[lo]), std::abs(grid_[hi])});
  }
  build_far_field();
}

void GriddedMeasure::build_far_field() {
  scaled_moments_.assign(kFarTerms, 0.0);
  if (radius_ == 0.0) {
    scaled_moments_[0] = mass();
    return;
  }
  for (const Atom& a : atoms_) {
    double tau = a.x / radius_;
    double p = a.mass;
    for (int k = 0; k < kFarTerms; ++k) {
      scaled_moments_[k] += p;
      p *= tau;
    }
  }
  const auto& rule = detail::gauss_legendre(kFarTerms / 2 + 1);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    double f0 = density_[i];
    double f1 = density_[i + 1];
    if (f0 == 0.0 && f1 == 0.0) continue;
    double h = grid_[i + 1] - grid_[i];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      double u = rule.nodes[q];
      double t = grid_[i] + h * u;
      double p = h * rule.weights[q] * (f0 + (f1 - f0) * u);
      double tau = t / radius_;
      for (int k = 0; k < kFarTerms; ++k) {
        scaled_moments_[k] += p;
        p *= tau;
      }
    }
  }

  build_blocks();
}

void GriddedMeasure::build_blocks() {
  blocks_.clear();
  block_moments_.clear();
  block_roots_.clear();
  if (grid_.size() < 2) return;
  const auto& rule = detail::gauss_legendre(kBlockTerms / 2 + 2);
  std::vector<std::size_t> level;
  for (std::size_t b = 0; b + 1 < grid_.size(); b += kBlockSegments) {
    Block blk;
    blk.begin = b;
    blk.end = std::min(b + kBlockSegments, grid_.size() - 1);
    blk.centre = 0.5 * (grid_[blk.begin] + grid_[blk.end]);
    blk.half = 0.5 * (grid_[blk.end] - grid_[blk.begin]);
    std::vector<double> m(kBlockTerms, 0.0);
    for (std::size_t i = blk.begin; i < blk.end; ++i) {
      double f0 = density_[i];
      double f1 = density_[i + 1];
      if (f0 == 0.0 && f1 == 0.0) continue;
      blk.empty = false;
      double h = grid_[i + 1] - grid_[i];
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        double u = rule.nodes[q];
        double p = h * rule.weights[q] * (f0 + (f1 - f0) * u);
        double tau = (grid_[i] + h * u - blk.centre) / blk.half;
        for (int k = 0; k < kBlockTerms; ++k) {
          m[k] += p;
          p *= tau;
        }
      }
    }
    level.push_back(blocks_.size());
    blocks_.push_back(blk);
    block_moments_.insert(block_moments_.end(), m.begin(), m.end());
  }
  // Parents of kBlockFanout consecutive nodes; child expansions are re-centred binomially.
  std::vector<double> binom(kBlockTerms * kBlockTerms, 0.0);
  for (int k = 0; k < kBlockTerms; ++k) {
    binom[k * kBlockTerms] = 1.0;
    for (int j = 1; j <= k; ++j)
      binom[k * kBlockTerms + j] = binom[(k - 1) * kBlockTerms + j - 1] + (j < k ? binom[(k - 1) * kBlockTerms + j] : 0.0);
  }
  while (level.size() > kBlockFanout) {
    std::vector<std::size_t> next;
    for (std::size_t c = 0; c < level.size(); c += kBlockFanout) {
      Block parent;
      parent.leaf = false;
      parent.begin = level[c];
      parent.end = level[std::min(c + kBlockFanout, level.size()) - 1] + 1;
      double lo = blocks_[parent.begin].centre - blocks_[parent.begin].half;
      double hi = blocks_[parent.end - 1].centre + blocks_[parent.end - 1].half;
      parent.centre = 0.5 * (lo + hi);
      parent.half = 0.5 * (hi - lo);
      std::vector<double> m(kBlockTerms, 0.0);
      std::vector<double> dpow(kBlockTerms);
      std::vector<double> rpow(kBlockTerms);
      for (std::size_t i = parent.begin; i < parent.end; ++i) {
        const Block& child = blocks_[i];
        if (child.empty) continue;
        parent.empty = false;
        const double* cm = &block_moments_[i * kBlockTerms];
        double d = (child.centre - parent.centre) / parent.half;
        double r = child.half / parent.half;
        dpow[0] = 1.0;
        rpow[0] = 1.0;
        for (int k = 1; k < kBlockTerms; ++k) {
          dpow[k] = dpow[k - 1] * d;
          rpow[k] = rpow[k - 1] * r;
        }
        // ((t - C)/H)^k = Σ_j binom(k, j) d^{k-j} r^j ((t - c)/h)^j.
        for (int k = 0; k < kBlockTerms; ++k)
          for (int j = 0; j <= k; ++j) m[k] += binom[k * kBlockTerms + j] * dpow[k - j] * rpow[j] * cm[j];
      }
      next.push_back(blocks_.size());
      blocks_.push_back(parent);
      block_moments_.insert(block_moments_.end(), m.begin(), m.end());
    }
    level = std::move(next);
  }
  block_roots_ = level;
}

double GriddedMeasure::atom_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.mass;
  return m;
}

double GriddedMeasure::mass() const {
  double m = atom_mass();
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    m += 0.5 * (density_[i] + density_[i + 1]) * (grid_[i + 1] - grid_[i]);
  return m;
}

double GriddedMeasure::raw_moment(int k) const {
  if (k < 0) throw ValidationError("moment order must be nonnegative");
  if (k == 0) return mass();
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.mass * std::pow(a.x, k);
  const auto& rule = detail::gauss_legendre(k / 2 + 2);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    double f0 = density_[i];
    double f1 = density_[i + 1];
    if (f0 == 0.0 && f1 == 0.0) continue;
    double h = grid_[i + 1] - grid_[i];
    double seg = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      double u = rule.nodes[q];
      seg += rule.weights[q] * (f0 + (f1 - f0) * u) * std::pow(grid_[i] + h * u, k);
    }
    sum += h * seg;
  }
  return sum;
}

double GriddedMeasure::density_at(double x) const {
  if (grid_.empty() || x < grid_.front() || x > grid_.back()) return 0.0;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) return density_.back();
  std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  double u = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
  return density_[i] + (density_[i + 1] - density_[i]) * u;
}

double GriddedMeasure::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.mass * f(a.x);
  const auto& rule = detail::gauss_legendre(5);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    double f0 = density_[i];
    double f1 = density_[i + 1];
    if (f0 == 0.0 && f1 == 0.0) continue;
    double h = grid_[i + 1] - grid_[i];
    double seg = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      double u = rule.nodes[q];
      seg += rule.weights[q] * (f0 + (f1 - f0) * u) * f(grid_[i] + h * u);
    }
    sum += h * seg;
  }
  return sum;
}

Jet GriddedMeasure::cauchy(Complex z) const {
  if (std::abs(z) >= kFarRatio * radius_ && z != Complex(0.0)) {
    Complex inv = 1.0 / z;
    Complex r = radius_ * inv;
    Complex p = 1.0;
    Complex g = 0.0;
    Complex dg = 0.0;
    for (int k = 0; k < kFarTerms; ++k) {
      g += scaled_moments_[k] * p;
      dg += (k + 1.0) * scaled_moments_[k] * p;
      p *= r;
    }
    return {g * inv, -dg * inv * inv};
  }
  return cauchy_near(z);
}

Jet GriddedMeasure::cauchy_near(Complex z) const {
  Complex g = 0.0;
  Complex dg = 0.0;
  for (const Atom& a : atoms_) {
    Complex inv = 1.0 / (z - a.x);
    g += a.mass * inv;
    dg -= a.mass * inv * inv;
  }
  std::size_t stack[64];
  std::size_t top = 0;
  for (std::size_t r : block_roots_) stack[top++] = r;
  while (top > 0) {
    std::size_t b = stack[--top];
    const Block& blk = blocks_[b];
    if (blk.empty) continue;
    Complex d = z - blk.centre;
    if (std::abs(d) >= kFarRatio * blk.half) {
      // Σ S_k half^k / d^{k+1}, error below (1/3)^kBlockTerms of the block mass.
      const double* m = &block_moments_[b * kBlockTerms];
      Complex q = blk.half / d;
      Complex s = 0.0;
      Complex ds = 0.0;
      for (int k = kBlockTerms - 1; k >= 0; --k) {
        s = s * q + m[k];
        ds = ds * q + (k + 1.0) * m[k];
      }
      Complex inv = 1.0 / d;
      g += s * inv;
      dg -= ds * inv * inv;
      continue;
    }
    if (!blk.leaf) {
      for (std::size_t c = blk.begin; c < blk.end; ++c) stack[top++] = c;
      continue;
    }
    for (std::size_t i = blk.begin; i < blk.end; ++i) {
      double f0 = density_[i];
      double f1 = density_[i + 1];
      if (f0 == 0.0 && f1 == 0.0) continue;
      double h = grid_[i + 1] - grid_[i];
      Complex u1 = z - grid_[i + 1];
      Complex u0 = z - grid_[i];
      Complex e = h / u1;
      // L = log(u0/u1), P = L - e, Q = (1 + e) L - e.
      Complex L;
      Complex P;
      Complex Q;
      if (std::abs(e) < 0.05) {
        Complex ek = e * e;
        P = 0.0;
        Q = 0.0;
        for (int k = 2; k <= 16; ++k) {
          double sign = (k % 2 == 0) ? 1.0 : -1.0;
          P -= sign * ek / static_cast<double>(k);
          Q += sign * ek / static_cast<double>(k * (k - 1));
          ek *= e;
        }
        L = P + e;
      } else {
        L = clog1p(e);
        P = L - e;
        Q = (1.0 + e) * L - e;
      }
      double s = (f1 - f0) / h;
      g += f0 * L + s * u1 * Q;
      dg += s * P - f0 * h / (u0 * u1);
    }
  }
  return {g, dg};
}

Jet GriddedMeasure::reduced(Complex a) const {
  if (std::abs(a) * radius_ * radius_ <= 1.0 / (kFarRatio * kFarRatio)) {
    Complex x = a * radius_ * radius_;
    Complex p = 1.0;
    Complex g = 0.0;
    Complex dg = 0.0;
    for (int k = 0; 2 * k < kFarTerms; ++k) {
      g += scaled_moments_[2 * k] * p;
      if (2 * k + 2 < kFarTerms) dg += (k + 1.0) * scaled_moments_[2 * k + 2] * p;
      p *= x;
    }
    return {g, dg * radius_ * radius_};
  }
  Complex zeta = 1.0 / std::sqrt(a);
  Complex g;
  Complex dg_dzeta;
  if (symmetric_) {
    Jet j = cauchy_near(zeta);
    g = zeta * j.value;
    dg_dzeta = j.value + zeta * j.derivative;
  } else {
    Jet j1 = cauchy_near(zeta);
    Jet j2 = cauchy_near(-zeta);
    g = 0.5 * zeta * (j1.value - j2.value);
    dg_dzeta = 0.5 * (j1.value - j2.value) + 0.5 * zeta * (j1.derivative + j2.derivative);
  }
  return {g, -0.5 * dg_dzeta * zeta * zeta * zeta};
}

// ---------------------------------------------------------------- SymmetricMeasure

SymmetricMeasure::SymmetricMeasure() : SymmetricMeasure(Trusted{}, GriddedMeasure({{0.0, 1.0}}, {}, {})) {}

SymmetricMeasure::SymmetricMeasure(Trusted, GriddedMeasure base) : GriddedMeasure(std::move(base)) {
  symmetric_ = true;
}

SymmetricMeasure::SymmetricMeasure(std::vector<Atom> atoms, std::vector<double> grid,
                                   std::vector<double> density)
    : GriddedMeasure(std::move(atoms), std::move(grid), std::move(density)) {
  symmetric_ = true;
  // Verification only; symmetrize throws on asymmetry beyond 1e-12.
  Parts p = symmetrize(this->atoms(), this->grid(), this->density(), 1e-12);
  (void)p;
  if (std::abs(mass() - 1.0) > 1e-9)
    throw ValidationError("total mass " + std::to_string(mass()) + " differs from 1");
}

SymmetricMeasure SymmetricMeasure::normalized(std::vector<Atom> atoms, std::vector<double> grid,
                                              std::vector<double> density, double drift) {
  Parts p = symmetrize(std::move(atoms), std::move(grid), std::move(density), 1e-6);
  GriddedMeasure raw(p.atoms, p.grid, p.density);
  double m = raw.mass();
  if (!(std::abs(m - 1.0) <= drift))
    throw ValidationError("total mass " + std::to_string(m) + " drifts from 1 beyond tolerance");
  for (Atom& a : p.atoms) a.mass /= m;
  for (double& d : p.density) d /= m;
  return SymmetricMeasure(Trusted{}, GriddedMeasure(std::move(p.atoms), std::move(p.grid), std::move(p.density)));
}

double SymmetricMeasure::moment(int k) const {
  if (k < 0) throw ValidationError("moment order must be nonnegative");
  if (k == 0) return 1.0;
  if (k % 2 == 1) return 0.0;
  return raw_moment(k);
}

// ---------------------------------------------------------------- LevyMeasure

LevyMeasure::LevyMeasure(Trusted, GriddedMeasure base) : GriddedMeasure(std::move(base)) { symmetric_ = true; }

LevyMeasure::LevyMeasure(std::vector<Atom> atoms, std::vector<double> grid, std::vector<double> density)
    : GriddedMeasure(std::move(atoms), std::move(grid), std::move(density)) {
  symmetric_ = true;
  Parts p = symmetrize(this->atoms(), this->grid(), this->density(), 1e-12);
  (void)p;
}

LevyMeasure LevyMeasure::symmetrized(std::vector<Atom> atoms, std::vector<double> grid,
                                     std::vector<double> density) {
  Parts p = symmetrize(std::move(atoms), std::move(grid), std::move(density), 1e-6);
  return LevyMeasure(Trusted{}, GriddedMeasure(std::move(p.atoms), std::move(p.grid), std::move(p.density)));
}

LevyMeasure::LevyMeasure(const SymmetricMeasure& mu) : LevyMeasure(Trusted{}, GriddedMeasure(mu)) {}

double LevyMeasure::moment(int k) const {
  if (k % 2 == 1 && k > 0) return 0.0;
  return raw_moment(k);
}

// ---------------------------------------------------------------- HalfLineMeasure

HalfLineMeasure HalfLineMeasure::from_half_line(std::vector<Atom> atoms, std::vector<double> grid,
                                                std::vector<double> density) {
  check_grid(grid, density);
  std::vector<Atom> lift_atoms;
  for (const Atom& a : atoms) {
    if (!(a.x >= 0.0)) throw ValidationError("half-line measure has an atom at a negative point");
    if (a.x == 0.0) {
      lift_atoms.push_back({0.0, a.mass});
    } else {
      double r = std::sqrt(a.x);
      lift_atoms.push_back({-r, 0.5 * a.mass});
      lift_atoms.push_back({r, 0.5 * a.mass});
    }
  }
  std::vector<double> px;
  std::vector<double> pf;
  if (!grid.empty()) {
    if (grid.front() < 0.0) throw ValidationError("half-line measure has grid nodes below 0");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double x = std::sqrt(grid[i]);
      px.push_back(x);
      pf.push_back(density[i] * x);
    }
    if (grid.front() == 0.0) {
      if (px.size() < 2) throw ValidationError("grid too short");
      // Mass of [0, s1] is (v0 + f1/x1) x1^2 / 2 = (f0 + f1) x1 on the lift.
      double x1 = px[1];
      pf[0] = std::max(0.0, 0.5 * (density[0] * x1 - pf[1]));
    } else if (density.front() > 0.0) {
      px.insert(px.begin(), px.front() * (1.0 - 1e-9));
      pf.insert(pf.begin(), 0.0);
    }
  }
  std::vector<double> lg;
  std::vector<double> lf;
  for (std::size_t i = px.size(); i-- > 0;) {
    if (px[i] == 0.0) continue;
    lg.push_back(-px[i]);
    lf.push_back(pf[i]);
  }
  for (std::size_t i = 0; i < px.size(); ++i) {
    lg.push_back(px[i]);
    lf.push_back(pf[i]);
  }
  return HalfLineMeasure(LevyMeasure(std::move(lift_atoms), std::move(lg), std::move(lf)));
}

double HalfLineMeasure::moment(int k) const {
  if (k < 0) throw ValidationError("moment order must be nonnegative");
  return lift_.raw_moment(2 * k);
}

double HalfLineMeasure::integrate(const std::function<double(double)>& f) const {
  return lift_.integrate([&](double x) { return f(x * x); });
}

std::vector<Atom> HalfLineMeasure::atoms() const {
  std::vector<Atom> out;
  for (const Atom& a : lift_.atoms()) {
    if (a.x == 0.0) out.push_back({0.0, a.mass});
    if (a.x > 0.0) out.push_back({a.x * a.x, 2.0 * a.mass});
  }
  return out;
}

namespace {

// Nonnegative lift nodes with values, including x = 0 when the density there is positive.
void lift_half(const LevyMeasure& lift, std::vector<double>& x, std::vector<double>& f) {
  const auto& g = lift.grid();
  const auto& d = lift.density();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 0.0) continue;
    if (x.empty() && g[i] > 0.0 && i > 0 && d[i] > 0.0) {
      x.push_back(0.0);
      f.push_back(d[i]);  // central segment is constant
    }
    x.push_back(g[i]);
    f.push_back(d[i]);
  }
}

}  // namespace

std::vector<double> HalfLineMeasure::grid() const {
  std::vector<double> x;
  std::vector<double> f;
  lift_half(lift_, x, f);
  for (double& v : x) v = v * v;
  return x;
}

std::vector<double> HalfLineMeasure::density() const {
  std::vector<double> x;
  std::vector<double> f;
  lift_half(lift_, x, f);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      out[i] = f[i] / x[i];
    } else {
      out[i] = x.size() > 1 ? (2.0 * f[0] + f[1]) / x[1] : 0.0;
    }
  }
  return out;
}

NonnegativeMeasure::NonnegativeMeasure() : NonnegativeMeasure(SymmetricMeasure()) {}

NonnegativeMeasure::NonnegativeMeasure(const SymmetricMeasure& lift) : HalfLineMeasure(LevyMeasure(lift)) {}

NonnegativeMeasure NonnegativeMeasure::from_half_line(std::vector<Atom> atoms, std::vector<double> grid,
                                                      std::vector<double> density, double drift) {
  HalfLineMeasure h = HalfLineMeasure::from_half_line(std::move(atoms), std::move(grid), std::move(density));
  const LevyMeasure& l = h.lift();
  return NonnegativeMeasure(SymmetricMeasure::normalized(l.atoms(), l.grid(), l.density(), drift));
}

// ---------------------------------------------------------------- operations

NonnegativeMeasure pushforward_square(const SymmetricMeasure& mu) { return NonnegativeMeasure(mu); }

HalfLineMeasure pushforward_square(const LevyMeasure& g) { return HalfLineMeasure(g); }

SymmetricMeasure symmetrize_sqrt(const NonnegativeMeasure& rho) {
  const LevyMeasure& l = rho.lift();
  return SymmetricMeasure::normalized(l.atoms(), l.grid(), l.density(), 1e-9);
}

SymmetricMeasure dilate(const SymmetricMeasure& mu, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("dilation factor must be positive");
  std::vector<Atom> atoms = mu.atoms();
  for (Atom& a : atoms) a.x *= c;
  std::vector<double> grid = mu.grid();
  std::vector<double> density = mu.density();
  for (double& x : grid) x *= c;
  for (double& d : density) d /= c;
  return SymmetricMeasure::normalized(std::move(atoms), std::move(grid), std::move(density));
}

SymmetricMeasure dirac_zero() { return SymmetricMeasure(); }

SymmetricMeasure symmetric_bernoulli() { return SymmetricMeasure({{-1.0, 0.5}, {1.0, 0.5}}, {}, {}); }

std::vector<double> clustered_nodes(double a, double b, int n) {
  if (n < 2 || !(b > a)) throw ValidationError("bad node layout");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = a + (b - a) * 0.5 * (1.0 - std::cos(std::numbers::pi * i / (n - 1)));
  x.front() = a;
  x.back() = b;
  return x;
}

std::vector<double> right_clustered_nodes(double a, double b, int n) {
  if (n < 2 || !(b > a)) throw ValidationError("bad node layout");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * std::sin(0.5 * std::numbers::pi * i / (n - 1));
  x.front() = a;
  x.back() = b;
  return x;
}

std::vector<double> mirror_nodes(const std::vector<double>& positive) {
  std::vector<double> out;
  for (std::size_t i = positive.size(); i-- > 0;) {
    if (positive[i] == 0.0) continue;
    out.push_back(-positive[i]);
  }
  out.insert(out.end(), positive.begin(), positive.end());
  return out;
}

}  // namespace rectfree
