#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>

#include "rectfree/error.hpp"
#include "rectfree/transforms.hpp"

namespace rectfree {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kScanPoints = 400;
constexpr int kMaxNewton = 40;
// Atom refinement stops at this height (relative to max(1, |x|)); nodes closer
// than kAtomGuard to an atom are interpolated instead of evaluated.
constexpr double kAtomDepth = 2e-5;
constexpr double kAtomGuard = 1e-4;
constexpr double kGrading = 3.0;
// Slowest geometric descent kept after a successful but laborious step.
constexpr double kMaxRatio = 0.9;
// Density nodes within kEdgeReach * ε of a support edge are extrapolated, not sampled.
constexpr double kEdgeReach = 50.0;
// Curvature correction needs steps below this fraction of the distance to an edge.
constexpr double kCurvatureStep = 0.1;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr error;
  std::size_t error_index = n;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  int extra = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n)) - 1;
  for (int t = 0; t < extra; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// A solved point of the continuation at ζ = x - iy, w = 1/ζ². The unknowns are
// v = (h, a_1, X_1, a_2, X_2, ...) where h = H(w) and, for every measure term μ_i,
// H_{μ_i}(a_i) = h and X_i = C_{μ_i}(h). `tangent` is dv/dw; g = ζ G(ζ).
struct PathPoint {
  double x = 0.0;
  double y = 0.0;
  Complex g;
  std::vector<Complex> v;
  std::vector<Complex> tangent;
};

struct Sample {
  std::vector<double> img;  // Im G(x - iε) per reached schedule entry
  bool ok = false;
};

// Dense complex solve with partial pivoting; a is row-major n x n and is destroyed.
bool solve_linear(std::vector<Complex>& a, std::vector<Complex>& b, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (!(std::abs(a[piv * n + c]) > 0.0)) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      Complex f = a[r * n + c] / a[c * n + c];
      if (f == Complex(0.0)) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    Complex sum = b[c];
    for (std::size_t k = c + 1; k < n; ++k) sum -= a[c * n + k] * b[k];
    b[c] = sum / a[c * n + c];
  }
  for (std::size_t c = 0; c < n; ++c)
    if (!finite(b[c])) return false;
  return true;
}

class Tracker {
 public:
  Tracker(const RTransform& c, double lambda) : lambda_(lambda) {
    for (const auto& t : c.terms()) {
      if (t.measure) {
        if (t.lambda != lambda) throw ValidationError("R-transform term uses a different lambda");
        measures_.push_back(&t);
      } else {
        explicit_.push_back(&t);
      }
    }
    n_ = 1 + 2 * measures_.size();
  }

  static Complex zeta(double x, double y) { return {x, -y}; }
  static Complex w_of(double x, double y) {
    Complex z = zeta(x, y);
    return 1.0 / (z * z);
  }
  static Complex cauchy(const PathPoint& p) { return p.g / zeta(p.x, p.y); }

  PathPoint start(double x, double y) const {
    Complex w = w_of(x, y);
    PathPoint p;
    p.x = x;
    p.y = y;
    p.g = 1.0;
    p.v.assign(n_, Complex{});
    p.v[0] = w;
    for (std::size_t i = 0; i < measures_.size(); ++i) p.v[1 + 2 * i] = w;
    p.tangent.assign(n_, Complex{});
    if (solve_at(p, x, y, p.v) < 0) throw NumericalError("recovery could not start its continuation path");
    return p;
  }

  // Moves p to (x, y) from an Euler predictor; returns Newton iterations or -1.
  int step(PathPoint& p, double x, double y) const {
    Complex dw = w_of(x, y) - w_of(p.x, p.y);
    std::vector<Complex> guess(n_);
    for (std::size_t k = 0; k < n_; ++k) guess[k] = p.v[k] + p.tangent[k] * dw;
    int it = solve_at(p, x, y, guess);
    if (it < 0 && guess != p.v) it = solve_at(p, x, y, p.v);
    return it;
  }

  // Vertical move to y_target with an adaptive geometric ratio.
  bool descend(PathPoint& p, double y_target, double& ratio) const {
    while (p.y > y_target * (1.0 + 1e-12)) {
      double yn = std::max(y_target, p.y * ratio);
      int it = step(p, p.x, yn);
      if (it >= 0) {
        ratio = it <= 4 ? std::max(ratio * ratio, 0.1) : std::min(std::sqrt(ratio), kMaxRatio);
      } else {
        ratio = std::sqrt(ratio);
        if (ratio > 0.999) return false;
      }
    }
    return true;
  }

  // Horizontal move at fixed y.
  bool slide(PathPoint& p, double x_target) const {
    double ds = 0.5 * p.y;
    while (p.x != x_target) {
      double gap = x_target - p.x;
      double x = std::abs(gap) <= ds ? x_target : p.x + std::copysign(ds, gap);
      if (step(p, x, p.y) >= 0) {
        ds = std::min(2.0 * ds, 0.5 * p.y);
      } else {
        ds *= 0.5;
        if (ds < 1e-7 * p.y) return false;
      }
    }
    return true;
  }

  Sample sample(PathPoint p, double x, const std::vector<double>& eps) const {
    Sample s;
    if (!slide(p, x)) return s;
    double ratio = 0.5;
    for (double e : eps) {
      if (!descend(p, e, ratio)) return s;
      s.img.push_back(cauchy(p).imag());
    }
    s.ok = true;
    return s;
  }

 private:
  struct System {
    std::vector<Complex> f;
    std::vector<double> scale;
    std::vector<Complex> jac;
    Complex t;  // T(C(h))

    double error() const {
      double e = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) e = std::max(e, std::abs(f[k]) / scale[k]);
      return e;
    }
  };

  bool evaluate(Complex w, const std::vector<Complex>& v, System& s) const {
    std::size_t n = n_;
    s.f.assign(n, Complex{});
    s.scale.assign(n, 0.0);
    s.jac.assign(n * n, Complex{});
    Complex h = v[0];
    Complex sum = 0.0;
    Complex dsum = 0.0;
    try {
      for (const auto* t : explicit_) {
        Jet j = t->fn(h);
        sum += t->weight * j.value;
        dsum += t->weight * j.derivative;
      }
    } catch (const Error&) {
      // Trial points off the function's domain (e.g. its positive-axis cut) are rejected.
      return false;
    }
    for (std::size_t i = 0; i < measures_.size(); ++i) {
      const auto& t = *measures_[i];
      std::size_t ra = 1 + 2 * i;
      std::size_t rx = ra + 1;
      Complex a = v[ra];
      Complex X = v[rx];
      Jet g = t.measure->reduced(a);
      Complex q = lambda_ * g.value * g.value + (1.0 - lambda_) * g.value;
      Complex hv = a * q;
      Complex dh = q + a * (2.0 * lambda_ * g.value + 1.0 - lambda_) * g.derivative;
      Complex tx = (lambda_ * X + 1.0) * (X + 1.0);
      s.f[ra] = hv - h;
      s.scale[ra] = std::abs(hv) + std::abs(h);
      s.jac[ra * n] = -1.0;
      s.jac[ra * n + ra] = dh;
      s.f[rx] = tx * a - h;
      s.scale[rx] = std::abs(tx * a) + std::abs(h);
      s.jac[rx * n] = -1.0;
      s.jac[rx * n + ra] = tx;
      s.jac[rx * n + rx] = (2.0 * lambda_ * X + lambda_ + 1.0) * a;
      sum += t.weight * X;
    }
    s.t = (lambda_ * sum + 1.0) * (sum + 1.0);
    Complex dt = 2.0 * lambda_ * sum + lambda_ + 1.0;
    s.f[0] = h - w * s.t;
    s.scale[0] = std::abs(h) + std::abs(w * s.t);
    s.jac[0] = 1.0 - w * dt * dsum;
    for (std::size_t i = 0; i < measures_.size(); ++i) s.jac[2 + 2 * i] = -w * dt * measures_[i]->weight;
    for (std::size_t k = 0; k < n; ++k) {
      if (!finite(s.f[k]) || !std::isfinite(s.scale[k])) return false;
      if (s.scale[k] == 0.0) s.scale[k] = 1e-300;
    }
    for (const Complex& z : s.jac)
      if (!finite(z)) return false;
    return true;
  }

  // Damped Newton from `guess`; on success stores the point in p.
  int solve_at(PathPoint& p, double x, double y, std::vector<Complex> v) const {
    Complex w = w_of(x, y);
    System s;
    if (!evaluate(w, v, s)) return -1;
    double err = s.error();
    int it = 0;
    for (;; ++it) {
      if (err <= 1e-12) break;
      if (it == kMaxNewton) return -1;
      std::vector<Complex> a = s.jac;
      std::vector<Complex> d(n_);
      for (std::size_t k = 0; k < n_; ++k) d[k] = -s.f[k];
      if (!solve_linear(a, d, n_)) return -1;
      bool moved = false;
      for (double t = 1.0; t > 1e-6; t *= 0.5) {
        std::vector<Complex> trial(n_);
        for (std::size_t k = 0; k < n_; ++k) trial[k] = v[k] + t * d[k];
        System st;
        if (evaluate(w, trial, st) && st.error() < err) {
          v = std::move(trial);
          s = std::move(st);
          err = s.error();
          moved = true;
          break;
        }
      }
      // Rounding floor near poles of H: accept a stalled but small residual.
      if (!moved) {
        if (err <= 1e-9) break;
        return -1;
      }
    }
    Complex u = v[0] / w;
    Complex g = pick_g(u, p.v.empty() ? Complex(1.0) : p.v[0] / w_of(p.x, p.y), p.g);
    Complex G = g / zeta(x, y);
    if (v[0] == Complex(0.0) || !finite(G) || !(G.imag() > 0.0) || std::abs(G) * y > 1.0 + 1e-6) return -1;
    std::vector<Complex> a = s.jac;
    std::vector<Complex> tan(n_, Complex{});
    tan[0] = s.t;
    if (!solve_linear(a, tan, n_)) tan.assign(n_, Complex{});
    p.x = x;
    p.y = y;
    p.g = g;
    p.v = std::move(v);
    p.tangent = std::move(tan);
    return it;
  }

  // Root of λg² + (1-λ)g = u continuing g_prev (which solved the equation at u_prev).
  Complex pick_g(Complex u, Complex u_prev, Complex g_prev) const {
    if (lambda_ == 0.0) return u;
    Complex s = std::sqrt((1.0 - lambda_) * (1.0 - lambda_) + 4.0 * lambda_ * u);
    Complex g1 = 2.0 * u / (s + 1.0 - lambda_);
    Complex g2 = (lambda_ - 1.0 - s) / (2.0 * lambda_);
    Complex slope = 2.0 * lambda_ * g_prev + 1.0 - lambda_;
    Complex target = std::abs(slope) > 1e-8 ? g_prev + (u - u_prev) / slope : g_prev;
    return std::abs(g1 - target) <= std::abs(g2 - target) ? g1 : g2;
  }

  double lambda_;
  std::vector<const RTransform::Term*> measures_;
  std::vector<const RTransform::Term*> explicit_;
  std::size_t n_ = 1;
};

// Neville extrapolation to ε = 0; falls back to the smallest-ε value when the
// correction is out of proportion with the spread of the data.
double extrapolate(const std::vector<double>& eps, std::vector<double> v) {
  if (v.size() < 2) return v.empty() ? kNaN : v.back();
  double last = v.back();
  double spread = std::abs(v.back() - v.front());
  for (std::size_t level = 1; level < v.size(); ++level)
    for (std::size_t i = v.size() - 1; i >= level; --i) {
      v[i] = (eps[i - level] * v[i] - eps[i] * v[i - 1]) / (eps[i - level] - eps[i]);
      if (i == level) break;
    }
  double out = v.back();
  if (!std::isfinite(out) || std::abs(out - last) > 2.0 * spread + 1e-9) return last;
  return out;
}

void validate(const ContourConfig& cfg, double lambda, double hint) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
  if (!(cfg.alpha > 0.0 && cfg.alpha < kPi)) throw ValidationError("alpha must lie in (0, pi)");
  if (!(cfg.beta > 0.0)) throw ValidationError("beta must be positive");
  if (cfg.n_points < 3) throw ValidationError("n_points must be at least 3");
  const auto& e = cfg.epsilon_schedule;
  if (e.empty()) throw ValidationError("empty epsilon schedule");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e[i] > 0.0)) throw ValidationError("epsilon schedule must be positive");
    if (i > 0 && !(e[i] < e[i - 1])) throw ValidationError("epsilon schedule must decrease strictly");
  }
  if (!(hint > 0.0) || !std::isfinite(hint)) throw ValidationError("support hint must be positive");
}

// Density c|x - e|^p near a support edge e, fitted through two nodes.
struct EdgeModel {
  double e = 0.0;
  double c = 0.0;
  double p = 0.0;
  bool valid = false;

  static EdgeModel fit(double e, double x1, double f1, double x2, double f2) {
    EdgeModel m;
    m.e = e;
    if (!(f1 > 0.0) || !(f2 > 0.0)) return m;
    double d1 = std::abs(x1 - e);
    double d2 = std::abs(x2 - e);
    m.p = std::clamp(std::log(f2 / f1) / std::log(d2 / d1), -0.9, 1.0);
    m.c = f1 / std::pow(d1, m.p);
    m.valid = std::isfinite(m.c);
    return m;
  }
  double operator()(double x) const { return valid ? c * std::pow(std::abs(x - e), p) : 0.0; }
  // Exact mass between two points on the same side of e.
  double mass(double a, double b) const {
    if (!valid) return 0.0;
    return c * std::abs(std::pow(std::abs(b - e), p + 1.0) - std::pow(std::abs(a - e), p + 1.0)) / (p + 1.0);
  }
};

class Recovery {
 public:
  Recovery(const RTransform& c, double lambda, const ContourConfig& cfg)
      : tracker_(c, lambda), cfg_(cfg), eps_(cfg.epsilon_schedule), threads_(resolve_threads(cfg.threads)) {}

  // Empty result means the support reaches past R (or mass is missing and a wider
  // window may still be tried).
  std::optional<SymmetricMeasure> run(double R, bool last) {
    R_ = R;
    dx_ = R / kScanPoints;
    ys_ = 2.0 * dx_;
    build_scan_line();
    std::vector<Sample> samples(kScanPoints + 1);
    parallel_for(samples.size(), threads_, [&](std::size_t j) {
      if (valid_[j]) samples[j] = tracker_.sample(scan_[j], j * dx_, eps_);
    });

    find_zero_atom(samples[0]);
    find_atoms(samples);

    std::vector<double> f(kScanPoints + 1);
    for (int j = 0; j <= kScanPoints; ++j) f[j] = density_from(samples[j], j * dx_);
    fill_gaps(f, [&](std::size_t j) { return j * dx_; });
    double fmax = *std::max_element(f.begin(), f.end());

    std::vector<double> grid;
    std::vector<double> dens;
    if (fmax >= 1e-7) {
      thr_ = std::max(1e-6 * fmax, 1e-8);
      if (f[kScanPoints] > thr_) return std::nullopt;
      build_density(f, grid, dens);
    }

    std::vector<Atom> atoms;
    double mass = 0.0;
    for (const Atom& a : atoms_) {
      if (a.x == 0.0) {
        atoms.push_back(a);
        mass += a.mass;
      } else {
        atoms.push_back({a.x, a.mass});
        atoms.push_back({-a.x, a.mass});
        mass += 2.0 * a.mass;
      }
    }
    if (!grid.empty()) mass += GriddedMeasure({}, grid, dens).mass();
    if (mass < 1.0 - 1e-3 && !last) return std::nullopt;
    if (atoms.empty() && grid.empty()) throw NumericalError("recovery found neither atoms nor density");
    if (std::abs(mass - 1.0) > 1e-3)
      throw NumericalError("recovered mass " + std::to_string(mass) + " deviates from 1 by more than 1e-3");
    return SymmetricMeasure::normalized(std::move(atoms), std::move(grid), std::move(dens), 1e-3);
  }

 private:
  // Scan points at height ys. A point the horizontal march cannot reach gets a
  // fresh vertical path; points where both fail stay invalid.
  void build_scan_line() {
    scan_.assign(kScanPoints + 1, PathPoint{});
    valid_.assign(kScanPoints + 1, 0);
    double top = 50.0 * std::max(R_, 1.0);
    for (int j = 0; j <= kScanPoints; ++j) {
      double x = j * dx_;
      if (j > 0 && valid_[j - 1]) {
        scan_[j] = scan_[j - 1];
        if (tracker_.slide(scan_[j], x)) {
          valid_[j] = 1;
          continue;
        }
      }
      try {
        PathPoint p = tracker_.start(x, top);
        double ratio = 0.5;
        if (tracker_.descend(p, ys_, ratio)) {
          scan_[j] = std::move(p);
          valid_[j] = 1;
        }
      } catch (const Error&) {
      }
    }
    int good = static_cast<int>(std::count(valid_.begin(), valid_.end(), 1));
    if (good < kScanPoints / 2) throw NumericalError("recovery failed along the scan line");
  }

  void find_zero_atom(const Sample& s) {
    if (s.img.size() < 1) return;
    std::size_t n = s.img.size();
    double q_last = eps_[n - 1] * s.img[n - 1];
    double q_first = eps_[0] * s.img[0];
    if (n == 1) return;
    if (!(q_last > 1e-9) || q_last / q_first <= 0.8) return;
    double e1 = eps_[n - 2];
    double e2 = eps_[n - 1];
    double q1 = e1 * s.img[n - 2];
    double m = (q_last * e1 - q1 * e2) / (e1 - e2);
    if (m > 1e-8) atoms_.push_back({0.0, m});
  }

  // Atom candidates are bumps of y·Im G on the scan line, refined by zooming in.
  void find_atoms(const std::vector<Sample>& samples) {
    std::vector<double> q(kScanPoints + 1);
    for (int j = 0; j <= kScanPoints; ++j) q[j] = valid_[j] ? ys_ * Tracker::cauchy(scan_[j]).imag() : 0.0;
    auto at = [&](int j) { return q[std::min(std::abs(j), kScanPoints)]; };
    std::vector<int> cand;
    for (int j = 1; j < kScanPoints; ++j) {
      bool bump = at(j) >= at(j - 1) && at(j) >= at(j + 1) && at(j) - 0.5 * (at(j - 2) + at(j + 2)) > 1e-3;
      const Sample& s = samples[j];
      std::size_t n = s.img.size();
      bool sharp = n >= 2 && eps_[n - 1] * s.img[n - 1] > 1e-9 &&
                   eps_[n - 1] * s.img[n - 1] > 0.8 * eps_[0] * s.img[0];
      if (bump || sharp) cand.push_back(j);
    }
    std::vector<std::optional<Atom>> found(cand.size());
    parallel_for(cand.size(), threads_, [&](std::size_t i) { found[i] = refine_atom(cand[i]); });
    for (const auto& a : found) {
      if (!a) continue;
      bool dup = false;
      for (const Atom& b : atoms_)
        if (std::abs(b.x - a->x) < 1e-6 * std::max(1.0, std::abs(a->x))) dup = true;
      if (!dup) atoms_.push_back(*a);
    }
  }

  std::optional<Atom> refine_atom(int j) const {
    if (!valid_[j]) return std::nullopt;
    PathPoint anchor = scan_[j];
    double y = ys_;
    double q_prev = y * Tracker::cauchy(anchor).imag();
    double half = 0.5 * dx_;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (;;) {
      double yn = y / 8.0;
      double ratio = 0.5;
      if (!tracker_.descend(anchor, yn, ratio)) return std::nullopt;
      auto value = [&](double x, PathPoint& out) {
        out = anchor;
        if (!tracker_.slide(out, x)) return -1.0;
        return Tracker::cauchy(out).imag();
      };
      double a = anchor.x - half;
      double b = anchor.x + half;
      PathPoint pc, pd;
      double c = b - gr * (b - a);
      double d = a + gr * (b - a);
      double fc = value(c, pc);
      double fd = value(d, pd);
      while (b - a > 1e-3 * yn) {
        if (fc >= fd) {
          b = d;
          d = c;
          fd = fc;
          pd = pc;
          c = b - gr * (b - a);
          fc = value(c, pc);
        } else {
          a = c;
          c = d;
          fc = fd;
          pc = pd;
          d = a + gr * (b - a);
          fd = value(d, pd);
        }
      }
      if (fc < 0.0 && fd < 0.0) return std::nullopt;
      anchor = fc >= fd ? pc : pd;
      double q = yn * Tracker::cauchy(anchor).imag();
      if (q < 0.8 * q_prev) return std::nullopt;
      if (yn <= kAtomDepth * std::max(1.0, std::abs(anchor.x))) {
        double m = (8.0 * q - q_prev) / 7.0;
        if (!(m > 1e-8) || anchor.x <= 0.5 * dx_) return std::nullopt;
        return Atom{anchor.x, m};
      }
      q_prev = q;
      y = yn;
      half = 0.5 * y;
    }
  }

  double lorentz(double x, double e) const {
    double s = 0.0;
    for (const Atom& a : atoms_) {
      s += a.mass * e / (kPi * ((x - a.x) * (x - a.x) + e * e));
      if (a.x != 0.0) s += a.mass * e / (kPi * ((x + a.x) * (x + a.x) + e * e));
    }
    return s;
  }

  bool near_atom(double x) const {
    for (const Atom& a : atoms_)
      if (std::abs(std::abs(x) - a.x) < kAtomGuard * std::max(1.0, a.x)) return true;
    return false;
  }

  double density_from(const Sample& s, double x) const {
    if (s.img.size() < 2 || near_atom(x)) return kNaN;
    std::vector<double> v(s.img.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = s.img[k] / kPi - lorentz(x, eps_[k]);
    double f = extrapolate(eps_, v);
    return std::isfinite(f) ? std::max(f, 0.0) : kNaN;
  }

  double density_at(double x) const {
    if (near_atom(x)) return kNaN;
    int j = std::clamp(static_cast<int>(std::lround(x / dx_)), 0, kScanPoints);
    for (int k = 1; !valid_[j] && k <= kScanPoints; ++k) {
      if (j + k <= kScanPoints && valid_[j + k]) j += k;
      else if (j - k >= 0 && valid_[j - k]) j -= k;
    }
    return density_from(tracker_.sample(scan_[j], x, eps_), x);
  }

  // Linear interpolation over NaN entries; returns the number filled.
  template <class X>
  static std::size_t fill_gaps(std::vector<double>& f, X xs) {
    std::size_t filled = 0;
    std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isnan(f[i])) continue;
      std::size_t l = i;
      while (l > 0 && std::isnan(f[l - 1])) --l;
      std::size_t r = i;
      while (r < n && std::isnan(f[r])) ++r;
      bool has_l = l > 0;
      bool has_r = r < n;
      for (std::size_t k = i; k < r; ++k) {
        if (has_l && has_r) {
          double t = (xs(k) - xs(l - 1)) / (xs(r) - xs(l - 1));
          f[k] = (1.0 - t) * f[l - 1] + t * f[r];
        } else if (has_l) {
          f[k] = f[l - 1];
        } else if (has_r) {
          f[k] = f[r];
        } else {
          f[k] = 0.0;
        }
        ++filled;
      }
      i = r;
    }
    return filled;
  }

  double bisect_edge(double inside, double outside) const {
    for (int it = 0; it < 40; ++it) {
      double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      double f = density_at(mid);
      if (std::isnan(f)) break;
      (f > thr_ ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  }

  void build_density(const std::vector<double>& f, std::vector<double>& grid, std::vector<double>& dens) const {
    struct Interval {
      double a, b;
    };
    std::vector<Interval> runs;
    int j = 0;
    while (j <= kScanPoints) {
      if (!(f[j] > thr_)) {
        ++j;
        continue;
      }
      int js = j;
      while (j <= kScanPoints && f[j] > thr_) ++j;
      int je = j - 1;
      double a = js == 0 ? 0.0 : bisect_edge(js * dx_, (js - 1) * dx_);
      double b = bisect_edge(je * dx_, (je + 1) * dx_);
      runs.push_back({a, b});
    }

    int n = cfg_.n_points;
    std::vector<std::vector<double>> nodes;
    std::vector<char> centre;
    for (const auto& run : runs) {
      if (!(run.b > run.a)) continue;
      centre.push_back(run.a == 0.0);
      if (centre.back()) {
        auto full = graded_nodes(-run.b, run.b, 2 * n - 1);
        nodes.emplace_back(full.begin() + (n - 1), full.end());
        nodes.back().front() = 0.0;
      } else {
        nodes.push_back(graded_nodes(run.a, run.b, n));
      }
    }
    // Nodes closer to an edge than this sit inside the ε smoothing of the samples;
    // they are filled by the power law of the nearest reliable nodes instead.
    const double reach = kEdgeReach * eps_.front();
    std::vector<std::size_t> lo(nodes.size());
    std::vector<std::size_t> hi(nodes.size());
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      const auto& x = nodes[r];
      std::size_t last = x.size() - 1;
      lo[r] = centre[r] ? 0 : 1;
      if (!centre[r])
        while (lo[r] + 3 < last && x[lo[r]] - x[0] < reach) ++lo[r];
      hi[r] = last - 1;
      while (hi[r] > lo[r] + 2 && x[last] - x[hi[r]] < reach) --hi[r];
      for (std::size_t k = lo[r]; k <= hi[r]; ++k) jobs.emplace_back(r, k);
    }
    std::vector<std::vector<double>> vals(nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r) vals[r].assign(nodes[r].size(), 0.0);
    parallel_for(jobs.size(), threads_, [&](std::size_t i) {
      auto [r, k] = jobs[i];
      vals[r][k] = density_at(nodes[r][k]);
    });

    std::size_t failed = 0;
    std::vector<double> xs;
    std::vector<double> fs;
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      auto& x = nodes[r];
      auto& v = vals[r];
      std::size_t last = x.size() - 1;
      std::vector<double> inner(v.begin() + lo[r], v.begin() + hi[r] + 1);
      failed += fill_gaps(inner, [&](std::size_t k) { return x[k + lo[r]]; });
      std::copy(inner.begin(), inner.end(), v.begin() + lo[r]);
      EdgeModel right = EdgeModel::fit(x[last], x[hi[r]], v[hi[r]], x[hi[r] - 1], v[hi[r] - 1]);
      EdgeModel left = centre[r] ? EdgeModel{} : EdgeModel::fit(x[0], x[lo[r]], v[lo[r]], x[lo[r] + 1], v[lo[r] + 1]);
      for (std::size_t k = hi[r] + 1; k < last; ++k) v[k] = right(x[k]);
      for (std::size_t k = centre[r] ? 0 : 1; k < lo[r]; ++k) v[k] = left(x[k]);
      v[last] = edge_value(x[last], x[last - 1], v[last - 1], x[last - 2], v[last - 2]);
      if (!centre[r]) v[0] = edge_value(x[0], x[1], v[1], x[2], v[2]);
      curvature_correct(x, v, centre[r], left, right);
      // A nonzero edge value is a jump; a zero node just outside keeps the gap empty.
      if (!centre[r] && v[0] > 0.0) {
        double sliver = x[0] - 1e-12 * std::max(1.0, x[0]);
        if (sliver > 0.0 && (xs.empty() || sliver > xs.back())) {
          xs.push_back(sliver);
          fs.push_back(0.0);
        }
      }
      for (std::size_t k = 0; k <= last; ++k) {
        if (!xs.empty() && !(x[k] > xs.back())) continue;
        xs.push_back(x[k]);
        fs.push_back(v[k]);
      }
      if (v[last] > 0.0 && r + 1 < nodes.size()) {
        xs.push_back(x[last] + 1e-12 * std::max(1.0, x[last]));
        fs.push_back(0.0);
      }
    }
    std::size_t total = jobs.size();
    if (failed > total / 20)
      throw NumericalError("recovery failed at " + std::to_string(failed) + " of " + std::to_string(total) +
                           " density nodes");
    grid = mirror_nodes(xs);
    dens.clear();
    for (std::size_t k = xs.size(); k-- > 0;)
      if (xs[k] != 0.0) dens.push_back(fs[k]);
    dens.insert(dens.end(), fs.begin(), fs.end());
  }

  // Nodes graded like |x - edge|^(1/kGrading) toward both ends, so that inverse
  // square-root edges are resolved as well as square-root ones.
  static std::vector<double> graded_nodes(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
      double s = static_cast<double>(i) / (n - 1);
      double p = std::pow(s, kGrading);
      double q = std::pow(1.0 - s, kGrading);
      x[i] = a + (b - a) * p / (p + q);
    }
    x.front() = a;
    x.back() = b;
    return x;
  }

  // Shifts node values so the piecewise-linear interpolant keeps segment masses:
  // node k drops by (E_{k-1} + E_k)/(h_{k-1} + h_k), E_j being the trapezoid excess of
  // segment j. In the interior E_j = h_j³ f''/12; close to an edge, where the steps are
  // not small against the distance to it, E_j comes from the fitted edge power law.
  void curvature_correct(const std::vector<double>& x, std::vector<double>& v, bool centre, const EdgeModel& left,
                         const EdgeModel& right) const {
    const std::size_t n = x.size();
    if (n < 8) return;
    std::vector<double> out = v;
    for (std::size_t k = centre ? 0 : 1; k + 1 < n; ++k) {
      double xl = k == 0 ? -x[1] : x[k - 1];
      double fl = k == 0 ? v[1] : v[k - 1];
      if (near_atom(xl) || near_atom(x[k]) || near_atom(x[k + 1])) continue;
      double hl = x[k] - xl;
      double hr = x[k + 1] - x[k];
      double dl = centre ? kNaN : x[k] - x.front();
      double dr = x.back() - x[k];
      double dist = centre ? dr : std::min(dl, dr);
      if (std::max(hl, hr) <= kCurvatureStep * dist) {
        double d2 = 2.0 * ((v[k + 1] - v[k]) / hr - (v[k] - fl) / hl) / (hl + hr);
        out[k] = std::max(v[k] - hl * hr * d2 / 12.0, 0.0);
        continue;
      }
      const EdgeModel& m = (!centre && dl < dr) ? left : right;
      if (!m.valid) continue;
      double el = 0.5 * (m(xl) + m(x[k])) * hl - m.mass(xl, x[k]);
      double er = 0.5 * (m(x[k]) + m(x[k + 1])) * hr - m.mass(x[k], x[k + 1]);
      // The edge segment already has its exact mass through edge_value.
      if (k + 2 == n) er = 0.0;
      if (!centre && k == 1) el = 0.0;
      out[k] = std::max(v[k] - (el + er) / (hl + hr), 0.0);
    }
    v = std::move(out);
  }

  // Value at a support edge e that gives the last segment the mass of c|x - e|^p,
  // with p fitted to the two nearest nodes.
  static double edge_value(double e, double x1, double f1, double x2, double f2) {
    if (!(f1 > 0.0) || !(f2 > 0.0)) return 0.0;
    double d1 = std::abs(x1 - e);
    double d2 = std::abs(x2 - e);
    double p = std::clamp(std::log(f2 / f1) / std::log(d2 / d1), -0.9, 1.0);
    return f1 * (1.0 - p) / (1.0 + p);
  }

  Tracker tracker_;
  const ContourConfig& cfg_;
  const std::vector<double>& eps_;
  int threads_;
  double R_ = 0.0;
  double dx_ = 0.0;
  double ys_ = 0.0;
  double thr_ = 0.0;
  std::vector<PathPoint> scan_;
  std::vector<char> valid_;
  std::vector<Atom> atoms_;  // x >= 0; positive ones stand for the pair ±x
};

}  // namespace

SymmetricMeasure recover_measure(const RTransform& c, double lambda, const ContourConfig& cfg, double support_hint) {
  validate(cfg, lambda, support_hint);
  double R = support_hint;
  for (int attempt = 0; attempt <= 6; ++attempt, R *= 2.0) {
    Recovery rec(c, lambda, cfg);
    if (auto mu = rec.run(R, attempt == 6)) return *mu;
  }
  throw NumericalError("recovered support exceeds 64 times the support hint");
}

SymmetricMeasure recover_measure(const std::function<Complex(Complex)>& c, double lambda,
                                 const ContourConfig& cfg, double support_hint) {
  return recover_measure(*value_r_transform(c), lambda, cfg, support_hint);
}

}  // namespace rectfree
