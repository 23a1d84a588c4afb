#pragma once

// Independent reference computations used by the tests.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 50) {
  auto rec = [&](auto&& self, double a0, double b0, double fa, double fm, double fb, double whole, double eps,
                 int d) -> double {
    double m = 0.5 * (a0 + b0);
    double lm = 0.5 * (a0 + m);
    double rm = 0.5 * (m + b0);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a0) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b0 - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (d <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return self(self, a0, m, fa, flm, fm, left, 0.5 * eps, d - 1) +
           self(self, m, b0, fm, frm, fb, right, 0.5 * eps, d - 1);
  };
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(rec, a, b, fa, fm, fb, whole, tol, depth);
}

// ∫_a^b f over [a, b] where f has square-root behaviour at both ends: substitute x = mid - half cos θ.
inline double edge_integral(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  return simpson([&](double th) { return f(mid - half * std::cos(th)) * half * std::sin(th); }, 0.0,
                 std::numbers::pi, tol);
}

inline double semicircle_density(double x, double radius = 2.0) {
  double r2 = radius * radius;
  return x * x < r2 ? 2.0 / (std::numbers::pi * r2) * std::sqrt(r2 - x * x) : 0.0;
}

// Catalan number C_n.
inline double catalan(int n) {
  double c = 1.0;
  for (int k = 0; k < n; ++k) c = c * 2.0 * (2.0 * k + 1.0) / (k + 2.0);
  return c;
}

// Brute-force crossing test on block labels.
inline bool crosses(const std::vector<int>& label) {
  int n = static_cast<int>(label.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d)
          if (label[a] == label[c] && label[b] == label[d] && label[a] != label[b]) return true;
  return false;
}

// Free moments from free cumulants via the recursion m_n = Σ_{s=1}^{n} κ_s Σ_{i1+..+is = n-s} m_{i1}..m_{is}.
inline std::vector<double> free_moments(const std::vector<double>& kappa, int nmax) {
  std::vector<double> m(nmax + 1, 0.0);
  m[0] = 1.0;
  for (int n = 1; n <= nmax; ++n) {
    double total = 0.0;
    for (int s = 1; s <= n && s <= static_cast<int>(kappa.size()); ++s) {
      // conv[j] = Σ over compositions of j into s nonnegative parts of Π m
      std::vector<double> conv(n - s + 1, 0.0);
      conv[0] = 1.0;
      for (int part = 0; part < s; ++part) {
        std::vector<double> next(n - s + 1, 0.0);
        for (int j = 0; j <= n - s; ++j)
          for (int i = 0; i + j <= n - s; ++i) next[i + j] += conv[j] * m[i];
        conv = next;
      }
      total += kappa[s - 1] * conv[n - s];
    }
    m[n] = total;
  }
  return m;
}

// Free cumulants from moments (inverse of free_moments).
inline std::vector<double> free_cumulants(const std::vector<double>& moments, int nmax) {
  std::vector<double> kappa(nmax, 0.0);
  for (int n = 1; n <= nmax; ++n) {
    kappa[n - 1] = 0.0;
    std::vector<double> m = free_moments(kappa, n);
    kappa[n - 1] = moments[n] - m[n];
  }
  return kappa;
}

}  // namespace oracle
