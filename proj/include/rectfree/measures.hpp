#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace rectfree {

using Complex = std::complex<double>;

struct Atom {
  double x = 0.0;
  double mass = 0.0;
};

// Value and first derivative of an analytic function at a point.
struct Jet {
  Complex value;
  Complex derivative;
};

// Finite positive measure: atoms plus a continuous piecewise-linear density.
// The density is zero outside [grid.front(), grid.back()].
class GriddedMeasure {
 public:
  GriddedMeasure() = default;
  GriddedMeasure(std::vector<Atom> atoms, std::vector<double> grid, std::vector<double> density);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& density() const noexcept { return density_; }

  double mass() const;
  double atom_mass() const;
  double raw_moment(int k) const;
  // Largest |x| carrying mass.
  double support_radius() const noexcept { return radius_; }
  double density_at(double x) const;
  // Integral of f against the measure, exact for polynomials of degree <= 8 on each segment.
  double integrate(const std::function<double(double)>& f) const;

  // G(z) = ∫ dμ(t)/(z - t) with G'(z); z must avoid the support.
  Jet cauchy(Complex z) const;
  // ∫ dμ(t)/(1 - a t²) with its a-derivative.
  Jet reduced(Complex a) const;

 protected:
  bool symmetric_ = false;

 private:
  void build_far_field();
  Jet cauchy_near(Complex z) const;

  std::vector<Atom> atoms_;
  std::vector<double> grid_;
  std::vector<double> density_;
  double radius_ = 0.0;
  // ∫ (t / radius)^k dμ for k < kFarTerms.
  std::vector<double> scaled_moments_;
  // Tree over runs of segments with expansions ∫ ((t - centre)/half)^k f(t) dt.
  // Leaves own segments [begin, end); inner nodes own children [begin, end).
  struct Block {
    std::size_t begin = 0;
    std::size_t end = 0;
    double centre = 0.0;
    double half = 0.0;
    bool empty = true;
    bool leaf = true;
  };
  void build_blocks();
  std::vector<Block> blocks_;
  std::vector<double> block_moments_;
  std::vector<std::size_t> block_roots_;
};

// Symmetric probability measure.
class SymmetricMeasure : public GriddedMeasure {
 public:
  SymmetricMeasure();  // δ0
  // Strict: symmetric within 1e-12 and total mass 1 within 1e-9.
  SymmetricMeasure(std::vector<Atom> atoms, std::vector<double> grid, std::vector<double> density);
  // Averages x and -x, merges atoms and rescales a mass drift of at most `drift`.
  static SymmetricMeasure normalized(std::vector<Atom> atoms, std::vector<double> grid,
                                     std::vector<double> density, double drift = 1e-6);

  // Odd k gives exactly 0, k = 0 gives exactly 1.
  double moment(int k) const;

 private:
  struct Trusted {};
  SymmetricMeasure(Trusted, GriddedMeasure base);
};

// Symmetric finite positive measure (any total mass).
class LevyMeasure : public GriddedMeasure {
 public:
  LevyMeasure() = default;
  LevyMeasure(std::vector<Atom> atoms, std::vector<double> grid, std::vector<double> density);
  static LevyMeasure symmetrized(std::vector<Atom> atoms, std::vector<double> grid,
                                 std::vector<double> density);
  explicit LevyMeasure(const SymmetricMeasure& mu);

  double moment(int k) const;

 private:
  struct Trusted {};
  LevyMeasure(Trusted, GriddedMeasure base);
};

// Finite measure on [0, inf), stored through its symmetric square-root lift:
// ∫ f(s) dρ(s) = ∫ f(x²) dlift(x). The lift makes pushforward_square and
// symmetrize_sqrt exact inverses.
class HalfLineMeasure {
 public:
  HalfLineMeasure() = default;
  explicit HalfLineMeasure(LevyMeasure lift) : lift_(std::move(lift)) {}
  // Builds from s-coordinates; a positive density at an interior left end is kept as a jump.
  static HalfLineMeasure from_half_line(std::vector<Atom> atoms, std::vector<double> grid,
                                        std::vector<double> density);

  const LevyMeasure& lift() const noexcept { return lift_; }
  double mass() const { return lift_.mass(); }
  double moment(int k) const;
  double integrate(const std::function<double(double)>& f) const;

  // Representation in s-coordinates (for output). The density at s = 0 is the finite
  // value preserving the mass of the first segment when the true density is singular.
  std::vector<Atom> atoms() const;
  std::vector<double> grid() const;
  std::vector<double> density() const;

 private:
  LevyMeasure lift_;
};

// Probability measure on [0, inf).
class NonnegativeMeasure : public HalfLineMeasure {
 public:
  NonnegativeMeasure();  // δ0
  explicit NonnegativeMeasure(const SymmetricMeasure& lift);
  static NonnegativeMeasure from_half_line(std::vector<Atom> atoms, std::vector<double> grid,
                                           std::vector<double> density, double drift = 1e-6);
};

NonnegativeMeasure pushforward_square(const SymmetricMeasure& mu);
HalfLineMeasure pushforward_square(const LevyMeasure& g);
SymmetricMeasure symmetrize_sqrt(const NonnegativeMeasure& rho);
SymmetricMeasure dilate(const SymmetricMeasure& mu, double c);

SymmetricMeasure dirac_zero();
SymmetricMeasure symmetric_bernoulli();

// Node layouts for closed-form densities.
// Both ends clustered (square-root edges at a and b).
std::vector<double> clustered_nodes(double a, double b, int n);
// Clustered at b only.
std::vector<double> right_clustered_nodes(double a, double b, int n);
// Symmetric grid built from positive nodes; prepends their mirror images.
std::vector<double> mirror_nodes(const std::vector<double>& positive);

}  // namespace rectfree
