#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rectfree/measures.hpp"

namespace rectfree {

// d × d' complex matrix, d <= d'.
using RectMatrix = Eigen::MatrixXcd;

// One random stream. Streams for distinct (seed, index) pairs are independent,
// so trial t always sees the same numbers whatever thread runs it.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t index);

  // Uniform on [0, 1).
  double uniform();
  // Box-Muller pair of standard normals as one complex number.
  Complex normal_pair();
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF sampler for a symmetric measure (atoms plus piecewise-linear density).
class MeasureSampler {
 public:
  explicit MeasureSampler(const SymmetricMeasure& mu);
  double operator()(Rng& rng) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> grid_;
  std::vector<double> density_;
  // Cumulative mass: atoms first, then density segments.
  std::vector<double> cdf_;
};

RectMatrix haar_unitary(int d, Rng& rng);
// U diag(X_i) V with X_i i.i.d. from the sampler, U, V Haar.
RectMatrix sample_biinvariant(const MeasureSampler& nu, int d, int dprime, Rng& rng);
// Entries with independent N(0, 1/(2d')) real and imaginary parts.
RectMatrix sample_gaussian_rect(int d, int dprime, Rng& rng);
// Uniform unit vector in C^d.
Eigen::VectorXcd sample_unit_vector(int d, Rng& rng);
// Σ_{k < d''} u_k v_k* with uniform unit vectors; d'' = count if count >= 0, else Poisson(c d).
RectMatrix sample_rank_one_poisson(double c, int d, int dprime, long count, Rng& rng);

struct JacobiConfig {
  double tolerance = 1e-12;  // off-diagonal Frobenius norm relative to ‖MM*‖_F
  int max_sweeps = 60;
};

// Eigenvalues of a Hermitian matrix by cyclic Jacobi, ascending.
std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a, const JacobiConfig& cfg = {});
// Square roots of the eigenvalues of MM*, ascending.
std::vector<double> singular_values(const RectMatrix& m, const JacobiConfig& cfg = {});
// (1/d) Σ s_i^{2j} for j = 1..kmax/2.
std::vector<double> empirical_symmetrized_moments(const std::vector<double>& singular, int kmax);
std::vector<double> empirical_symmetrized_moments(const RectMatrix& m, int kmax);

struct EnsembleConfig {
  enum class Kind { Gaussian, BiInvariant, CompoundPoisson, RankOnePoisson };
  int d = 1;
  int dprime = 1;
  // NaN means d/d'. Otherwise d/d' must be within lambda_tolerance of it.
  double lambda_target = std::numeric_limits<double>::quiet_NaN();
  double lambda_tolerance = 0.05;
  int trials = 1;
  std::uint64_t seed = 0;
  Kind kind = Kind::Gaussian;
  // BiInvariant: law of the diagonal entries.
  std::shared_ptr<const SymmetricMeasure> nu;
  // CompoundPoisson draws d'' ~ Poisson(c d); RankOnePoisson uses d'' = floor(c d).
  double c = 1.0;
  // Number of independent matrices summed per trial.
  int summands = 1;
  // Keep the singular values of every trial in the report.
  bool keep_singular_values = false;
};

struct MomentStat {
  int order = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double zscore = 0.0;  // NaN when the standard error vanishes and mean != target
};

struct MCReport {
  EnsembleConfig config;
  int kmax = 0;
  std::vector<MomentStat> moments;
  std::vector<std::vector<double>> singular_values;  // per trial, if kept
};

void validate(const EnsembleConfig& cfg);
// One trial's matrix; depends only on (seed, trial).
RectMatrix sample_trial(const EnsembleConfig& cfg, std::uint64_t trial);
// Runs the trials on up to `threads` workers (0: hardware concurrency, capped by RECTFREE_THREADS).
MCReport mc_compare(const EnsembleConfig& cfg, const SymmetricMeasure& target, int kmax, int threads = 0);

std::string kind_name(EnsembleConfig::Kind kind);
std::string mc_report_json(const MCReport& report);
std::string singular_values_csv(const MCReport& report);

}  // namespace rectfree
