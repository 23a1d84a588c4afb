#include "rectfree/randmat.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rectfree/error.hpp"
#include "rectfree/transforms.hpp"

namespace rectfree {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_dims(int d, int dprime) {
  if (d < 1 || dprime < d) throw ValidationError("dimensions must satisfy 1 <= d <= d'");
}

// Pairwise summation keeps the result independent of how trials were scheduled
// and accurate for long runs.
double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= index * 0xD1B54A32D192ED03ULL;
  std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Complex Rng::normal_pair() {
  double u1 = 1.0 - uniform();  // (0, 1]
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ValidationError("Poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

MeasureSampler::MeasureSampler(const SymmetricMeasure& mu)
    : atoms_(mu.atoms()), grid_(mu.grid()), density_(mu.density()) {
  double acc = 0.0;
  for (const Atom& a : atoms_) cdf_.push_back(acc += a.mass);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    cdf_.push_back(acc += 0.5 * (density_[i] + density_[i + 1]) * (grid_[i + 1] - grid_[i]));
  if (!(acc > 0.0)) throw ValidationError("cannot sample a measure with no mass");
}

double MeasureSampler::operator()(Rng& rng) const {
  double r = rng.uniform() * cdf_.back();
  std::size_t k = std::upper_bound(cdf_.begin(), cdf_.end(), r) - cdf_.begin();
  k = std::min(k, cdf_.size() - 1);
  if (k < atoms_.size()) return atoms_[k].x;
  std::size_t i = k - atoms_.size();
  double rem = r - (k > 0 ? cdf_[k - 1] : 0.0);
  double h = grid_[i + 1] - grid_[i];
  double f0 = density_[i];
  double slope = (density_[i + 1] - f0) / h;
  // Solve f0 s + slope s²/2 = rem for s in [0, h].
  double disc = std::max(0.0, f0 * f0 + 2.0 * slope * rem);
  double denom = f0 + std::sqrt(disc);
  double s = denom > 0.0 ? 2.0 * rem / denom : 0.0;
  return grid_[i] + std::clamp(s, 0.0, h);
}

RectMatrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw ValidationError("dimension must be positive");
  Eigen::MatrixXcd g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal_pair() * std::sqrt(0.5);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  // Without the phase correction Q is not Haar distributed.
  for (int j = 0; j < d; ++j) {
    Complex rjj = r(j, j);
    double mod = std::abs(rjj);
    if (mod > 0.0) q.col(j) *= rjj / mod;
  }
  return q;
}

RectMatrix sample_biinvariant(const MeasureSampler& nu, int d, int dprime, Rng& rng) {
  check_dims(d, dprime);
  Eigen::VectorXcd x(d);
  for (int i = 0; i < d; ++i) x(i) = nu(rng);
  RectMatrix u = haar_unitary(d, rng);
  RectMatrix v = haar_unitary(dprime, rng);
  return u * (x.asDiagonal() * v.topRows(d));
}

RectMatrix sample_gaussian_rect(int d, int dprime, Rng& rng) {
  check_dims(d, dprime);
  double sd = std::sqrt(1.0 / (2.0 * dprime));
  RectMatrix m(d, dprime);
  for (int j = 0; j < dprime; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = rng.normal_pair() * sd;
  return m;
}

Eigen::VectorXcd sample_unit_vector(int d, Rng& rng) {
  if (d < 1) throw ValidationError("dimension must be positive");
  Eigen::VectorXcd v(d);
  double norm = 0.0;
  while (!(norm > 0.0)) {
    for (int i = 0; i < d; ++i) v(i) = rng.normal_pair();
    norm = v.norm();
  }
  return v / norm;
}

RectMatrix sample_rank_one_poisson(double c, int d, int dprime, long count, Rng& rng) {
  check_dims(d, dprime);
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("c must be positive");
  std::uint64_t n = count >= 0 ? static_cast<std::uint64_t>(count) : rng.poisson(c * d);
  RectMatrix m = RectMatrix::Zero(d, dprime);
  if (n == 0) return m;
  Eigen::MatrixXcd u(d, n);
  Eigen::MatrixXcd v(dprime, n);
  for (std::uint64_t k = 0; k < n; ++k) {
    u.col(k) = sample_unit_vector(d, rng);
    v.col(k) = sample_unit_vector(dprime, rng);
  }
  m.noalias() = u * v.adjoint();
  return m;
}

std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a, const JacobiConfig& cfg) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw ValidationError("matrix must be square");
  double scale = a.norm();
  std::vector<double> out(n);
  if (scale == 0.0) return out;
  auto off_norm = [&] {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
  };
  bool converged = false;
  for (int sweep = 0; sweep <= cfg.max_sweeps; ++sweep) {
    if (off_norm() < cfg.tolerance * scale) {
      converged = true;
      break;
    }
    if (sweep == cfg.max_sweeps) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        Complex apq = a(p, q);
        double mod = std::abs(apq);
        if (mod == 0.0) continue;
        Complex e = apq / mod;
        double app = a(p, p).real();
        double aqq = a(q, q).real();
        double theta = (aqq - app) / (2.0 * mod);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        // A <- J* A J with J = [[c, s], [-s ē, c ē]] on (p, q).
        for (int k = 0; k < n; ++k) {
          Complex akp = a(k, p);
          Complex akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(e) * akq;
          a(k, q) = s * akp + c * std::conj(e) * akq;
        }
        for (int k = 0; k < n; ++k) {
          Complex apk = a(p, k);
          Complex aqk = a(q, k);
          a(p, k) = c * apk - s * e * aqk;
          a(q, k) = s * apk + c * e * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * mod;
        a(q, q) = aqq + t * mod;
      }
    }
  }
  if (!converged) throw NumericalError("Jacobi eigenvalue iteration did not converge");
  for (int i = 0; i < n; ++i) out[i] = a(i, i).real();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> singular_values(const RectMatrix& m, const JacobiConfig& cfg) {
  if (m.rows() < 1 || m.cols() < m.rows()) throw ValidationError("matrix must be d x d' with 1 <= d <= d'");
  Eigen::MatrixXcd mm = m * m.adjoint();
  std::vector<double> ev = hermitian_eigenvalues(mm, cfg);
  for (double& x : ev) x = std::sqrt(std::max(x, 0.0));
  return ev;
}

std::vector<double> empirical_symmetrized_moments(const std::vector<double>& singular, int kmax) {
  if (kmax < 2 || kmax % 2 != 0 || kmax > 12) throw ValidationError("kmax must be even and in [2, 12]");
  if (singular.empty()) throw ValidationError("no singular values");
  std::vector<double> out;
  std::vector<double> terms(singular.size());
  for (int j = 1; j <= kmax / 2; ++j) {
    for (std::size_t i = 0; i < singular.size(); ++i) terms[i] = std::pow(singular[i] * singular[i], j);
    out.push_back(pairwise_sum(terms.data(), terms.size()) / static_cast<double>(singular.size()));
  }
  return out;
}

std::vector<double> empirical_symmetrized_moments(const RectMatrix& m, int kmax) {
  return empirical_symmetrized_moments(singular_values(m), kmax);
}

void validate(const EnsembleConfig& cfg) {
  check_dims(cfg.d, cfg.dprime);
  if (cfg.trials < 1) throw ValidationError("trials must be positive");
  if (cfg.summands < 1) throw ValidationError("summands must be positive");
  if (!std::isnan(cfg.lambda_target)) {
    double ratio = static_cast<double>(cfg.d) / cfg.dprime;
    if (!(std::abs(ratio - cfg.lambda_target) <= cfg.lambda_tolerance))
      throw ValidationError("d/d' is not within tolerance of the target ratio");
  }
  switch (cfg.kind) {
    case EnsembleConfig::Kind::Gaussian:
      break;
    case EnsembleConfig::Kind::BiInvariant:
      if (!cfg.nu) throw ValidationError("bi-invariant ensemble needs a diagonal law");
      break;
    case EnsembleConfig::Kind::CompoundPoisson:
    case EnsembleConfig::Kind::RankOnePoisson:
      if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) throw ValidationError("c must be positive");
      break;
  }
}

namespace {

RectMatrix sample_one(const EnsembleConfig& cfg, const MeasureSampler* sampler, Rng& rng) {
  switch (cfg.kind) {
    case EnsembleConfig::Kind::Gaussian:
      return sample_gaussian_rect(cfg.d, cfg.dprime, rng);
    case EnsembleConfig::Kind::BiInvariant:
      return sample_biinvariant(*sampler, cfg.d, cfg.dprime, rng);
    case EnsembleConfig::Kind::CompoundPoisson:
      return sample_rank_one_poisson(cfg.c, cfg.d, cfg.dprime, -1, rng);
    case EnsembleConfig::Kind::RankOnePoisson:
      return sample_rank_one_poisson(cfg.c, cfg.d, cfg.dprime, static_cast<long>(std::floor(cfg.c * cfg.d)),
                                     rng);
  }
  return {};
}

RectMatrix sample_trial_with(const EnsembleConfig& cfg, const MeasureSampler* sampler, std::uint64_t trial) {
  Rng rng(cfg.seed, trial);
  RectMatrix m = sample_one(cfg, sampler, rng);
  for (int s = 1; s < cfg.summands; ++s) m += sample_one(cfg, sampler, rng);
  return m;
}

}  // namespace

RectMatrix sample_trial(const EnsembleConfig& cfg, std::uint64_t trial) {
  validate(cfg);
  std::unique_ptr<MeasureSampler> sampler;
  if (cfg.nu) sampler = std::make_unique<MeasureSampler>(*cfg.nu);
  return sample_trial_with(cfg, sampler.get(), trial);
}

MCReport mc_compare(const EnsembleConfig& cfg, const SymmetricMeasure& target, int kmax, int threads) {
  validate(cfg);
  if (kmax < 2 || kmax % 2 != 0 || kmax > 12) throw ValidationError("kmax must be even and in [2, 12]");
  std::unique_ptr<MeasureSampler> sampler;
  if (cfg.nu) sampler = std::make_unique<MeasureSampler>(*cfg.nu);

  const int n = cfg.trials;
  const int orders = kmax / 2;
  std::vector<std::vector<double>> moments(n);
  std::vector<std::vector<double>> svals(n);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int t = next++; t < n; t = next++) {
      try {
        std::vector<double> s = singular_values(sample_trial_with(cfg, sampler.get(), t));
        moments[t] = empirical_symmetrized_moments(s, kmax);
        if (cfg.keep_singular_values) svals[t] = std::move(s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  int workers = std::min(resolve_threads(threads), n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MCReport report;
  report.config = cfg;
  report.kmax = kmax;
  std::vector<double> column(n);
  for (int j = 0; j < orders; ++j) {
    MomentStat st;
    st.order = 2 * (j + 1);
    for (int t = 0; t < n; ++t) column[t] = moments[t][j];
    st.mean = pairwise_sum(column.data(), n) / n;
    if (n > 1) {
      for (int t = 0; t < n; ++t) column[t] = (moments[t][j] - st.mean) * (moments[t][j] - st.mean);
      st.std_error = std::sqrt(pairwise_sum(column.data(), n) / (n - 1) / n);
    }
    st.target = target.moment(st.order);
    double diff = st.mean - st.target;
    if (st.std_error > 0.0) st.zscore = diff / st.std_error;
    else st.zscore = diff == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    report.moments.push_back(st);
  }
  if (cfg.keep_singular_values) report.singular_values = std::move(svals);
  return report;
}

std::string kind_name(EnsembleConfig::Kind kind) {
  switch (kind) {
    case EnsembleConfig::Kind::Gaussian: return "gaussian";
    case EnsembleConfig::Kind::BiInvariant: return "biinv";
    case EnsembleConfig::Kind::CompoundPoisson: return "compound";
    case EnsembleConfig::Kind::RankOnePoisson: return "rank1";
  }
  return "";
}

std::string mc_report_json(const MCReport& report) {
  using nlohmann::ordered_json;
  const EnsembleConfig& c = report.config;
  auto num = [](double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); };
  ordered_json config = {{"kind", kind_name(c.kind)},
                         {"d", c.d},
                         {"dprime", c.dprime},
                         {"ratio", static_cast<double>(c.d) / c.dprime},
                         {"lambda_target", num(c.lambda_target)},
                         {"trials", c.trials},
                         {"seed", c.seed},
                         {"summands", c.summands}};
  if (c.kind == EnsembleConfig::Kind::CompoundPoisson || c.kind == EnsembleConfig::Kind::RankOnePoisson)
    config["c"] = c.c;
  ordered_json moments = ordered_json::array();
  for (const MomentStat& st : report.moments)
    moments.push_back({{"order", st.order},
                       {"mean", num(st.mean)},
                       {"stderr", num(st.std_error)},
                       {"target", num(st.target)},
                       {"zscore", num(st.zscore)}});
  ordered_json out = {{"config", config}, {"moments", moments}};
  return out.dump(2) + "\n";
}

std::string singular_values_csv(const MCReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "trial,index,singular_value\n";
  for (std::size_t t = 0; t < report.singular_values.size(); ++t)
    for (std::size_t i = 0; i < report.singular_values[t].size(); ++i)
      out << t << ',' << i << ',' << report.singular_values[t][i] << '\n';
  return out.str();
}

}  // namespace rectfree
