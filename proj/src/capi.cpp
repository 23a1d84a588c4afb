#include "rectfree/rectfree.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "rectfree/convolution.hpp"
#include "rectfree/error.hpp"
#include "rectfree/infdiv.hpp"
#include "rectfree/io.hpp"
#include "rectfree/nc.hpp"
#include "rectfree/randmat.hpp"

struct rf_measure {
  rectfree::SymmetricMeasure value;
};

struct rf_levy {
  rectfree::LevyMeasure value;
};

namespace {

thread_local std::string last_error;

rf_status fail(rf_status code, const char* what) {
  last_error = what;
  return code;
}

template <class F>
rf_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return RF_OK;
  } catch (const rectfree::ValidationError& e) {
    return fail(RF_ERR_VALIDATION, e.what());
  } catch (const rectfree::NumericalError& e) {
    return fail(RF_ERR_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RF_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw rectfree::ValidationError(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rf_measure* wrap(rectfree::SymmetricMeasure m) { return new rf_measure{std::move(m)}; }

}  // namespace

extern "C" {

const char* rf_last_error(void) { return last_error.c_str(); }

void rf_string_free(char* s) { std::free(s); }

rf_status rf_measure_create(const double* atom_x, const double* atom_mass, size_t n_atoms, const double* grid,
                            const double* density, size_t n_grid, rf_measure** out) {
  return guarded([&] {
    require(out, "null output");
    require(n_atoms == 0 || (atom_x && atom_mass), "null atom arrays");
    require(n_grid == 0 || (grid && density), "null grid arrays");
    std::vector<rectfree::Atom> atoms;
    for (size_t i = 0; i < n_atoms; ++i) atoms.push_back({atom_x[i], atom_mass[i]});
    std::vector<double> g(grid, grid + n_grid);
    std::vector<double> f(density, density + n_grid);
    *out = wrap(rectfree::SymmetricMeasure(std::move(atoms), std::move(g), std::move(f)));
  });
}

rf_status rf_measure_from_json(const char* json, rf_measure** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = wrap(rectfree::symmetric_measure_from_json(json));
  });
}

rf_status rf_measure_to_json(const rf_measure* m, char** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = dup_string(rectfree::measure_json(m->value));
  });
}

rf_status rf_measure_density_csv(const rf_measure* m, char** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = dup_string(rectfree::density_csv(m->value));
  });
}

rf_status rf_measure_atoms_json(const rf_measure* m, char** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = dup_string(rectfree::atoms_json(m->value));
  });
}

rf_status rf_measure_moment(const rf_measure* m, int k, double* out) {
  return guarded([&] {
    require(m && out, "null argument");
    require(k >= 0, "moment order must be nonnegative");
    *out = m->value.moment(k);
  });
}

rf_status rf_measure_density_at(const rf_measure* m, double x, double* out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = m->value.density_at(x);
  });
}

rf_status rf_measure_support_radius(const rf_measure* m, double* out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = m->value.support_radius();
  });
}

void rf_measure_free(rf_measure* m) { delete m; }

rf_status rf_dirac_zero(rf_measure** out) {
  return guarded([&] {
    require(out, "null output");
    *out = wrap(rectfree::dirac_zero());
  });
}

rf_status rf_symmetric_bernoulli(rf_measure** out) {
  return guarded([&] {
    require(out, "null output");
    *out = wrap(rectfree::symmetric_bernoulli());
  });
}

rf_status rf_law(rf_law_kind kind, double lambda, double param, rf_measure** out) {
  return guarded([&] {
    require(out, "null output");
    switch (kind) {
      case RF_LAW_RECT_GAUSSIAN:
        *out = wrap(rectfree::rect_gaussian(lambda));
        return;
      case RF_LAW_RECT_CAUCHY:
        *out = wrap(rectfree::rect_cauchy(lambda, param));
        return;
      case RF_LAW_RECT_POISSON:
        *out = wrap(rectfree::rect_poisson(lambda, param));
        return;
    }
    throw rectfree::ValidationError("unknown law");
  });
}

rf_status rf_marchenko_pastur(double c, char** density_csv, char** atoms_json) {
  return guarded([&] {
    require(density_csv && atoms_json, "null output");
    rectfree::NonnegativeMeasure mp = rectfree::marchenko_pastur(c);
    std::string csv = rectfree::density_csv(mp);
    std::string atoms = rectfree::atoms_json(mp);
    *density_csv = dup_string(csv);
    try {
      *atoms_json = dup_string(atoms);
    } catch (...) {
      std::free(*density_csv);
      *density_csv = nullptr;
      throw;
    }
  });
}

rf_status rf_rect_r_transform(const rf_measure* m, double lambda, double re, double im, double* out_re,
                              double* out_im) {
  return guarded([&] {
    require(m && out_re && out_im, "null argument");
    rectfree::Complex c = rectfree::rect_r_transform(m->value, lambda, {re, im});
    *out_re = c.real();
    *out_im = c.imag();
  });
}

rf_status rf_convolve(const rf_measure* mu, const rf_measure* nu, double lambda, rf_measure** out) {
  return guarded([&] {
    require(mu && nu && out, "null argument");
    *out = wrap(rectfree::rect_convolve(mu->value, nu->value, lambda));
  });
}

rf_status rf_convolve_power(const rf_measure* mu, double lambda, int k, rf_measure** out) {
  return guarded([&] {
    require(mu && out, "null argument");
    *out = wrap(rectfree::rect_convolve_power(mu->value, lambda, k));
  });
}

rf_status rf_levy_from_json(const char* json, rf_levy** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new rf_levy{rectfree::levy_measure_from_json(json)};
  });
}

rf_status rf_levy_to_json(const rf_levy* g, char** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = dup_string(rectfree::measure_json(g->value));
  });
}

void rf_levy_free(rf_levy* g) { delete g; }

rf_status rf_bercovici_pata(const rf_levy* g, double lambda, rf_measure** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = wrap(rectfree::bercovici_pata(g->value, lambda));
  });
}

rf_status rf_nc_table(rf_nc_op op, int n, double param, char** csv) {
  return guarded([&] {
    require(csv, "null output");
    namespace nc = rectfree::nc;
    switch (op) {
      case RF_NC_PARTITIONS:
        require(n >= 1 && n <= 16, "n must lie in [1, 16]");
        *csv = dup_string(nc::partitions_csv(nc::enumerate_nc(n)));
        return;
      case RF_NC_PAIRINGS:
        require(n >= 2 && n <= 24 && n % 2 == 0, "n must be even and in [2, 24]");
        *csv = dup_string(nc::partitions_csv(nc::enumerate_nc_pairings(n)));
        return;
      case RF_NC_MP_MOMENTS: {
        require(n >= 1 && n <= 12, "n must lie in [1, 12]");
        std::ostringstream s;
        s.precision(17);
        s << "k,moment\n";
        for (int k = 1; k <= n; ++k) s << k << ',' << nc::mp_moment(param, k) << '\n';
        *csv = dup_string(s.str());
        return;
      }
    }
    throw rectfree::ValidationError("unknown nc operation");
  });
}

void rf_mc_config_init(rf_mc_config* cfg) {
  if (!cfg) return;
  cfg->kind = RF_MC_GAUSSIAN;
  cfg->d = 1;
  cfg->dprime = 1;
  cfg->lambda_target = std::numeric_limits<double>::quiet_NaN();
  cfg->trials = 1;
  cfg->seed = 0;
  cfg->c = 1.0;
  cfg->summands = 1;
}

rf_status rf_mc_run(const rf_mc_config* cfg, const rf_measure* nu, const rf_measure* target, int kmax, int threads,
                    char** report_json, char** singular_csv) {
  return guarded([&] {
    require(cfg && target && report_json, "null argument");
    rectfree::EnsembleConfig e;
    switch (cfg->kind) {
      case RF_MC_GAUSSIAN: e.kind = rectfree::EnsembleConfig::Kind::Gaussian; break;
      case RF_MC_BIINVARIANT: e.kind = rectfree::EnsembleConfig::Kind::BiInvariant; break;
      case RF_MC_COMPOUND_POISSON: e.kind = rectfree::EnsembleConfig::Kind::CompoundPoisson; break;
      case RF_MC_RANK_ONE_POISSON: e.kind = rectfree::EnsembleConfig::Kind::RankOnePoisson; break;
      default: throw rectfree::ValidationError("unknown ensemble kind");
    }
    e.d = cfg->d;
    e.dprime = cfg->dprime;
    e.lambda_target = cfg->lambda_target;
    e.trials = cfg->trials;
    e.seed = cfg->seed;
    e.c = cfg->c;
    e.summands = cfg->summands;
    if (nu) e.nu = std::make_shared<rectfree::SymmetricMeasure>(nu->value);
    e.keep_singular_values = singular_csv != nullptr;
    rectfree::MCReport r = rectfree::mc_compare(e, target->value, kmax, threads);
    std::string json = rectfree::mc_report_json(r);
    std::string csv = singular_csv ? rectfree::singular_values_csv(r) : std::string();
    *report_json = dup_string(json);
    if (singular_csv) {
      try {
        *singular_csv = dup_string(csv);
      } catch (...) {
        std::free(*report_json);
        *report_json = nullptr;
        throw;
      }
    }
  });
}

}  // extern "C"
