// rectfree command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rectfree/rectfree.h"

namespace {

// Carries a status code out of the command handlers.
struct Failure {
  int code;
  std::string message;
};

int exit_code(rf_status s) { return s == RF_ERR_VALIDATION ? 1 : 2; }

void check(rf_status s) {
  if (s != RF_OK) throw Failure{exit_code(s), rf_last_error()};
}

struct MeasureDeleter {
  void operator()(rf_measure* m) const { rf_measure_free(m); }
};
struct LevyDeleter {
  void operator()(rf_levy* g) const { rf_levy_free(g); }
};
struct StringDeleter {
  void operator()(char* s) const { rf_string_free(s); }
};
using Measure = std::unique_ptr<rf_measure, MeasureDeleter>;
using Levy = std::unique_ptr<rf_levy, LevyDeleter>;
using String = std::unique_ptr<char, StringDeleter>;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{1, "cannot open " + path};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{1, "cannot write " + path};
}

Measure load_measure(const std::string& path) {
  rf_measure* m = nullptr;
  check(rf_measure_from_json(read_text(path).c_str(), &m));
  return Measure(m);
}

String take(char* s) { return String(s); }

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Failure{1, "--lambda must lie in [0, 1]"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rectangular free convolution toolkit"};
  app.require_subcommand(1);

  std::string mu_path, nu_path, out_path, levy_path, target_path, atoms_path, sv_path;
  double lambda = 0.5;
  double param = 1.0;
  int power = 1;

  auto* convolve = app.add_subcommand("convolve", "Rectangular free convolution of two laws (JSON)");
  convolve->add_option("--mu", mu_path, "First law")->required()->check(CLI::ExistingFile);
  convolve->add_option("--nu", nu_path, "Second law (omit with --power)")->check(CLI::ExistingFile);
  convolve->add_option("--lambda", lambda, "Ratio in [0, 1]")->required();
  convolve->add_option("--power", power, "k-fold convolution power of --mu instead")->check(CLI::PositiveNumber);
  convolve->add_option("--out", out_path, "Output JSON (default stdout)");

  std::string law_name;
  std::map<std::string, int> law_map{{"rect-gaussian", 0}, {"rect-cauchy", 1}, {"rect-poisson", 2}, {"mp", 3}};
  auto* law = app.add_subcommand("law", "Density table of a named law");
  law->add_option("name", law_name, "rect-gaussian | rect-cauchy | rect-poisson | mp")
      ->required()
      ->check(CLI::IsMember({"rect-gaussian", "rect-cauchy", "rect-poisson", "mp"}));
  law->add_option("--lambda", lambda, "Ratio in [0, 1]");
  law->add_option("--param", param, "t for rect-cauchy, c for rect-poisson and mp");
  law->add_option("--out", out_path, "Output CSV (default stdout)");
  law->add_option("--atoms", atoms_path, "Write the atom list (JSON) here");
  law->add_option("--json", mu_path, "Also write the full law (JSON) here");

  auto* infdiv = app.add_subcommand("infdiv", "Rectangular infinitely divisible law of a Lévy measure");
  infdiv->add_option("--levy", levy_path, "Lévy measure JSON")->required()->check(CLI::ExistingFile);
  infdiv->add_option("--lambda", lambda, "Ratio in [0, 1]")->required();
  infdiv->add_option("--out", out_path, "Output JSON (default stdout)");

  std::string nc_op;
  int n = 0;
  auto* nc = app.add_subcommand("nc", "Noncrossing partition tables");
  nc->add_option("--op", nc_op, "partitions | pairings | mp-moments")
      ->required()
      ->check(CLI::IsMember({"partitions", "pairings", "mp-moments"}));
  nc->add_option("--n", n, "Size")->required();
  nc->add_option("--param", param, "Parameter a for mp-moments");
  nc->add_option("--out", out_path, "Output CSV (default stdout)");

  std::string mc_kind = "gaussian";
  rf_mc_config mc_cfg;
  rf_mc_config_init(&mc_cfg);
  mc_cfg.d = 60;
  mc_cfg.dprime = 120;
  mc_cfg.trials = 200;
  int kmax = 4;
  int threads = 0;
  auto* mc = app.add_subcommand("mc", "Seeded Monte Carlo comparison of empirical singular laws");
  mc->add_option("--kind", mc_kind, "gaussian | biinv | rank1 | compound")
      ->check(CLI::IsMember({"gaussian", "biinv", "rank1", "compound"}));
  mc->add_option("--d", mc_cfg.d, "Rows")->check(CLI::PositiveNumber);
  mc->add_option("--dprime", mc_cfg.dprime, "Columns (>= d)")->check(CLI::PositiveNumber);
  mc->add_option("--c", mc_cfg.c, "Rate for rank1 and compound");
  mc->add_option("--trials", mc_cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_cfg.seed, "RNG seed");
  mc->add_option("--summands", mc_cfg.summands, "Independent matrices summed per trial")->check(CLI::PositiveNumber);
  mc->add_option("--nu", nu_path, "Diagonal law for biinv (JSON)")->check(CLI::ExistingFile);
  mc->add_option("--target", target_path, "Target law (JSON); default: the matching limit law")
      ->check(CLI::ExistingFile);
  mc->add_option("--lambda-target", mc_cfg.lambda_target, "Require d/d' within 0.05 of this ratio");
  mc->add_option("--kmax", kmax, "Highest even moment (<= 12)");
  mc->add_option("--threads", threads, "Worker threads (0: automatic; RECTFREE_THREADS caps)");
  mc->add_option("--out", out_path, "Report JSON (default stdout)");
  mc->add_option("--singular-values", sv_path, "Dump all singular values (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*convolve) {
      check_lambda(lambda);
      Measure mu = load_measure(mu_path);
      rf_measure* out = nullptr;
      if (!nu_path.empty()) {
        if (power != 1) throw Failure{1, "--power and --nu are exclusive"};
        Measure nu = load_measure(nu_path);
        check(rf_convolve(mu.get(), nu.get(), lambda, &out));
      } else {
        check(rf_convolve_power(mu.get(), lambda, power, &out));
      }
      Measure result(out);
      char* text = nullptr;
      check(rf_measure_to_json(result.get(), &text));
      emit(out_path, take(text).get());
    } else if (*law) {
      check_lambda(lambda);
      char* csv = nullptr;
      char* atoms = nullptr;
      int kind = law_map.at(law_name);
      if (kind == 3) {
        if (!mu_path.empty()) throw Failure{1, "--json is not available for mp (a law on [0, inf))"};
        check(rf_marchenko_pastur(param, &csv, &atoms));
        String c = take(csv), a = take(atoms);
        emit(out_path, c.get());
        if (!atoms_path.empty()) emit(atoms_path, a.get());
      } else {
        rf_measure* m = nullptr;
        check(rf_law(static_cast<rf_law_kind>(kind), lambda, param, &m));
        Measure mu(m);
        check(rf_measure_density_csv(mu.get(), &csv));
        emit(out_path, take(csv).get());
        if (!atoms_path.empty()) {
          check(rf_measure_atoms_json(mu.get(), &atoms));
          emit(atoms_path, take(atoms).get());
        }
        if (!mu_path.empty()) {
          char* text = nullptr;
          check(rf_measure_to_json(mu.get(), &text));
          emit(mu_path, take(text).get());
        }
      }
    } else if (*infdiv) {
      check_lambda(lambda);
      rf_levy* g = nullptr;
      check(rf_levy_from_json(read_text(levy_path).c_str(), &g));
      Levy levy(g);
      rf_measure* m = nullptr;
      check(rf_bercovici_pata(levy.get(), lambda, &m));
      Measure mu(m);
      char* text = nullptr;
      check(rf_measure_to_json(mu.get(), &text));
      emit(out_path, take(text).get());
    } else if (*nc) {
      rf_nc_op op = nc_op == "partitions" ? RF_NC_PARTITIONS : nc_op == "pairings" ? RF_NC_PAIRINGS : RF_NC_MP_MOMENTS;
      char* csv = nullptr;
      check(rf_nc_table(op, n, param, &csv));
      emit(out_path, take(csv).get());
    } else if (*mc) {
      if (mc_kind == "gaussian") mc_cfg.kind = RF_MC_GAUSSIAN;
      else if (mc_kind == "biinv") mc_cfg.kind = RF_MC_BIINVARIANT;
      else if (mc_kind == "rank1") mc_cfg.kind = RF_MC_RANK_ONE_POISSON;
      else mc_cfg.kind = RF_MC_COMPOUND_POISSON;
      if (mc_cfg.dprime < mc_cfg.d) throw Failure{1, "--dprime must be >= --d"};
      if (kmax < 2 || kmax > 12 || kmax % 2 != 0) throw Failure{1, "--kmax must be even and in [2, 12]"};
      if (mc_cfg.kind == RF_MC_BIINVARIANT && nu_path.empty()) throw Failure{1, "--kind biinv needs --nu"};
      Measure nu;
      if (!nu_path.empty()) nu = load_measure(nu_path);
      double ratio = static_cast<double>(mc_cfg.d) / mc_cfg.dprime;
      Measure target;
      if (!target_path.empty()) {
        target = load_measure(target_path);
      } else {
        rf_measure* t = nullptr;
        switch (mc_cfg.kind) {
          case RF_MC_GAUSSIAN:
            check(rf_law(RF_LAW_RECT_GAUSSIAN, ratio, 0.0, &t));
            break;
          case RF_MC_BIINVARIANT:
            check(rf_convolve_power(nu.get(), ratio, mc_cfg.summands, &t));
            break;
          default:
            check(rf_law(RF_LAW_RECT_POISSON, ratio, mc_cfg.c, &t));
        }
        target.reset(t);
      }
      char* report = nullptr;
      char* sv = nullptr;
      check(rf_mc_run(&mc_cfg, nu.get(), target.get(), kmax, threads, &report, sv_path.empty() ? nullptr : &sv));
      String r = take(report);
      String s = take(sv);
      emit(out_path, r.get());
      if (!sv_path.empty()) emit(sv_path, s.get());
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
