#ifndef RECTFREE_H
#define RECTFREE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RF_API __declspec(dllexport)
#else
#define RF_API __attribute__((visibility("default")))
#endif

typedef enum {
  RF_OK = 0,
  RF_ERR_VALIDATION = 1,
  RF_ERR_NUMERICAL = 2,
  RF_ERR_INTERNAL = 3
} rf_status;

/* Symmetric probability measure. */
typedef struct rf_measure rf_measure;
/* Finite symmetric Lévy measure. */
typedef struct rf_levy rf_levy;

/* Message for the last failed call on this thread; never NULL. */
RF_API const char* rf_last_error(void);
/* Frees strings returned through char** out-parameters. */
RF_API void rf_string_free(char* s);

RF_API rf_status rf_measure_create(const double* atom_x, const double* atom_mass, size_t n_atoms,
                                   const double* grid, const double* density, size_t n_grid, rf_measure** out);
RF_API rf_status rf_measure_from_json(const char* json, rf_measure** out);
RF_API rf_status rf_measure_to_json(const rf_measure* m, char** out);
/* "x,density" CSV of the density part. */
RF_API rf_status rf_measure_density_csv(const rf_measure* m, char** out);
RF_API rf_status rf_measure_atoms_json(const rf_measure* m, char** out);
RF_API rf_status rf_measure_moment(const rf_measure* m, int k, double* out);
RF_API rf_status rf_measure_density_at(const rf_measure* m, double x, double* out);
RF_API rf_status rf_measure_support_radius(const rf_measure* m, double* out);
RF_API void rf_measure_free(rf_measure* m);

RF_API rf_status rf_dirac_zero(rf_measure** out);
RF_API rf_status rf_symmetric_bernoulli(rf_measure** out);

typedef enum {
  RF_LAW_RECT_GAUSSIAN = 0, /* param unused */
  RF_LAW_RECT_CAUCHY = 1,   /* param = t */
  RF_LAW_RECT_POISSON = 2   /* param = c */
} rf_law_kind;

RF_API rf_status rf_law(rf_law_kind kind, double lambda, double param, rf_measure** out);
/* Marchenko-Pastur law of parameter c on [0, inf): density CSV and atom list. */
RF_API rf_status rf_marchenko_pastur(double c, char** density_csv, char** atoms_json);

/* C(z) for the ratio lambda. */
RF_API rf_status rf_rect_r_transform(const rf_measure* m, double lambda, double re, double im, double* out_re,
                                     double* out_im);
RF_API rf_status rf_convolve(const rf_measure* mu, const rf_measure* nu, double lambda, rf_measure** out);
RF_API rf_status rf_convolve_power(const rf_measure* mu, double lambda, int k, rf_measure** out);

RF_API rf_status rf_levy_from_json(const char* json, rf_levy** out);
RF_API rf_status rf_levy_to_json(const rf_levy* g, char** out);
RF_API void rf_levy_free(rf_levy* g);
RF_API rf_status rf_bercovici_pata(const rf_levy* g, double lambda, rf_measure** out);

typedef enum {
  RF_NC_PARTITIONS = 0, /* noncrossing partitions of [n] */
  RF_NC_PAIRINGS = 1,   /* noncrossing pairings of [n], n even */
  RF_NC_MP_MOMENTS = 2  /* k, moment rows for k = 1..n with parameter param */
} rf_nc_op;

RF_API rf_status rf_nc_table(rf_nc_op op, int n, double param, char** csv);

typedef enum {
  RF_MC_GAUSSIAN = 0,
  RF_MC_BIINVARIANT = 1,
  RF_MC_COMPOUND_POISSON = 2,
  RF_MC_RANK_ONE_POISSON = 3
} rf_mc_kind;

typedef struct {
  rf_mc_kind kind;
  int d;
  int dprime;
  double lambda_target; /* NaN: no ratio check */
  int trials;
  uint64_t seed;
  double c;
  int summands;
} rf_mc_config;

RF_API void rf_mc_config_init(rf_mc_config* cfg);
/* nu is required for RF_MC_BIINVARIANT, ignored otherwise. threads = 0 means automatic.
   report_json receives the report; singular_csv, if not NULL, receives all singular values. */
RF_API rf_status rf_mc_run(const rf_mc_config* cfg, const rf_measure* nu, const rf_measure* target, int kmax,
                           int threads, char** report_json, char** singular_csv);

#ifdef __cplusplus
}
#endif

#endif
