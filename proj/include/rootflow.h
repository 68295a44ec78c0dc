#ifndef ROOTFLOW_H
#define ROOTFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RF_API __declspec(dllexport)
#else
#define RF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. RF_OK is 0; every failure leaves a message and a JSON
 * description (error, message, details) in thread-local storage. */
typedef enum rf_status {
  RF_OK = 0,
  RF_E_INVALID_ARGUMENT = 1,
  RF_E_CONFIG = 2,
  RF_E_IO = 3,
  RF_E_STABILITY_VIOLATION = 4,
  RF_E_DOMAIN_TOO_SMALL = 5,
  RF_E_NON_INTEGRABLE = 6,
  RF_E_BAD_EXPONENTS = 7,
  RF_E_DEGREE_UNDERFLOW = 8,
  RF_E_NO_CONVERGENCE = 9,
  RF_E_BAD_TABLE = 10,
  RF_E_POLE_HIT = 11,
  RF_E_SUM_NEAR_ZERO = 12,
  RF_E_ON_CIRCLE = 13,
  RF_E_SCHEMA_MISMATCH = 14,
  RF_E_INTERNAL = 99
} rf_status;

typedef struct rf_density rf_density;
typedef struct rf_poly rf_poly;
typedef struct rf_roots rf_roots;

RF_API const char* rf_version(void);
RF_API const char* rf_status_name(rf_status status);
/* Nonzero for errors caused by the caller's configuration or arguments. */
RF_API int rf_status_is_config(rf_status status);
RF_API const char* rf_last_error_message(void);
RF_API const char* rf_last_error_json(void);
/* Frees strings returned through char** out-parameters. */
RF_API void rf_string_free(char* s);

/* Radial densities on a uniform grid (0, x_max] with `cells` cells. */
RF_API rf_status rf_density_profile(const char* name, double x_max, size_t cells, rf_density** out);
RF_API rf_status rf_density_from_values(double x_max, const double* values, size_t cells, rf_density** out);
RF_API rf_status rf_density_evolve(const rf_density* psi, double t_end, double cfl, rf_density** out);
RF_API rf_status rf_density_indicator_solution(double t, double x_max, size_t cells, rf_density** out);
RF_API size_t rf_density_cells(const rf_density* psi);
RF_API double rf_density_time(const rf_density* psi);
RF_API double rf_density_mass(const rf_density* psi);
/* Copies min(cap, cells) values. */
RF_API size_t rf_density_values(const rf_density* psi, double* buffer, size_t cap);
RF_API rf_status rf_density_l1(const rf_density* a, const rf_density* b, double* out);
RF_API void rf_density_free(rf_density* psi);

/* Root ensembles (double precision). */
RF_API rf_status rf_roots_from_arrays(const double* re, const double* im, size_t n, rf_roots** out);
RF_API rf_status rf_roots_sample(const char* law, size_t n, uint64_t seed, rf_roots** out);
RF_API size_t rf_roots_size(const rf_roots* roots);
RF_API rf_status rf_roots_get(const rf_roots* roots, size_t i, double* re, double* im);
RF_API void rf_roots_free(rf_roots* roots);

/* Polynomials at a fixed binary precision. bits = 0 picks max(256, 4n). */
RF_API rf_status rf_poly_from_roots(const rf_roots* roots, long bits, rf_poly** out);
RF_API rf_status rf_poly_random_taylor(size_t n, uint64_t seed, long bits, rf_poly** out);
RF_API rf_status rf_poly_differentiate(const rf_poly* p, size_t k, rf_poly** out);
RF_API size_t rf_poly_degree(const rf_poly* p);
RF_API long rf_poly_bits(const rf_poly* p);
RF_API rf_status rf_poly_coeff(const rf_poly* p, size_t k, double* re, double* im);
/* max_iters = 0 keeps the default cap. */
RF_API rf_status rf_poly_find_roots(const rf_poly* p, int max_iters, rf_roots** out);
RF_API void rf_poly_free(rf_poly* p);

RF_API rf_status rf_circle_kernel_average(double r, double s, double* out);

/* Subcommands: pde, linear, hardy, flow, kz, pairing, render. Configs are JSON
 * objects with flat keys. */
RF_API rf_status rf_default_config(const char* subcommand, char** json_out);
RF_API rf_status rf_canonicalize_config(const char* subcommand, const char* config_json, char** json_out);
/* Runs a subcommand into out_dir and returns summary.json's content. jobs = 0
 * uses every hardware thread; force != 0 overwrites an existing summary. */
RF_API rf_status rf_run(const char* subcommand, const char* config_json, const char* out_dir, unsigned jobs,
                        int force, char** summary_out);
/* Renders a CSV artifact (density, histogram, scatter, mass_series) to SVG. */
RF_API rf_status rf_render_svg(const char* kind, const char* csv_path, const char* svg_path);

#ifdef __cplusplus
}
#endif

#endif
