#ifndef POLYA_CERT_H
#define POLYA_CERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  /**
   * Argument outside the domain of the function.
   */
  PC_STATUS_DOMAIN = 2,
  PC_STATUS_INVALID_POLYGON = 3,
  PC_STATUS_PRECONDITION = 4,
  PC_STATUS_COMPUTATION = 5,
  PC_STATUS_RANGE = 6,
  PC_STATUS_MESH = 7,
  PC_STATUS_SOLVER = 8,
  /**
   * A certified inequality failed numerically.
   */
  PC_STATUS_CERTIFICATE = 9,
  PC_STATUS_PARSE = 10,
  PC_STATUS_PANIC = 11,
} PcStatus;

/**
 * Lattice packing handle.
 */
typedef struct PcPacking PcPacking;

/**
 * Convex polygon handle.
 */
typedef struct PcPolygon PcPolygon;

/**
 * Neumann spectrum handle.
 */
typedef struct PcSpectrum PcSpectrum;

/**
 * One verification row. `certificate` is NaN when `has_certificate` is false.
 */
typedef struct PcBoundReport {
  double lambda;
  double area;
  size_t n_n;
  double bound_polya;
  double bound_kroger;
  double bound_convex;
  size_t packing_l;
  double certificate;
  bool has_certificate;
  bool pass;
} PcBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns its full length in bytes. Pass a
 * null `buf` to query the length. The message is empty after a success.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t pc_last_error_message(char *buf, size_t len);

/**
 * `J_ν(t)` and `J_ν'(t)`.
 *
 * # Safety
 * `out_j` and `out_dj` must be valid for writes.
 */
enum PcStatus pc_bessel_j(double nu, double t, double *out_j, double *out_dj);

/**
 * First positive zero of `J_ν`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PcStatus pc_bessel_zero(double nu, double *out);

/**
 * First positive zero of `J₀`.
 */
double pc_j0_zero(void);

/**
 * `Γ(x)` for `x > 0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PcStatus pc_gamma(double x, double *out);

/**
 * Builds a convex polygon from `n_vertices` interleaved coordinates
 * `x0, y0, x1, y1, …` in counter-clockwise order.
 *
 * # Safety
 * `xy` must be valid for `2 * n_vertices` reads and `out` for a write.
 */
enum PcStatus pc_polygon_new(const double *xy, size_t n_vertices, struct PcPolygon **out);

/**
 * Parses `{"vertices": [[x, y], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for a write.
 */
enum PcStatus pc_polygon_from_json(const char *json, struct PcPolygon **out);

/**
 * # Safety
 * `p` must be null or a handle from a polygon constructor, freed once.
 */
void pc_polygon_free(struct PcPolygon *p);

/**
 * # Safety
 * `p` must be a live polygon handle and `out` valid for a write.
 */
enum PcStatus pc_polygon_area(const struct PcPolygon *p, double *out);

/**
 * Closed-set membership: boundary points count as inside.
 *
 * # Safety
 * `p` must be a live polygon handle and `out` valid for a write.
 */
enum PcStatus pc_polygon_contains(const struct PcPolygon *p, double x, double y, bool *out);

/**
 * `|Ω|λ / (2√3 j₀²)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PcStatus pc_convex_bound(double area, double lambda, double *out);

/**
 * Pólya and Kröger bounds in dimension `d`.
 *
 * # Safety
 * `out_polya` and `out_kroger` must be valid for writes.
 */
enum PcStatus pc_bound_values(double area,
                              double lambda,
                              uint32_t d,
                              double *out_polya,
                              double *out_kroger);

/**
 * Packs a shifted triangular lattice of spacing `2r` into the polygon.
 *
 * # Safety
 * `p` must be a live polygon handle and `out` valid for a write.
 */
enum PcStatus pc_packing_new(const struct PcPolygon *p, double r, struct PcPacking **out);

/**
 * Number of packed points; 0 for a null handle.
 *
 * # Safety
 * `pk` must be null or a live packing handle.
 */
size_t pc_packing_len(const struct PcPacking *pk);

/**
 * `|Ω| / (2√3 r²)`, the count the packing is guaranteed to reach.
 *
 * # Safety
 * `pk` must be a live packing handle and `out` valid for a write.
 */
enum PcStatus pc_packing_guaranteed(const struct PcPacking *pk, double *out);

/**
 * # Safety
 * `pk` must be a live packing handle; `out_x` and `out_y` valid for writes.
 */
enum PcStatus pc_packing_point(const struct PcPacking *pk, size_t i, double *out_x, double *out_y);

/**
 * # Safety
 * `pk` must be null or a handle from [`pc_packing_new`], freed once.
 */
void pc_packing_free(struct PcPacking *pk);

/**
 * Closed-form spectrum of the `a × b` rectangle up to `cutoff`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum PcStatus pc_spectrum_rectangle(double a, double b, double cutoff, struct PcSpectrum **out);

/**
 * FEM spectrum on a mesh of size `h` with `m` eigenvalues, or with enough
 * eigenvalues to be trusted up to `lambda` when `m` is 0.
 *
 * # Safety
 * `p` must be a live polygon handle and `out` valid for a write.
 */
enum PcStatus pc_spectrum_fem(const struct PcPolygon *p,
                              double h,
                              size_t m,
                              double lambda,
                              struct PcSpectrum **out);

/**
 * Number of stored eigenvalues; 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live spectrum handle.
 */
size_t pc_spectrum_len(const struct PcSpectrum *s);

/**
 * `μ_k`, 1-based.
 *
 * # Safety
 * `s` must be a live spectrum handle and `out` valid for a write.
 */
enum PcStatus pc_spectrum_mu(const struct PcSpectrum *s, size_t k, double *out);

/**
 * `N_N(λ)`.
 *
 * # Safety
 * `s` must be a live spectrum handle and `out` valid for a write.
 */
enum PcStatus pc_spectrum_count(const struct PcSpectrum *s, double lambda, size_t *out);

/**
 * # Safety
 * `s` must be null or a handle from a spectrum constructor, freed once.
 */
void pc_spectrum_free(struct PcSpectrum *s);

/**
 * Runs the full certificate at `λ` against `s`, with default quadrature.
 *
 * # Safety
 * `p` and `s` must be live handles and `out` valid for a write.
 */
enum PcStatus pc_verify(const struct PcPolygon *p,
                        double lambda,
                        const struct PcSpectrum *s,
                        struct PcBoundReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYA_CERT_H */
