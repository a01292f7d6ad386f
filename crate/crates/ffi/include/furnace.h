/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef FURNACE_H
#define FURNACE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FurnaceStatus {
  FURNACE_STATUS_OK = 0,
  FURNACE_STATUS_NULL_POINTER = 1,
  FURNACE_STATUS_INVALID_ARGUMENT = 2,
  FURNACE_STATUS_IO = 3,
  FURNACE_STATUS_PARSE = 4,
  FURNACE_STATUS_ASSEMBLY = 5,
  FURNACE_STATUS_SOLVE = 6,
  // Rejected by the reduced model, e.g. a non-passive impedance.
  FURNACE_STATUS_LUMPED = 7,
  FURNACE_STATUS_PANIC = 8,
} FurnaceStatus;

typedef enum FurnaceSolver {
  FURNACE_SOLVER_AUTO = 0,
  FURNACE_SOLVER_DIRECT = 1,
  FURNACE_SOLVER_ITERATIVE = 2,
} FurnaceSolver;

// Reduced impedance of a three-terminal furnace.
typedef struct FurnaceReducedModel FurnaceReducedModel;

// A solved field problem with its terminal report.
typedef struct FurnaceSimulation FurnaceSimulation;

// Complex number as `re + i·im`.
typedef struct FurnaceComplex {
  double re;
  double im;
} FurnaceComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null if none. The string
// stays valid until the next failing call on the same thread.
const char *furnace_last_error(void);

// Library version as a static NUL-terminated string.
const char *furnace_version(void);

// Loads an MSH 2.2 mesh and a TOML configuration, assembles and solves.
// `tol` ≤ 0 selects the default tolerance.
//
// # Safety
// `mesh_path` and `config_path` must be NUL-terminated strings; `out` must
// point to writable storage for one handle.
enum FurnaceStatus furnace_simulation_run(const char *mesh_path,
                                          const char *config_path,
                                          enum FurnaceSolver solver,
                                          double tol,
                                          uint64_t gauge_seed,
                                          struct FurnaceSimulation **out);

// Releases a simulation handle. Null is ignored.
//
// # Safety
// `sim` must come from [`furnace_simulation_run`] and not be used afterwards.
void furnace_simulation_free(struct FurnaceSimulation *sim);

// Number of terminals, ground included.
//
// # Safety
// `sim` must be a live handle; `out` writable.
enum FurnaceStatus furnace_simulation_terminal_count(const struct FurnaceSimulation *sim,
                                                     size_t *out);

// Voltage and entering current of terminal `k` (0-based, the last is ground).
//
// # Safety
// `sim` must be a live handle; `voltage` and `current` writable.
enum FurnaceStatus furnace_simulation_terminal(const struct FurnaceSimulation *sim,
                                               size_t k,
                                               struct FurnaceComplex *voltage,
                                               struct FurnaceComplex *current);

// Complex power `½ Σ V_k conj(I_k)` (VA) and Joule power (W).
//
// # Safety
// `sim` must be a live handle; `s` and `joule` writable.
enum FurnaceStatus furnace_simulation_power(const struct FurnaceSimulation *sim,
                                            struct FurnaceComplex *s,
                                            double *joule);

// Writes the terminal report as JSON.
//
// # Safety
// `sim` must be a live handle; `path` a NUL-terminated string.
enum FurnaceStatus furnace_simulation_write_report(const struct FurnaceSimulation *sim,
                                                   const char *path);

// Writes the element fields as legacy VTK.
//
// # Safety
// `sim` must be a live handle; `path` a NUL-terminated string.
enum FurnaceStatus furnace_simulation_write_vtk(const struct FurnaceSimulation *sim,
                                                const char *path);

// Reduces a three-terminal simulation to `Z_R`.
//
// # Safety
// `sim` must be a live handle; `out` writable.
enum FurnaceStatus furnace_simulation_reduce(const struct FurnaceSimulation *sim,
                                             bool allow_nonpassive,
                                             struct FurnaceReducedModel **out);

// Reduces a terminal report file to `Z_R`.
//
// # Safety
// `path` must be a NUL-terminated string; `out` writable.
enum FurnaceStatus furnace_reduce_report_file(const char *path,
                                              bool allow_nonpassive,
                                              struct FurnaceReducedModel **out);

// Model from a known impedance, e.g. terminal measurements.
//
// # Safety
// `out` must be writable.
enum FurnaceStatus furnace_reduced_model_new(struct FurnaceComplex z_r,
                                             double frequency_hz,
                                             struct FurnaceReducedModel **out);

// Reads a reduced-model JSON file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` writable.
enum FurnaceStatus furnace_reduced_model_load(const char *path, struct FurnaceReducedModel **out);

// Writes the model as JSON.
//
// # Safety
// `model` must be a live handle; `path` a NUL-terminated string.
enum FurnaceStatus furnace_reduced_model_save(const struct FurnaceReducedModel *model,
                                              const char *path);

// Releases a model handle. Null is ignored.
//
// # Safety
// `model` must come from this library and not be used afterwards.
void furnace_reduced_model_free(struct FurnaceReducedModel *model);

// `Z_R` in ohms.
//
// # Safety
// `model` must be a live handle; `out` writable.
enum FurnaceStatus furnace_reduced_model_impedance(const struct FurnaceReducedModel *model,
                                                   struct FurnaceComplex *out);

// Power in watts dissipated at common current amplitude `current` (A).
//
// # Safety
// `model` must be a live handle; `out` writable.
enum FurnaceStatus furnace_reduced_model_predict_power(const struct FurnaceReducedModel *model,
                                                       double current,
                                                       double *out);

// Current amplitude in amperes that dissipates `power` watts.
//
// # Safety
// `model` must be a live handle; `out` writable.
enum FurnaceStatus furnace_reduced_model_required_current(const struct FurnaceReducedModel *model,
                                                          double power,
                                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FURNACE_H */
