#ifndef MULTILAYER_HEAT_H
#define MULTILAYER_HEAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MlhShift {
  MLH_SHIFT_NONE = 0,
  MLH_SHIFT_PENTADIAGONAL = 1,
  MLH_SHIFT_TRIDIAGONAL = 2,
} MlhShift;

typedef enum MlhSolver {
  MLH_SOLVER_NPDM = 0,
  MLH_SOLVER_MNPDM = 1,
  MLH_SOLVER_SPDM = 2,
  MLH_SOLVER_NTDM = 3,
  MLH_SOLVER_STDM = 4,
} MlhSolver;

typedef enum MlhStatus {
  MLH_STATUS_OK = 0,
  MLH_STATUS_NULL_POINTER = 1,
  // Bad geometry, coefficients, indices or enum values.
  MLH_STATUS_INVALID_ARGUMENT = 2,
  MLH_STATUS_DIMENSION_MISMATCH = 3,
  // A pivot or a band-reduction coefficient vanished.
  MLH_STATUS_BREAKDOWN = 4,
  MLH_STATUS_SINGULAR = 5,
  MLH_STATUS_NON_CONVERGENCE = 6,
  // Malformed or inconsistent TOML configuration.
  MLH_STATUS_CONFIG = 7,
  MLH_STATUS_IO = 8,
  MLH_STATUS_PANIC = 9,
} MlhStatus;

// Layers, materials and the mesh built from them.
typedef struct MlhProblem MlhProblem;

// A temperature field advanced in time on a copy of a problem.
typedef struct MlhSimulation MlhSimulation;

// Time-step settings. Fill with [`mlh_step_options_default`] first.
typedef struct MlhStepOptions {
  double tau;
  double picard_tol;
  uintptr_t max_picard;
  // An [`MlhSolver`] value.
  uint32_t solver;
  // An [`MlhShift`] value.
  uint32_t shift;
} MlhStepOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *mlh_last_error(void);

// Library version as a static NUL-terminated string.
const char *mlh_version(void);

// # Safety
// `out` is valid for one write.
enum MlhStatus mlh_step_options_default(struct MlhStepOptions *out);

// Parses a TOML problem description (layers, materials and optional run
// sections).
//
// # Safety
// `toml` is a NUL-terminated string; `out` is valid for one write. On
// success `*out` owns a problem to release with [`mlh_problem_free`].
enum MlhStatus mlh_problem_from_toml(const char *toml, struct MlhProblem **out);

// # Safety
// As [`mlh_problem_from_toml`], with `path` naming a TOML file.
enum MlhStatus mlh_problem_load(const char *path, struct MlhProblem **out);

// # Safety
// `problem` is null or came from this library and is not used afterwards.
void mlh_problem_free(struct MlhProblem *problem);

// # Safety
// `problem` is a live handle; `out` is valid for one write.
enum MlhStatus mlh_problem_node_count(const struct MlhProblem *problem, uintptr_t *out);

// Copies the node radii; `len` must equal the node count.
//
// # Safety
// `problem` is a live handle; `nodes` is valid for `len` writes.
enum MlhStatus mlh_problem_nodes(const struct MlhProblem *problem, double *nodes, uintptr_t len);

// Starts a simulation at time 0 from `u0` (one value per node).
//
// # Safety
// `problem` is a live handle, `options` is valid for one read, `u0` for
// `len` reads and `out` for one write. On success `*out` owns a simulation
// to release with [`mlh_simulation_free`]; it does not borrow `problem`.
enum MlhStatus mlh_simulation_new(const struct MlhProblem *problem,
                                  const struct MlhStepOptions *options,
                                  const double *u0,
                                  uintptr_t len,
                                  struct MlhSimulation **out);

// Starts a simulation from the problem's `[simulate]` section.
//
// # Safety
// As [`mlh_simulation_new`].
enum MlhStatus mlh_simulation_from_config(const struct MlhProblem *problem,
                                          struct MlhSimulation **out);

// # Safety
// `sim` is null or came from this library and is not used afterwards.
void mlh_simulation_free(struct MlhSimulation *sim);

// Advances `steps` time steps. `iterations` (may be null) receives the
// total number of Picard iterations. On failure the field is left at the
// last completed step.
//
// # Safety
// `sim` is a live handle; `iterations` is null or valid for one write.
enum MlhStatus mlh_simulation_advance(struct MlhSimulation *sim,
                                      uintptr_t steps,
                                      uintptr_t *iterations);

// # Safety
// `sim` is a live handle; `out` is valid for one write.
enum MlhStatus mlh_simulation_time(const struct MlhSimulation *sim, double *out);

// Copies the current temperatures; `len` must equal the node count.
//
// # Safety
// `sim` is a live handle; `values` is valid for `len` writes.
enum MlhStatus mlh_simulation_field(const struct MlhSimulation *sim, double *values, uintptr_t len);

// Solves an `n`-row pentadiagonal system given by its five diagonals.
// Entry `i` of each diagonal belongs to row `i`; entries that fall outside
// the matrix must be zero. `full_rows` lists the rows allowed to use the
// outer diagonals (rows 0 and `n-1` need not be listed). Tridiagonal
// solvers reduce the system first.
//
// # Safety
// The five diagonals, `rhs` and `x` are valid for `n` elements;
// `full_rows` for `full_len` elements.
enum MlhStatus mlh_solve_penta(uint32_t solver,
                               uintptr_t n,
                               const double *sub2,
                               const double *sub1,
                               const double *diag,
                               const double *sup1,
                               const double *sup2,
                               const uintptr_t *full_rows,
                               uintptr_t full_len,
                               const double *rhs,
                               double *x);

// Solves an `n`-row tridiagonal system with NTDM or STDM.
//
// # Safety
// The three diagonals, `rhs` and `x` are valid for `n` elements.
enum MlhStatus mlh_solve_tri(uint32_t solver,
                             uintptr_t n,
                             const double *sub,
                             const double *diag,
                             const double *sup,
                             const double *rhs,
                             double *x);

// Operation count of a numerical solver on the `n`-node benchmark system
// with `k` contacts.
//
// # Safety
// `out` is valid for one write.
enum MlhStatus mlh_op_count(uint32_t solver,
                            uintptr_t n,
                            uintptr_t k,
                            uint64_t seed,
                            uint64_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MULTILAYER_HEAT_H */
