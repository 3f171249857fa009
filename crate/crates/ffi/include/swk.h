#ifndef SWK_H
#define SWK_H

#include <stdbool.h>
#include <stddef.h>

// Result codes.
typedef enum SwkStatus {
  SWK_STATUS_OK = 0,
  SWK_STATUS_NULL_POINTER = 1,
  SWK_STATUS_INVALID_ARGUMENT = 2,
  SWK_STATUS_PARSE = 3,
  SWK_STATUS_RESOURCE_LIMIT = 4,
  SWK_STATUS_NUMERICAL = 5,
  SWK_STATUS_IO = 6,
  SWK_STATUS_BUFFER_TOO_SMALL = 7,
  SWK_STATUS_PANIC = 8,
} SwkStatus;

// Selects one of the six operators.
typedef enum SwkOperator {
  SWK_OPERATOR_BOUNDARY_A = 0,
  SWK_OPERATOR_BOUNDARY_B = 1,
  SWK_OPERATOR_SHIFT = 2,
  SWK_OPERATOR_COIN = 3,
  SWK_OPERATOR_EVOLUTION = 4,
  SWK_OPERATOR_DISCRIMINANT = 5,
} SwkOperator;

// Opaque handle to a built set of walk operators.
typedef struct SwkOperators SwkOperators;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *swk_version(void);

// Message for the last failed call on this thread, or NULL. Valid until
// the next call into the library on this thread.
const char *swk_last_error(void);

// Builds operators from a graph spec such as `cycle:5` or `file:g.txt`.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum SwkStatus swk_operators_from_spec(const char *spec, struct SwkOperators **out);

// Builds operators from a graph file.
//
// # Safety
// As [`swk_operators_from_spec`].
enum SwkStatus swk_operators_load(const char *path, struct SwkOperators **out);

// Writes the underlying graph in the text graph format.
//
// # Safety
// `ops` must come from this library; `path` must be NUL-terminated.
enum SwkStatus swk_operators_save_graph(const struct SwkOperators *ops, const char *path);

// Releases a handle. NULL is ignored.
//
// # Safety
// `ops` must come from this library and not be used afterwards.
void swk_operators_free(struct SwkOperators *ops);

// Arc-space and vertex-space dimensions.
//
// # Safety
// `ops` must come from this library; `dim_h` and `dim_k` must be writable.
enum SwkStatus swk_operators_dims(const struct SwkOperators *ops, size_t *dim_h, size_t *dim_k);

// Copies one operator, row-major, into `re` and `im`, each of length at
// least `rows * cols`. `rows` and `cols` are written even when the buffers
// are too small.
//
// # Safety
// `ops` from this library; `rows`, `cols` writable; `re`, `im` valid for
// `len` doubles each.
enum SwkStatus swk_operators_copy(const struct SwkOperators *ops,
                                  enum SwkOperator which,
                                  double *re,
                                  double *im,
                                  size_t len,
                                  size_t *rows,
                                  size_t *cols);

// Eigenvalues of `U` into `re`/`im` (length at least `dim_h`).
//
// # Safety
// `ops` from this library; buffers valid for `len` doubles each.
enum SwkStatus swk_evolution_spectrum(const struct SwkOperators *ops,
                                      double *re,
                                      double *im,
                                      size_t len);

// Eigenvalues of `T`, ascending, into `values` (length at least `dim_k`).
//
// # Safety
// `ops` from this library; `values` valid for `len` doubles.
enum SwkStatus swk_discriminant_spectrum(const struct SwkOperators *ops,
                                         double *values,
                                         size_t len);

// Runs the operator identities and the full spectral mapping check.
// `*pass` is set on `SWK_OK`; a failed check is not an error. A
// non-positive `identity_tolerance` selects the default.
//
// # Safety
// `ops` from this library; `pass` writable.
enum SwkStatus swk_verify(const struct SwkOperators *ops, double identity_tolerance, bool *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWK_H */
