#ifndef CUBESET_H
#define CUBESET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CubesetCountMethod {
  CUBESET_COUNT_METHOD_SPLIT = 0,
  CUBESET_COUNT_METHOD_PAIRS = 1,
  CUBESET_COUNT_METHOD_BRANCH = 2,
} CubesetCountMethod;

typedef enum CubesetStatus {
  CUBESET_STATUS_OK = 0,
  CUBESET_STATUS_NULL_POINTER = 1,
  CUBESET_STATUS_INVALID_UTF8 = 2,
  CUBESET_STATUS_BUFFER_TOO_SMALL = 3,
  CUBESET_STATUS_DOMAIN = 4,
  CUBESET_STATUS_SIZE_LIMIT = 5,
  CUBESET_STATUS_ENUMERATION_LIMIT = 6,
  CUBESET_STATUS_PARSE = 7,
  CUBESET_STATUS_REGULARITY = 8,
  CUBESET_STATUS_BIPARTITENESS = 9,
  CUBESET_STATUS_INFEASIBLE = 10,
  CUBESET_STATUS_RANDOMIZED_FAILURE = 11,
  CUBESET_STATUS_PRECONDITION = 12,
  CUBESET_STATUS_NO_PATH = 13,
  CUBESET_STATUS_IO = 14,
  CUBESET_STATUS_PANIC = 15,
} CubesetStatus;

/**
 * Opaque graph handle.
 */
typedef struct CubesetGraph CubesetGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *cubeset_last_error(void);

void cubeset_string_free(char *s);

enum CubesetStatus cubeset_hypercube(size_t d, struct CubesetGraph **out);

/**
 * Reads a graph in the `bipartite <degree> <n_x> <n_y>` edge-list format.
 */
enum CubesetStatus cubeset_graph_load(const char *path, struct CubesetGraph **out);

enum CubesetStatus cubeset_graph_parse(const char *text, struct CubesetGraph **out);

void cubeset_graph_free(struct CubesetGraph *g);

enum CubesetStatus cubeset_graph_vertex_count(const struct CubesetGraph *g, size_t *out);

enum CubesetStatus cubeset_graph_degree(const struct CubesetGraph *g, size_t *out);

/**
 * Writes `N(A)` in ascending order. `*out_len` always receives the required length;
 * if it exceeds `capacity` nothing is written and `BUFFER_TOO_SMALL` is returned.
 */
enum CubesetStatus cubeset_neighborhood(const struct CubesetGraph *g,
                                        const uint32_t *ids,
                                        size_t len,
                                        uint32_t *out_ids,
                                        size_t capacity,
                                        size_t *out_len);

/**
 * Closure `[A]` of a one-sided set, with the same buffer contract as
 * [`cubeset_neighborhood`].
 */
enum CubesetStatus cubeset_closure(const struct CubesetGraph *g,
                                   const uint32_t *ids,
                                   size_t len,
                                   uint32_t *out_ids,
                                   size_t capacity,
                                   size_t *out_len);

/**
 * Number of independent sets of `Q_d` as a decimal string.
 */
enum CubesetStatus cubeset_count(size_t d,
                                 enum CubesetCountMethod method,
                                 bool extended,
                                 char **out);

/**
 * The dyadic sum as `"p/2^q"`.
 */
enum CubesetStatus cubeset_sap_sum(size_t d, char **out);

/**
 * Runs the container pipeline on the class of `(a, g, v)` with default parameters for the
 * graph degree and writes the report as JSON. A `budget` of 0 selects the default.
 */
enum CubesetStatus cubeset_containers_json(const struct CubesetGraph *graph,
                                           size_t a,
                                           size_t g,
                                           uint32_t v,
                                           uint64_t seed,
                                           uint64_t budget,
                                           char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBESET_H */
