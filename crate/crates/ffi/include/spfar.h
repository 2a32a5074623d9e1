#ifndef SPFAR_H
#define SPFAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpfarStatus {
  SPFAR_STATUS_OK = 0,
  SPFAR_STATUS_NULL_POINTER = 1,
  SPFAR_STATUS_INVALID_UTF8 = 2,
  SPFAR_STATUS_PARSE = 3,
  SPFAR_STATUS_NOT_SIMPLE = 4,
  SPFAR_STATUS_NOT_CONNECTED = 5,
  SPFAR_STATUS_INVALID_WEIGHT = 6,
  SPFAR_STATUS_OVERFLOW = 7,
  SPFAR_STATUS_INVALID_QUERY = 8,
  SPFAR_STATUS_NOT_SERIES_PARALLEL = 9,
  SPFAR_STATUS_OUT_OF_RANGE = 10,
  SPFAR_STATUS_INTERNAL = 11,
} SpfarStatus;

typedef struct SpfarNetwork SpfarNetwork;

typedef struct SpfarResult SpfarResult;

typedef struct SpfarStructure SpfarStructure;

/*
 An exact fraction `num / den` with `den > 0`, in lowest terms.
 */
typedef struct SpfarRational {
  int64_t num;
  int64_t den;
} SpfarRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a network in the text format (`n m`, then `m` lines `u v w`).

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SpfarStatus spfar_network_parse(const char *text, struct SpfarNetwork **out);

/*
 # Safety
 `net` must be null or a handle from [`spfar_network_parse`], not yet freed.
 */
void spfar_network_free(struct SpfarNetwork *net);

/*
 # Safety
 `net` must be a live network handle.
 */
size_t spfar_network_vertex_count(const struct SpfarNetwork *net);

/*
 # Safety
 `net` must be a live network handle.
 */
size_t spfar_network_edge_count(const struct SpfarNetwork *net);

/*
 Builds the query structure. The network handle stays owned by the caller.

 # Safety
 `net` must be a live network handle and `out` a valid pointer.
 */
enum SpfarStatus spfar_structure_build(const struct SpfarNetwork *net, struct SpfarStructure **out);

/*
 # Safety
 `s` must be null or a handle from [`spfar_structure_build`], not yet freed.
 */
void spfar_structure_free(struct SpfarStructure *s);

/*
 Farthest distance from the point at `lambda` along `edge`.

 # Safety
 `s` must be a live structure handle and `out` a valid pointer.
 */
enum SpfarStatus spfar_farthest_distance(const struct SpfarStructure *s,
                                         size_t edge,
                                         struct SpfarRational lambda,
                                         struct SpfarRational *out);

/*
 Farthest distance and every farthest point.

 # Safety
 `s` must be a live structure handle and `out` a valid pointer.
 */
enum SpfarStatus spfar_farthest_points(const struct SpfarStructure *s,
                                       size_t edge,
                                       struct SpfarRational lambda,
                                       struct SpfarResult **out);

/*
 # Safety
 `r` must be a live result handle.
 */
struct SpfarRational spfar_result_distance(const struct SpfarResult *r);

/*
 # Safety
 `r` must be a live result handle.
 */
size_t spfar_result_count(const struct SpfarResult *r);

/*
 Point `i` of the result, in canonical order (by edge, then lambda).

 # Safety
 `r` must be a live result handle; `edge` and `lambda` valid pointers.
 */
enum SpfarStatus spfar_result_point(const struct SpfarResult *r,
                                    size_t i,
                                    size_t *edge,
                                    struct SpfarRational *lambda);

/*
 # Safety
 `r` must be null or a handle from [`spfar_farthest_points`], not yet freed.
 */
void spfar_result_free(struct SpfarResult *r);

/*
 A static, NUL-terminated description of a status code.
 */
const char *spfar_status_message(enum SpfarStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPFAR_H */
