/* mapple: mapping DSL, processor-space algebra, decompose optimizer,
 * communication-volume models and task lifecycle simulator.
 *
 * Conventions
 *   - Every fallible call returns mapple_status; on failure a message is
 *     available from mapple_last_error() on the same thread.
 *   - Objects are opaque handles released with their *_free function.
 *     Free functions accept NULL.
 *   - Strings returned through char** are owned by the caller and released
 *     with mapple_string_free().
 *   - Handles are immutable after creation and may be shared across threads.
 */
#ifndef MAPPLE_MAPPLE_H
#define MAPPLE_MAPPLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MAPPLE_API
#elif defined(MAPPLE_BUILDING)
#define MAPPLE_API __attribute__((visibility("default")))
#else
#define MAPPLE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mapple_status {
  MAPPLE_OK = 0,
  MAPPLE_E_INVALID_ARGUMENT = 1, /* null pointer, bad size, malformed value */
  MAPPLE_E_PARSE = 2,            /* mapper source does not parse */
  MAPPLE_E_VALIDATION = 3,       /* program has validation errors */
  MAPPLE_E_EVAL = 4,             /* mapper evaluation failed */
  MAPPLE_E_DOMAIN = 5,           /* processor-space, factorization or volume error */
  MAPPLE_E_SCHEMA = 6,           /* task graph or trace document rejected */
  MAPPLE_E_STUCK = 7,            /* simulation cannot make progress */
  MAPPLE_E_NO_BINDING = 8,       /* task has no IndexTaskMap statement */
  MAPPLE_E_INTERNAL = 9
} mapple_status;

typedef enum mapple_proc_kind { MAPPLE_PROC_CPU = 0, MAPPLE_PROC_GPU = 1, MAPPLE_PROC_OMP = 2 } mapple_proc_kind;

typedef struct mapple_machine {
  mapple_proc_kind kind;
  int64_t nodes;
  int64_t procs_per_node;
} mapple_machine;

typedef enum mapple_format { MAPPLE_FORMAT_JSON = 0, MAPPLE_FORMAT_CSV = 1 } mapple_format;

typedef enum mapple_objective_kind {
  MAPPLE_OBJECTIVE_ISOTROPIC = 0,
  MAPPLE_OBJECTIVE_HALO = 1,      /* needs halo[k] */
  MAPPLE_OBJECTIVE_TRANSPOSE = 2  /* needs halo[k] and transposed dims */
} mapple_objective_kind;

typedef struct mapple_objective {
  mapple_objective_kind kind;
  const int64_t* halo;      /* k widths, or NULL for isotropic */
  const size_t* transposed; /* dimension indices */
  size_t n_transposed;
} mapple_objective;

typedef struct mapple_program mapple_program;
typedef struct mapple_mapper mapple_mapper;
typedef struct mapple_taskgraph mapple_taskgraph;
typedef struct mapple_report mapple_report;

MAPPLE_API const char* mapple_version(void);
MAPPLE_API const char* mapple_status_name(mapple_status status);
/* Message of the last failed call on this thread; "" if none. */
MAPPLE_API const char* mapple_last_error(void);
MAPPLE_API void mapple_string_free(char* s);

/* ---- mapper programs ---- */
MAPPLE_API mapple_status mapple_program_parse(const char* source, size_t len, mapple_program** out);
MAPPLE_API void mapple_program_free(mapple_program* p);
/* 1 if static validation found errors (warnings do not count). */
MAPPLE_API int mapple_program_has_errors(const mapple_program* p);
/* Statements, functions and diagnostics. */
MAPPLE_API mapple_status mapple_parse_report(const mapple_program* p, mapple_report** out);
/* Canonical source text. */
MAPPLE_API mapple_status mapple_program_print(const mapple_program* p, char** out);

/* ---- compiled mapping functions ---- */
MAPPLE_API mapple_status mapple_mapper_compile(const mapple_program* p, const char* task, const mapple_machine* m,
                                               mapple_mapper** out);
/* Same, naming the function instead of a bound task. */
MAPPLE_API mapple_status mapple_mapper_compile_function(const mapple_program* p, const char* func,
                                                        const mapple_machine* m, mapple_mapper** out);
MAPPLE_API void mapple_mapper_free(mapple_mapper* f);
MAPPLE_API mapple_status mapple_mapper_eval(const mapple_mapper* f, const int64_t* ipoint, const int64_t* ispace,
                                            size_t rank, int64_t* node, int64_t* proc);
MAPPLE_API mapple_status mapple_map_report(const mapple_mapper* f, const int64_t* ispace, size_t rank,
                                           mapple_report** out);

/* ---- decompose ---- */
MAPPLE_API mapple_status mapple_count_factorizations(int64_t d, size_t k, uint64_t* out);
/* out_factors has room for k values. */
MAPPLE_API mapple_status mapple_greedy_grid(int64_t d, size_t k, int64_t* out_factors);
/* objective may be NULL (isotropic). out_score, if not NULL, receives the
 * exact score as "a/b". */
MAPPLE_API mapple_status mapple_search_optimal(int64_t d, const int64_t* extents, size_t k,
                                               const mapple_objective* objective, int strict_divisible,
                                               int64_t* out_factors, char** out_score);
MAPPLE_API mapple_status mapple_decompose_report(int64_t d, const int64_t* extents, size_t k,
                                                 const mapple_objective* objective, int strict_divisible,
                                                 mapple_report** out);

/* ---- communication volume ---- */
/* halo may be NULL; oracle != 0 adds the brute-force boundary count. */
MAPPLE_API mapple_status mapple_commvol_report(const int64_t* extents, const int64_t* grid, size_t k,
                                               const int64_t* halo, const size_t* transpose_dims,
                                               size_t n_transpose, int oracle, mapple_report** out);

/* ---- task lifecycle simulation ---- */
MAPPLE_API mapple_status mapple_taskgraph_load(const char* json, size_t len, mapple_taskgraph** out);
MAPPLE_API void mapple_taskgraph_free(mapple_taskgraph* g);
MAPPLE_API size_t mapple_taskgraph_size(const mapple_taskgraph* g);
/* Tasks without their own IndexTaskMap use default_task's binding (may be
 * NULL). seed == 0 selects the deterministic priority scheduler, any other
 * value a seeded random one. The trace is re-checked; violations make
 * mapple_report_has_errors() return 1. */
MAPPLE_API mapple_status mapple_simulate_report(const mapple_taskgraph* g, const mapple_program* p,
                                                const mapple_machine* m, const char* default_task, uint64_t seed,
                                                mapple_report** out);
/* Checks an external trace (bare list or simulate report JSON). */
MAPPLE_API mapple_status mapple_check_trace_report(const mapple_taskgraph* g, const mapple_program* p,
                                                   const mapple_machine* m, const char* default_task,
                                                   const char* trace_json, size_t len, mapple_report** out);

/* ---- parameter sweep ---- */
/* spec_json NULL: the full 180-configuration grid. */
MAPPLE_API mapple_status mapple_sweep_report(const char* spec_json, size_t len, mapple_report** out);

/* ---- reports ---- */
MAPPLE_API mapple_status mapple_report_render(const mapple_report* r, mapple_format format, char** out);
/* 1 when the report carries validation errors or trace violations. */
MAPPLE_API int mapple_report_has_errors(const mapple_report* r);
MAPPLE_API void mapple_report_free(mapple_report* r);

#ifdef __cplusplus
}
#endif

#endif /* MAPPLE_MAPPLE_H */
