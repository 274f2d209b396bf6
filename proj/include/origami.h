#ifndef ORIGAMI_H
#define ORIGAMI_H

/* C API of the origami accelerator simulator and performance model.
 * All entry points are thread-compatible: distinct handles may be used
 * from distinct threads; one handle must not be shared concurrently.
 * Functions return OGMI_OK on success; diagnostics are retrieved with
 * ogmi_net_error (per handle) or ogmi_last_error (handle creation). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OGMI_API __declspec(dllexport)
#else
#define OGMI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ogmi_status {
    OGMI_OK = 0,
    OGMI_E_INVALID = 1, /* bad argument / null pointer */
    OGMI_E_CONFIG = 2,  /* configuration rejected */
    OGMI_E_IO = 3,      /* file could not be read or written */
    OGMI_E_VERIFY = 4,  /* verification found a mismatch */
    OGMI_E_RUN = 5      /* simulation/estimation failed */
} ogmi_status;

/* Opaque handle for a parsed network + chip configuration. */
typedef struct ogmi_net ogmi_net;

OGMI_API const char* ogmi_version(void);
OGMI_API const char* ogmi_status_name(ogmi_status s);

/* Parse a configuration file / string into a handle. On failure *out is
 * NULL and ogmi_last_error() carries the diagnostic. */
OGMI_API ogmi_status ogmi_net_open(const char* config_path, ogmi_net** out);
OGMI_API ogmi_status ogmi_net_parse(const char* text, ogmi_net** out);
OGMI_API void ogmi_net_close(ogmi_net* net);

/* Last diagnostic of an operation on this handle ("" if none). */
OGMI_API const char* ogmi_net_error(const ogmi_net* net);
/* Thread-local diagnostic of the last failed handle creation. */
OGMI_API const char* ogmi_last_error(void);

OGMI_API int32_t ogmi_net_stage_count(const ogmi_net* net);

typedef struct ogmi_perf_totals {
    double avg_throughput_gops;
    double frame_rate_fps;
    double runtime_ms;
    int64_t total_ops;
    int64_t total_cycles;
    int32_t stages;
} ogmi_perf_totals;

/* Write estimate.json / estimate.csv into out_dir. formats is a
 * comma-separated subset of "json,csv" (NULL = both). totals may be
 * NULL. */
OGMI_API ogmi_status ogmi_estimate(ogmi_net* net, const char* out_dir, const char* formats,
                                   ogmi_perf_totals* totals);

typedef struct ogmi_sim_summary {
    int32_t stages;
    int64_t total_cycles;
    double runtime_ms;
    uint64_t seed;
} ogmi_sim_summary;

/* Run the cycle simulation over the configured network. input_path NULL
 * generates a seeded random input. Writes per-stage output tensors,
 * simulate.json and (if emit_traces) bus traces into out_dir. */
OGMI_API ogmi_status ogmi_simulate(ogmi_net* net, const char* input_path, const char* out_dir,
                                   uint64_t seed, int emit_traces, ogmi_sim_summary* summary);

typedef struct ogmi_verify_summary {
    uint64_t trials;
    uint64_t failures;
    uint64_t first_fail_seed;
    char first_fail_detail[512];
} ogmi_verify_summary;

/* Run `trials` randomized oracle-equivalence trials. Returns OGMI_OK when
 * every trial matched bit-exactly, OGMI_E_VERIFY otherwise. */
OGMI_API ogmi_status ogmi_verify(ogmi_net* net, uint64_t trials, uint64_t seed,
                                 ogmi_verify_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* ORIGAMI_H */
