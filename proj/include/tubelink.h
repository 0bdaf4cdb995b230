/*
 * tubelink C API.
 *
 * Opaque-handle interface over the tubelet linking, fusion, scoring and
 * video-mAP evaluation core. Every function that can fail returns a
 * tl_status; a human-readable message for the most recent failure on the
 * calling thread is available via tl_last_error(). Handles are created
 * through out-parameters and released with the matching _destroy/_free
 * function. All strings are UTF-8.
 */
#ifndef TUBELINK_H
#define TUBELINK_H

#include <stddef.h>

#if defined(_WIN32)
#define TL_API __declspec(dllexport)
#elif defined(__GNUC__)
#define TL_API __attribute__((visibility("default")))
#else
#define TL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_VALIDATION = 1, /* malformed input, broken invariant, bad config */
  TL_ERR_IO = 2,         /* file open/read/write failure */
  TL_ERR_ARGUMENT = 3,   /* null handle or unknown key */
  TL_ERR_INTERNAL = 4
} tl_status;

typedef struct tl_config tl_config;             /* pipeline configuration */
typedef struct tl_corpus tl_corpus;             /* detection collection */
typedef struct tl_tubes tl_tubes;               /* labeled tube collection */
typedef struct tl_ground_truth tl_ground_truth; /* ground-truth collection */
typedef struct tl_report tl_report;             /* evaluation report */

TL_API const char* tl_version(void);

/* Message of the most recent failing call on this thread ("" if none). */
TL_API const char* tl_last_error(void);

/* Frees strings returned as char* out-parameters. */
TL_API void tl_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */

/* Fresh config with the library defaults (top_k 10, lambda1 2/3,
 * lambda2 1/3, nms 0.3, thresholds 0.1..0.5). NULL on allocation
 * failure. */
TL_API tl_config* tl_config_create(void);
TL_API void tl_config_destroy(tl_config* cfg);

/* Merge a JSON config (text or file) over the current values. */
TL_API tl_status tl_config_load_json(tl_config* cfg, const char* json_text);
TL_API tl_status tl_config_load_file(tl_config* cfg, const char* path);

/* Keyed setters. Keys use the JSON layout with dots, e.g. "link.top_k",
 * "link.nms_threshold", "link.empty_frame_policy", "fusion.lambda2",
 * "scoring.lambda1", "eval.iou_thresholds" (CSV string), "stream",
 * "workers", "seed", "synth.videos", "synth.frames", "synth.proposals",
 * "synth.classes", "synth.distractors", "synth.box_jitter",
 * "synth.score_noise", "synth.stream_bias", "synth.with_motion", ... */
TL_API tl_status tl_config_set_int(tl_config* cfg, const char* key,
                                   long long value);
TL_API tl_status tl_config_set_double(tl_config* cfg, const char* key,
                                      double value);
TL_API tl_status tl_config_set_string(tl_config* cfg, const char* key,
                                      const char* value);

/* Full config as pretty JSON; free with tl_string_free. */
TL_API tl_status tl_config_to_json(const tl_config* cfg, char** out_json);

/* ------------------------------------------------------------------ */
/* Detections                                                          */

TL_API tl_status tl_detections_read(const char* path, tl_corpus** out);
TL_API tl_status tl_detections_write(const tl_corpus* corpus,
                                     const char* path);
TL_API void tl_corpus_destroy(tl_corpus* corpus);
TL_API size_t tl_corpus_video_count(const tl_corpus* corpus);
/* Borrowed pointer, valid while the corpus lives; NULL when out of range. */
TL_API const char* tl_corpus_video_id(const tl_corpus* corpus, size_t index);

/* ------------------------------------------------------------------ */
/* Pipeline                                                            */

/* Greedy tubelet linking + TPN-only scoring over a whole corpus. */
TL_API tl_status tl_link(const tl_corpus* corpus, const tl_config* cfg,
                         tl_tubes** out);

/* Synthesizes a detection corpus and its ground truth to two files. */
TL_API tl_status tl_synthesize(const tl_config* cfg,
                               const char* detections_path,
                               const char* ground_truth_path);

/* Exact best linking path per video, as JSONL text
 * {"video_id","path","score"}; free with tl_string_free. */
TL_API tl_status tl_oracle_report(const tl_corpus* corpus,
                                  const tl_config* cfg, char** out_jsonl);

/* ------------------------------------------------------------------ */
/* Tubes                                                               */

TL_API tl_status tl_tubes_read(const char* path, tl_tubes** out);
TL_API tl_status tl_tubes_write(const tl_tubes* tubes, const char* path);
TL_API void tl_tubes_destroy(tl_tubes* tubes);
TL_API size_t tl_tubes_count(const tl_tubes* tubes);
TL_API size_t tl_tubes_video_count(const tl_tubes* tubes);
TL_API const char* tl_tubes_video_id(const tl_tubes* tubes, size_t index);
TL_API size_t tl_tubes_count_for_video(const tl_tubes* tubes,
                                       const char* video_id);

/* Folds a TUN score file into tube class scores (out-of-place). */
TL_API tl_status tl_rescore(const tl_tubes* tubes, const char* tun_path,
                            const tl_config* cfg, tl_tubes** out);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

TL_API tl_status tl_ground_truth_read(const char* path,
                                      tl_ground_truth** out);
TL_API void tl_ground_truth_destroy(tl_ground_truth* gt);

TL_API tl_status tl_evaluate(const tl_tubes* tubes,
                             const tl_ground_truth* gt, const tl_config* cfg,
                             tl_report** out);
TL_API void tl_report_destroy(tl_report* report);

TL_API size_t tl_report_threshold_count(const tl_report* report);
TL_API tl_status tl_report_threshold(const tl_report* report, size_t index,
                                     double* out_threshold);
TL_API tl_status tl_report_mean_ap(const tl_report* report, size_t index,
                                   double* out_mean_ap);
TL_API tl_status tl_report_accuracy(const tl_report* report,
                                    double* out_accuracy);

/* JSON object / plain-text table renderings; free with tl_string_free. */
TL_API tl_status tl_report_to_json(const tl_report* report, char** out_json);
TL_API tl_status tl_report_to_table(const tl_report* report,
                                    char** out_table);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TUBELINK_H */
