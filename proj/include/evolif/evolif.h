/* Stable C surface for the dialogue evaluation library.
 *
 * Conventions: every function returns an evolif_status; outputs are
 * heap-allocated NUL-terminated UTF-8 strings the caller releases with
 * evolif_string_free. On failure the thread-local message from
 * evolif_last_error describes the problem.
 */
#ifndef EVOLIF_H
#define EVOLIF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define EVOLIF_API __declspec(dllexport)
#else
#define EVOLIF_API __attribute__((visibility("default")))
#endif

typedef enum evolif_status {
  EVOLIF_OK = 0,
  EVOLIF_ERR_INVALID_ARGUMENT = 1,
  EVOLIF_ERR_DATA = 2,      /* bad corpus/config/transcript content */
  EVOLIF_ERR_TRANSPORT = 3, /* adapter endpoint unreachable */
  EVOLIF_ERR_INTERNAL = 4,
} evolif_status;

EVOLIF_API const char* evolif_version(void);

/* Message for the most recent failure on this thread; never NULL. */
EVOLIF_API const char* evolif_last_error(void);

EVOLIF_API void evolif_string_free(char* s);

/* ---- topic corpus ---- */

typedef struct evolif_corpus evolif_corpus;

/* json_text: array of {"id","description","keywords":[...]} objects. */
EVOLIF_API evolif_status evolif_corpus_load_json(const char* json_text, evolif_corpus** out);
EVOLIF_API evolif_status evolif_corpus_load_file(const char* path, evolif_corpus** out);
EVOLIF_API size_t evolif_corpus_size(const evolif_corpus* corpus);
EVOLIF_API void evolif_corpus_free(evolif_corpus* corpus);

/* ---- script generation ---- */

/* config_json: evolution config object, or NULL/"" for defaults. Writes a
 * JSONL script, one turn plan per line. */
EVOLIF_API evolif_status evolif_script_generate(const evolif_corpus* corpus,
                                                const char* config_json, uint64_t seed,
                                                uint32_t n_turns, char** out_jsonl);

/* Quality control over a generated script: pass iff the mean number of
 * active constraints over the first 20 turns is at least 2. */
EVOLIF_API evolif_status evolif_script_qc(const char* script_jsonl, int* out_pass,
                                          double* out_mean_constraints, char** out_reason);

/* ---- verification ---- */

/* instruction_json: array of constraint objects. Writes a JSON verdict
 * {"all_satisfied":bool,"verdicts":[{"constraint":...,"satisfied":...}]}. */
EVOLIF_API evolif_status evolif_verify(const char* instruction_json, const char* response_utf8,
                                       char** out_verdicts_json);

/* ---- sessions ---- */

/* adapter_spec:
 *   "oracle:always-pass" | "oracle:always-fail"
 *   "oracle:pattern:SFSF..."      (S = success turn, F = failure turn)
 *   "oracle:bernoulli:<p>:<seed>"
 *   "http:{...}"  JSON endpoint config: {"base_url","model","path",
 *                 "token_env","timeout_ms","max_retries"}
 * paraphrase_spec: NULL for template synthesis, or "http:{...}" as above.
 * session_config_json fields (all optional): "evolution" (object),
 * "patience_max", "system_prompt", "system_prompt_text", "record_latency".
 * Writes the transcript as JSONL (header line, turn lines, end line). */
EVOLIF_API evolif_status evolif_session_run(const evolif_corpus* corpus,
                                            const char* session_config_json, uint64_t seed,
                                            const char* adapter_spec, const char* paraphrase_spec,
                                            char** out_transcript_jsonl);

/* ---- scoring and reports ---- */

/* transcripts: n transcript JSONL documents. Writes the aggregate report
 * as JSON (fractions at full precision, survival indexed 1..cap). */
EVOLIF_API evolif_status evolif_score(const char* const* transcripts, size_t n, uint32_t cap,
                                      char** out_report_json);

/* format: "csv" (metric row, two-decimal percentages), "survival_csv",
 * or "svg". label names the row/series. */
EVOLIF_API evolif_status evolif_report_render(const char* report_json, const char* format,
                                              const char* label, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* EVOLIF_H */
