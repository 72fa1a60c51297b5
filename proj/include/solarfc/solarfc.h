#ifndef SOLARFC_H
#define SOLARFC_H

/* C API of the solar forecasting engine. The CLI and any foreign-language
 * binding drive the pipeline exclusively through this surface: an opaque
 * context handle carrying a key=value configuration, plus one entry point
 * per pipeline stage.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct sf_ctx sf_ctx;

typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_FORMAT = 1,        /* malformed input file */
  SF_ERR_MISSING_INPUT = 2, /* referenced file/directory does not exist */
  SF_ERR_CONFIG = 3,        /* invalid configuration or data */
  SF_ERR_NUMERIC = 4,       /* divergence / non-finite values */
  SF_ERR_INTERNAL = 5
} sf_status;

/* Create / destroy a context. sf_ctx_new returns NULL on allocation
 * failure. Contexts are independent; one context must not be used from
 * two threads at once. */
sf_ctx* sf_ctx_new(void);
void sf_ctx_free(sf_ctx* ctx);

/* Set one configuration key (e.g. "site_id", "lr", "out"). Unknown keys
 * are rejected with SF_ERR_CONFIG. */
sf_status sf_ctx_set(sf_ctx* ctx, const char* key, const char* value);

/* Merge a key=value config file; keys already set on the context win. */
sf_status sf_ctx_load_config(sf_ctx* ctx, const char* path);

/* Run one pipeline stage: "ingest", "clearsky", "features", "train",
 * "evaluate", "predict" or "report". Outputs and a replayable manifest
 * are written to the configured paths. */
sf_status sf_run(sf_ctx* ctx, const char* subcommand);

/* Re-run the stage recorded in a manifest written by a previous run. */
sf_status sf_run_manifest(sf_ctx* ctx, const char* manifest_path);

/* Message for the most recent failing call on this context. Owned by the
 * context; valid until the next call. Never NULL. */
const char* sf_last_error(const sf_ctx* ctx);

/* Library version, e.g. "1.0.0". */
const char* sf_version(void);

#ifdef __cplusplus
}
#endif

#endif /* SOLARFC_H */
