#include "solarfc/solarfc.h"

#include <exception>
#include <string>

#include "solarfc/errors.hpp"
#include "solarfc/pipeline.hpp"

struct sf_ctx {
  solarfc::RunConfig config;
  std::string last_error;
};

namespace {

sf_status status_from(solarfc::ErrorKind kind) {
  using solarfc::ErrorKind;
  switch (kind) {
    case ErrorKind::Format:
      return SF_ERR_FORMAT;
    case ErrorKind::MissingInput:
      return SF_ERR_MISSING_INPUT;
    case ErrorKind::Config:
    case ErrorKind::Data:
      return SF_ERR_CONFIG;
    case ErrorKind::Numeric:
      return SF_ERR_NUMERIC;
  }
  return SF_ERR_INTERNAL;
}

template <typename Fn>
sf_status guarded(sf_ctx* ctx, Fn&& fn) {
  if (!ctx) return SF_ERR_CONFIG;
  try {
    fn();
    ctx->last_error.clear();
    return SF_OK;
  } catch (const solarfc::Error& e) {
    ctx->last_error = e.what();
    return status_from(e.kind());
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return SF_ERR_INTERNAL;
  } catch (...) {
    ctx->last_error = "unknown error";
    return SF_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

sf_ctx* sf_ctx_new(void) {
  try {
    return new sf_ctx();
  } catch (...) {
    return nullptr;
  }
}

void sf_ctx_free(sf_ctx* ctx) { delete ctx; }

sf_status sf_ctx_set(sf_ctx* ctx, const char* key, const char* value) {
  return guarded(ctx, [&] {
    if (!key || !value) throw solarfc::config_error("null key or value");
    ctx->config.set(key, value);
  });
}

sf_status sf_ctx_load_config(sf_ctx* ctx, const char* path) {
  return guarded(ctx, [&] {
    if (!path) throw solarfc::config_error("null config path");
    ctx->config.merge_file(path);
  });
}

sf_status sf_run(sf_ctx* ctx, const char* subcommand) {
  return guarded(ctx, [&] {
    if (!subcommand) throw solarfc::config_error("null subcommand");
    solarfc::run_subcommand(subcommand, ctx->config);
  });
}

sf_status sf_run_manifest(sf_ctx* ctx, const char* manifest_path) {
  return guarded(ctx, [&] {
    if (!manifest_path) throw solarfc::config_error("null manifest path");
    solarfc::run_manifest(manifest_path);
  });
}

const char* sf_last_error(const sf_ctx* ctx) {
  if (!ctx) return "null context";
  return ctx->last_error.c_str();
}

const char* sf_version(void) { return "1.0.0"; }

}  // extern "C"
