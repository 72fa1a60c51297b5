// Command-line front end. Talks to the engine exclusively through the
// C API in solarfc.h.

#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "solarfc/solarfc.h"

namespace {

int exit_code_for(sf_status status) {
  switch (status) {
    case SF_OK:
      return 0;
    case SF_ERR_MISSING_INPUT:
      return 2;
    case SF_ERR_FORMAT:
    case SF_ERR_CONFIG:
      return 3;
    case SF_ERR_NUMERIC:
      return 4;
    default:
      return 1;
  }
}

struct SubcommandSpec {
  CLI::App* app = nullptr;
  // flag name -> config key; values land in `values` when the user sets them.
  std::map<std::string, std::string> values;
  std::string config_file;

  void option(const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"solarfc - solar irradiance forecasting pipeline"};
  cli.require_subcommand(1);

  std::map<std::string, SubcommandSpec> specs;
  auto make = [&](const std::string& name, const std::string& desc) -> SubcommandSpec& {
    SubcommandSpec& s = specs[name];
    s.app = cli.add_subcommand(name, desc);
    s.app->add_option("--config", s.config_file, "key=value config file (flags win)");
    return s;
  };

  auto add_site = [](SubcommandSpec& s) {
    s.option("--site", "site_id", "station identifier");
    s.option("--lat", "lat", "latitude, degrees north");
    s.option("--lon", "lon", "longitude, degrees east");
    s.option("--elev", "elev", "elevation, meters");
  };

  {
    auto& s = make("ingest", "parse station daily files into the canonical CSV");
    add_site(s);
    s.option("--in", "in_dir", "directory of station daily files");
    s.option("--years", "years", "comma-separated years to keep");
    s.option("--out", "out", "output CSV path");
  }
  {
    auto& s = make("clearsky", "emit Bird clear-sky GHI on a minute grid");
    add_site(s);
    s.option("--from", "from", "start timestamp, ISO-8601 UTC");
    s.option("--to", "to", "end timestamp, ISO-8601 UTC");
    s.option("--step", "step", "grid step, e.g. 1min");
    s.option("--pressure", "pressure", "station pressure, mb");
    s.option("--out", "out", "output CSV path");
  }
  {
    auto& s = make("features", "build the windowed train/test dataset");
    add_site(s);
    s.option("--obs", "obs", "canonical observation CSV");
    s.option("--clearsky", "clearsky", "clear-sky CSV");
    s.option("--seq-len", "seq_len", "input steps per window (minutes)");
    s.option("--stride", "stride", "minutes between anchors");
    s.option("--horizons", "horizons", "forecast horizons, hours (e.g. 1,2,3,4)");
    s.option("--train-years", "train_years", "training years");
    s.option("--test-years", "test_years", "test years");
    s.option("--ghi-floor", "ghi_floor", "clear-sky floor for Kt, W/m^2");
    s.option("--kt-max", "kt_max", "Kt clip value");
    s.option("--gap-max", "gap_max", "max interpolable gap, minutes");
    s.option("--synthetic", "synthetic", "1 = use the bundled synthetic generator");
    s.option("--synthetic-start", "synthetic_start", "synthetic series start timestamp");
    s.option("--synthetic-train-days", "synthetic_train_days", "synthetic training days");
    s.option("--synthetic-test-days", "synthetic_test_days", "synthetic test days");
    s.option("--seed", "seed", "generator seed");
    s.option("--out", "out", "output dataset path");
  }
  {
    auto& s = make("train", "train the recurrent network");
    s.option("--dataset", "dataset", "dataset file from `features`");
    s.option("--mode", "mode", "fixed:<h> or multi[:1,2,3,4]");
    s.option("--epochs", "epochs", "training epochs");
    s.option("--batch", "batch", "mini-batch size");
    s.option("--lr", "lr", "learning rate");
    s.option("--seed", "seed", "init/shuffle seed");
    s.option("--hidden", "hidden", "hidden units");
    s.option("--checkpoint", "checkpoint", "output checkpoint path");
    s.option("--report", "report", "output per-epoch loss CSV");
  }
  {
    auto& s = make("evaluate", "score a checkpoint on the test split");
    s.option("--checkpoint", "checkpoint", "trained checkpoint");
    s.option("--dataset", "dataset", "dataset file");
    s.option("--mode", "mode", "mode the checkpoint was trained with");
    s.option("--baseline", "baseline", "1 = include the Kt-persistence baseline");
    s.option("--out-table", "out_table", "output text table");
    s.option("--out-csv", "out_csv", "output CSV");
  }
  {
    auto& s = make("predict", "emit forecasts for every test sample");
    s.option("--checkpoint", "checkpoint", "trained checkpoint");
    s.option("--dataset", "dataset", "dataset file");
    s.option("--mode", "mode", "mode the checkpoint was trained with");
    s.option("--out", "out", "output CSV path");
  }
  {
    auto& s = make("report", "plot-ready loss-curve and daily-mean CSVs");
    s.option("--train-report", "train_report", "per-epoch loss CSV from `train`");
    s.option("--obs", "obs", "canonical observation CSV");
    s.option("--clearsky", "clearsky", "clear-sky CSV");
    s.option("--out-loss", "out_loss", "output loss-curve CSV");
    s.option("--out-daily", "out_daily", "output daily-means CSV");
  }

  std::string manifest_path;
  CLI::App* replay = cli.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("manifest", manifest_path, "manifest file from a previous run")->required();

  CLI11_PARSE(cli, argc, argv);

  sf_ctx* ctx = sf_ctx_new();
  if (!ctx) {
    std::fprintf(stderr, "error: out of memory\n");
    return 1;
  }

  sf_status status = SF_OK;
  if (replay->parsed()) {
    status = sf_run_manifest(ctx, manifest_path.c_str());
  } else {
    for (auto& [name, spec] : specs) {
      if (!spec.app->parsed()) continue;
      for (const auto& [key, value] : spec.values) {
        status = sf_ctx_set(ctx, key.c_str(), value.c_str());
        if (status != SF_OK) break;
      }
      if (status == SF_OK && !spec.config_file.empty()) {
        status = sf_ctx_load_config(ctx, spec.config_file.c_str());
      }
      if (status == SF_OK) status = sf_run(ctx, name.c_str());
      break;
    }
  }

  if (status != SF_OK) {
    std::fprintf(stderr, "error: %s\n", sf_last_error(ctx));
  }
  int code = exit_code_for(status);
  sf_ctx_free(ctx);
  return code;
}
