#include "solarfc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "solarfc/clearsky.hpp"
#include "solarfc/errors.hpp"
#include "solarfc/evaluation.hpp"
#include "solarfc/features.hpp"
#include "solarfc/rnn.hpp"
#include "solarfc/surfrad.hpp"
#include "solarfc/training.hpp"

namespace solarfc {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "subcommand",  "site_id",        "lat",
      "lon",         "elev",           "in_dir",
      "years",       "out",            "from",
      "to",          "step",           "pressure",
      "obs",         "clearsky",       "seq_len",
      "stride",      "horizons",       "train_years",
      "test_years",  "ghi_floor",      "kt_max",
      "gap_max",     "std_floor",      "synthetic",
      "synthetic_start", "synthetic_train_days", "synthetic_test_days",
      "dataset",     "mode",           "epochs",
      "batch",       "lr",             "seed",
      "hidden",      "checkpoint",     "report",
      "baseline",    "out_table",      "out_csv",
      "train_report", "out_loss",      "out_daily",
  };
  return keys;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) {
    throw config_error("unknown configuration key '" + key + "'");
  }
  kv_[key] = value;
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw missing_input_error("cannot open config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw format_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) {
      throw config_error(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    // Flag overrides win: only fill keys not already set.
    if (!kv_.count(key)) kv_[key] = value;
  }
}

bool RunConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string RunConfig::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw config_error("missing required configuration key '" + key + "'");
  return it->second;
}

std::string RunConfig::get_or(const std::string& key, std::string fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw config_error("key '" + key + "' is not a number: '" + it->second + "'");
  }
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (...) {
    throw config_error("key '" + key + "' is not an integer: '" + it->second + "'");
  }
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  std::istringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      throw config_error("key '" + key + "' has a non-integer entry: '" + item + "'");
    }
  }
  if (out.empty()) throw config_error("key '" + key + "' is an empty list");
  return out;
}

namespace {

SiteMeta site_from(const RunConfig& cfg) {
  SiteMeta site;
  site.site_id = cfg.get("site_id");
  site.latitude_deg = cfg.get_double("lat", 0.0);
  site.longitude_deg = cfg.get_double("lon", 0.0);
  site.elevation_m = cfg.get_double("elev", 0.0);
  site.validate();
  return site;
}

FeatureConstants constants_from(const RunConfig& cfg) {
  FeatureConstants k;
  k.ghi_floor = cfg.get_double("ghi_floor", k.ghi_floor);
  k.kt_max = cfg.get_double("kt_max", k.kt_max);
  k.gap_max = int(cfg.get_int("gap_max", k.gap_max));
  k.std_floor = cfg.get_double("std_floor", k.std_floor);
  k.seq_len = int(cfg.get_int("seq_len", k.seq_len));
  k.window_stride = int(cfg.get_int("stride", k.window_stride));
  if (k.ghi_floor <= 0.0 || k.kt_max <= 0.0 || k.gap_max < 0 || k.std_floor <= 0.0 ||
      k.seq_len <= 0 || k.window_stride <= 0) {
    throw config_error("feature constants out of range");
  }
  return k;
}

void require_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw missing_input_error("input file does not exist: " + path);
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw missing_input_error("cannot write output file " + path);
  return out;
}

void write_manifest(const std::string& subcommand, const RunConfig& cfg,
                    const std::string& primary_out) {
  std::ofstream out(primary_out + ".manifest");
  if (!out) throw missing_input_error("cannot write manifest next to " + primary_out);
  out << "# solarfc run manifest (replayable config snapshot)\n";
  out << "subcommand=" << subcommand << "\n";
  for (const auto& [key, value] : cfg.entries()) {
    if (key != "subcommand") out << key << "=" << value << "\n";
  }
}

TrainConfig train_config_from(const RunConfig& cfg, const DatasetSplit& split) {
  TrainConfig tc;
  const std::string mode = cfg.get_or("mode", "multi");
  if (mode.rfind("fixed:", 0) == 0) {
    tc.mode = TrainConfig::Mode::FixedHorizon;
    try {
      tc.fixed_horizon_hours = std::stoi(mode.substr(6));
    } catch (...) {
      throw config_error("bad mode '" + mode + "', expected fixed:<hours>");
    }
  } else if (mode == "multi" || mode.rfind("multi:", 0) == 0) {
    tc.mode = TrainConfig::Mode::MultiHorizon;
    if (mode.rfind("multi:", 0) == 0) {
      std::vector<int> listed;
      std::istringstream ss(mode.substr(6));
      std::string item;
      while (std::getline(ss, item, ',')) listed.push_back(std::stoi(item));
      if (listed != split.horizons) {
        throw config_error("mode '" + mode + "' does not match the dataset horizon set");
      }
    }
  } else {
    throw config_error("bad mode '" + mode + "', expected fixed:<h> or multi[:h,h,...]");
  }
  tc.epochs = int(cfg.get_int("epochs", tc.epochs));
  tc.batch_size = int(cfg.get_int("batch", tc.batch_size));
  tc.learning_rate = cfg.get_double("lr", tc.learning_rate);
  tc.seed = std::uint64_t(cfg.get_int("seed", 42));
  tc.hidden_dim = int(cfg.get_int("hidden", tc.hidden_dim));
  tc.validate();
  return tc;
}

std::vector<ClearSkyPoint> read_clearsky_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw missing_input_error("cannot open clear-sky CSV " + path);
  std::string line;
  if (!std::getline(in, line) || line != "timestamp,ghi_clear,direct_h,diffuse_h") {
    throw format_error("unexpected clear-sky CSV header in " + path);
  }
  std::vector<ClearSkyPoint> points;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string ts, g, d, f;
    if (!std::getline(ls, ts, ',') || !std::getline(ls, g, ',') || !std::getline(ls, d, ',') ||
        !std::getline(ls, f)) {
      throw format_error(path + ":" + std::to_string(line_no) + ": expected 4 cells");
    }
    ClearSkyPoint p;
    p.timestamp = parse_iso(ts);
    p.ghi_clear = std::stod(g);
    p.direct_h = std::stod(d);
    p.diffuse_h = std::stod(f);
    points.push_back(p);
  }
  return points;
}

void run_ingest(const RunConfig& cfg) {
  SiteMeta site = site_from(cfg);
  auto records = load_range(cfg.get("in_dir"), site, cfg.get_int_list("years"));
  const std::string out_path = cfg.get("out");
  auto out = open_output(out_path);
  write_canonical_csv(out, records);
  write_manifest("ingest", cfg, out_path);
}

void run_clearsky(const RunConfig& cfg) {
  SiteMeta site = site_from(cfg);
  EpochMinute from = parse_iso(cfg.get("from"));
  EpochMinute to = parse_iso(cfg.get("to"));
  if (to < from) throw config_error("'to' precedes 'from'");
  std::string step = cfg.get_or("step", "1min");
  if (!step.empty() && step.back() == 'n' && step.size() > 3 &&
      step.substr(step.size() - 3) == "min") {
    step = step.substr(0, step.size() - 3);
  }
  int step_min = 1;
  try {
    step_min = std::stoi(step);
  } catch (...) {
    throw config_error("bad step '" + cfg.get("step") + "', expected e.g. 1min");
  }
  if (step_min <= 0) throw config_error("step must be positive");

  AtmosParams atmos;
  atmos.pressure_mb = cfg.get_double("pressure", atmos.pressure_mb);

  const std::string out_path = cfg.get("out");
  auto out = open_output(out_path);
  out << "timestamp,ghi_clear,direct_h,diffuse_h\n";
  char buf[128];
  for (EpochMinute t = from; t <= to; t += step_min) {
    ClearSkyPoint p = clear_sky_at(t, site, atmos);
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", format_iso(t).c_str(), p.ghi_clear,
                  p.direct_h, p.diffuse_h);
    out << buf;
  }
  write_manifest("clearsky", cfg, out_path);
}

void run_features(const RunConfig& cfg) {
  FeatureConstants k = constants_from(cfg);
  std::vector<int> horizons =
      cfg.has("horizons") ? cfg.get_int_list("horizons") : std::vector<int>{1, 2, 3, 4};
  for (int h : horizons) {
    if (h < 1) throw config_error("horizons must be positive hours");
  }

  DatasetSplit split;
  if (cfg.get_int("synthetic", 0) != 0) {
    SiteMeta site = site_from(cfg);
    const EpochMinute start = parse_iso(cfg.get_or("synthetic_start", "2010-05-01T00:00Z"));
    const int train_days = int(cfg.get_int("synthetic_train_days", 90));
    const int test_days = int(cfg.get_int("synthetic_test_days", 30));
    const std::uint64_t seed = std::uint64_t(cfg.get_int("seed", 42));

    const int start_year = year_of(start);
    CivilTime c = to_civil(start);
    c.year += 1;  // test block one year later -> disjoint year split
    const EpochMinute test_start = to_epoch_minute(c);

    AtmosParams atmos;
    std::vector<WindowedSample> samples;
    struct Block {
      EpochMinute start;
      int days;
      std::uint64_t seed;
    };
    for (const Block& b : {Block{start, train_days, seed}, Block{test_start, test_days, seed + 1}}) {
      auto records = generate_synthetic(site, b.start, b.days, b.seed);
      std::vector<ClearSkyPoint> cs;
      cs.reserve(records.size());
      for (const auto& r : records) cs.push_back(clear_sky_at(r.timestamp, site, atmos));
      auto features = join_features(records, cs, k);
      auto windows = build_windows(features, k, horizons);
      samples.insert(samples.end(), std::make_move_iterator(windows.begin()),
                     std::make_move_iterator(windows.end()));
    }
    split = split_by_year(std::move(samples), {start_year}, {start_year + 1}, k);
    split.site_id = site.site_id;
  } else {
    require_file(cfg.get("obs"));
    require_file(cfg.get("clearsky"));
    std::ifstream obs_in(cfg.get("obs"));
    auto records = read_canonical_csv(obs_in);
    auto clearsky = read_clearsky_csv(cfg.get("clearsky"));
    std::vector<int> train_years = cfg.get_int_list("train_years");
    auto imputed = impute(records, k, train_years);
    auto features = join_features(imputed, clearsky, k);
    auto samples = build_windows(features, k, horizons);
    split = split_by_year(std::move(samples), train_years, cfg.get_int_list("test_years"), k);
    split.site_id = cfg.get_or("site_id", "unknown");
  }
  split.horizons = horizons;
  split.constants = k;
  if (cfg.has("train_years")) split.train_years = cfg.get_int_list("train_years");
  if (cfg.has("test_years")) split.test_years = cfg.get_int_list("test_years");

  const std::string out_path = cfg.get("out");
  save_dataset(out_path, split);
  write_manifest("features", cfg, out_path);
}

void run_train(const RunConfig& cfg) {
  require_file(cfg.get("dataset"));
  DatasetSplit split = load_dataset(cfg.get("dataset"));
  TrainConfig tc = train_config_from(cfg, split);
  auto [params, report] = train(tc, split);
  const std::string checkpoint_path = cfg.get("checkpoint");
  save_checkpoint(checkpoint_path, params);
  if (cfg.has("report")) write_train_report_csv(cfg.get("report"), report);
  write_manifest("train", cfg, checkpoint_path);
}

void run_evaluate(const RunConfig& cfg) {
  require_file(cfg.get("checkpoint"));
  require_file(cfg.get("dataset"));
  DatasetSplit split = load_dataset(cfg.get("dataset"));
  RnnParams params = load_checkpoint(cfg.get("checkpoint"));
  TrainConfig tc = train_config_from(cfg, split);
  std::vector<int> cols = target_columns(tc, split.horizons);
  if (int(cols.size()) != params.w_yh.rows()) {
    throw config_error("checkpoint output dimension does not match the requested mode");
  }
  if (split.test.empty()) throw config_error("dataset has no test samples");

  EvalReport model =
      evaluate(params, split.test, split.norm, split.horizons, cols, split.constants.kt_max);
  model.site_id = split.site_id;
  model.test_years = split.test_years;

  std::vector<EvalReport> reports{model};
  std::vector<EvalReport> baselines;
  if (cfg.get_int("baseline", 1) != 0) {
    EvalReport base = persistence_baseline(split.test, split.norm, split.horizons, cols);
    base.site_id = split.site_id;
    base.test_years = split.test_years;
    baselines.push_back(std::move(base));
  }

  const std::string csv_path = cfg.get("out_csv");
  open_output(csv_path) << render_tables_csv(reports, baselines);
  if (cfg.has("out_table")) open_output(cfg.get("out_table")) << render_tables(reports, baselines);
  write_manifest("evaluate", cfg, csv_path);
}

void run_predict(const RunConfig& cfg) {
  require_file(cfg.get("checkpoint"));
  require_file(cfg.get("dataset"));
  DatasetSplit split = load_dataset(cfg.get("dataset"));
  RnnParams params = load_checkpoint(cfg.get("checkpoint"));
  TrainConfig tc = train_config_from(cfg, split);
  std::vector<int> cols = target_columns(tc, split.horizons);
  if (int(cols.size()) != params.w_yh.rows()) {
    throw config_error("checkpoint output dimension does not match the requested mode");
  }

  const std::string out_path = cfg.get("out");
  auto out = open_output(out_path);
  out << "anchor_time";
  for (int c : cols) out << ",kt_" << split.horizons[size_t(c)] << "h"
                         << ",ghi_" << split.horizons[size_t(c)] << "h";
  out << '\n';
  char buf[64];
  for (const auto& s : split.test) {
    Vector cs(cols.size());
    for (size_t j = 0; j < cols.size(); ++j) cs(Eigen::Index(j)) = s.clearsky_at_horizons(cols[j]);
    auto preds = predict(params, s.inputs, split.norm, cs, cols, split.constants.kt_max);
    out << format_iso(s.anchor_time);
    for (const auto& p : preds) {
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", p.kt, p.ghi);
      out << buf;
    }
    out << '\n';
  }
  write_manifest("predict", cfg, out_path);
}

void run_report(const RunConfig& cfg) {
  // Loss-curve CSV: a stable-named copy of the training report.
  const std::string out_loss = cfg.get("out_loss");
  {
    require_file(cfg.get("train_report"));
    std::ifstream in(cfg.get("train_report"));
    std::ofstream out = open_output(out_loss);
    out << in.rdbuf();
  }

  // Daily means of observed GHI vs clear-sky GHI.
  if (cfg.has("obs") && cfg.has("clearsky")) {
    require_file(cfg.get("obs"));
    require_file(cfg.get("clearsky"));
    std::ifstream obs_in(cfg.get("obs"));
    auto records = read_canonical_csv(obs_in);
    auto clearsky = read_clearsky_csv(cfg.get("clearsky"));

    std::map<EpochMinute, std::pair<double, std::size_t>> obs_daily, cs_daily;  // day -> sum,count
    for (const auto& r : records) {
      if (r.has(0)) {
        auto& [sum, n] = obs_daily[r.timestamp / 1440];
        sum += r.values[0];
        ++n;
      }
    }
    for (const auto& p : clearsky) {
      auto& [sum, n] = cs_daily[p.timestamp / 1440];
      sum += p.ghi_clear;
      ++n;
    }
    auto out = open_output(cfg.get("out_daily"));
    out << "date,mean_dw_solar,mean_ghi_clear\n";
    char buf[128];
    for (const auto& [day, obs] : obs_daily) {
      auto it = cs_daily.find(day);
      if (it == cs_daily.end()) continue;
      CivilTime c = to_civil(day * 1440);
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d,%.17g,%.17g\n", c.year, c.month, c.day,
                    obs.first / double(obs.second), it->second.first / double(it->second.second));
      out << buf;
    }
  }
  write_manifest("report", cfg, out_loss);
}

}  // namespace

void run_subcommand(const std::string& name, const RunConfig& config) {
  if (name == "ingest") return run_ingest(config);
  if (name == "clearsky") return run_clearsky(config);
  if (name == "features") return run_features(config);
  if (name == "train") return run_train(config);
  if (name == "evaluate") return run_evaluate(config);
  if (name == "predict") return run_predict(config);
  if (name == "report") return run_report(config);
  throw config_error("unknown subcommand '" + name + "'");
}

void run_manifest(const std::string& manifest_path) {
  RunConfig cfg;
  cfg.merge_file(manifest_path);
  run_subcommand(cfg.get("subcommand"), cfg);
}

}  // namespace solarfc
