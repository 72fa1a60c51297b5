#include "solarfc/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "solarfc/errors.hpp"
#include "solarfc/rng.hpp"

namespace solarfc {

std::optional<double> compute_kt(double dw_solar, double ghi_clear, const FeatureConstants& k) {
  if (ghi_clear < k.ghi_floor) return std::nullopt;
  if (dw_solar < 0.0) dw_solar = 0.0;
  return std::clamp(dw_solar / ghi_clear, 0.0, k.kt_max);
}

std::optional<double> average_kt(const std::vector<FeatureRecord>& series, EpochMinute f_h) {
  if (series.empty()) return std::nullopt;
  EpochMinute base = series.front().timestamp;
  double sum = 0.0;
  for (int s = 0; s < 60; ++s) {
    EpochMinute minute = f_h - 59 + s;
    EpochMinute idx = minute - base;
    if (idx < 0 || idx >= EpochMinute(series.size())) return std::nullopt;
    const FeatureRecord& rec = series[size_t(idx)];
    if (rec.timestamp != minute || !rec.valid) return std::nullopt;
    sum += rec.x[kKtIndex];
  }
  return sum / 60.0;
}

std::vector<RadiationRecord> impute(const std::vector<RadiationRecord>& records,
                                    const FeatureConstants& k,
                                    const std::vector<int>& mean_years) {
  if (records.empty()) throw data_error("impute: empty record list");
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].timestamp <= records[i - 1].timestamp) {
      throw data_error("impute: records not strictly time-sorted");
    }
  }

  const EpochMinute t0 = records.front().timestamp;
  const EpochMinute t1 = records.back().timestamp;
  const size_t n = size_t(t1 - t0) + 1;

  std::vector<RadiationRecord> grid(n);
  for (size_t i = 0; i < n; ++i) {
    grid[i].timestamp = t0 + EpochMinute(i);
    grid[i].values.fill(std::nan(""));
  }
  for (const auto& rec : records) {
    RadiationRecord& slot = grid[size_t(rec.timestamp - t0)];
    slot.values = rec.values;
  }

  for (int f = 0; f < kFieldCount; ++f) {
    // Per-feature mean over the requested years (training period).
    double sum = 0.0, sum_all = 0.0;
    size_t count = 0, count_all = 0;
    for (const auto& rec : records) {
      if (!rec.has(f)) continue;
      double v = rec.values[size_t(f)];
      sum_all += v;
      ++count_all;
      if (mean_years.empty() ||
          std::find(mean_years.begin(), mean_years.end(), year_of(rec.timestamp)) !=
              mean_years.end()) {
        sum += v;
        ++count;
      }
    }
    if (count_all == 0) {
      throw data_error(std::string("unusable feature '") + kFieldNames[size_t(f)] +
                       "': absent for the entire period");
    }
    const double fill_mean = count > 0 ? sum / double(count) : sum_all / double(count_all);

    // Walk gaps between consecutive present minutes. Short gaps (at most
    // gap_max absent minutes, which also covers the 3-minute cadence of
    // pre-2009 files) are interpolated; long gaps and edges get the mean.
    // Fill provenance lands in the qc flag: 1 = interpolated, 2 = mean.
    std::ptrdiff_t prev = -1;
    for (size_t i = 0; i <= n; ++i) {
      bool present = i < n && std::isfinite(grid[i].values[size_t(f)]);
      if (i < n && !present) continue;
      std::ptrdiff_t cur = i == n ? std::ptrdiff_t(n) : std::ptrdiff_t(i);
      std::ptrdiff_t gap = cur - prev - 1;
      if (gap > 0) {
        bool interpolable = prev >= 0 && cur < std::ptrdiff_t(n) && gap <= k.gap_max;
        for (std::ptrdiff_t j = prev + 1; j < cur; ++j) {
          if (interpolable) {
            double a = grid[size_t(prev)].values[size_t(f)];
            double b = grid[size_t(cur)].values[size_t(f)];
            double w = double(j - prev) / double(cur - prev);
            grid[size_t(j)].values[size_t(f)] = a + (b - a) * w;
            grid[size_t(j)].qc[size_t(f)] = 1;
          } else {
            grid[size_t(j)].values[size_t(f)] = fill_mean;
            grid[size_t(j)].qc[size_t(f)] = 2;
          }
        }
      }
      prev = cur;
    }
  }
  return grid;
}

std::vector<FeatureRecord> join_features(const std::vector<RadiationRecord>& records,
                                         const std::vector<ClearSkyPoint>& clearsky,
                                         const FeatureConstants& k) {
  std::map<EpochMinute, const ClearSkyPoint*> by_time;
  for (const auto& p : clearsky) by_time[p.timestamp] = &p;

  std::vector<FeatureRecord> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    FeatureRecord fr;
    fr.timestamp = rec.timestamp;
    auto it = by_time.find(rec.timestamp);
    if (it != by_time.end()) {
      double ghi_clear = it->second->ghi_clear;
      bool complete = true;
      for (int f = 0; f < kFieldCount; ++f) {
        fr.x[f] = rec.values[size_t(f)];
        if (!std::isfinite(fr.x[f])) complete = false;
      }
      fr.x[kGhiClearIndex] = ghi_clear;
      auto kt = complete ? compute_kt(fr.x[0], ghi_clear, k) : std::nullopt;
      if (kt) {
        fr.x[kKtIndex] = *kt;
        fr.valid = true;
      } else {
        fr.x[kKtIndex] = std::nan("");
        fr.valid = false;
      }
    }
    out.push_back(fr);
  }
  return out;
}

std::vector<WindowedSample> build_windows(const std::vector<FeatureRecord>& features,
                                          const FeatureConstants& k,
                                          const std::vector<int>& horizons) {
  if (horizons.empty()) throw config_error("at least one forecast horizon is required");
  for (size_t i = 1; i < features.size(); ++i) {
    if (features[i].timestamp != features[i - 1].timestamp + 1) {
      throw data_error("build_windows: features not on a contiguous 1-minute grid");
    }
  }
  const int h_count = int(horizons.size());
  const int max_h = *std::max_element(horizons.begin(), horizons.end());
  const std::ptrdiff_t n = std::ptrdiff_t(features.size());

  std::vector<WindowedSample> samples;
  for (std::ptrdiff_t anchor = k.seq_len - 1; anchor + 60 * max_h < n;
       anchor += k.window_stride) {
    bool ok = true;
    for (std::ptrdiff_t t = anchor - k.seq_len + 1; t <= anchor && ok; ++t) {
      if (!features[size_t(t)].valid) ok = false;
    }
    if (!ok) continue;

    WindowedSample s;
    s.targets.resize(h_count);
    s.clearsky_at_horizons.resize(h_count);
    for (int hi = 0; hi < h_count && ok; ++hi) {
      std::ptrdiff_t end = anchor + 60 * horizons[size_t(hi)];
      double kt_sum = 0.0, cs_sum = 0.0;
      for (std::ptrdiff_t t = end - 59; t <= end && ok; ++t) {
        const FeatureRecord& fr = features[size_t(t)];
        if (!fr.valid) {
          ok = false;
          break;
        }
        kt_sum += fr.x[kKtIndex];
        cs_sum += fr.x[kGhiClearIndex];
      }
      s.targets(hi) = kt_sum / 60.0;
      s.clearsky_at_horizons(hi) = cs_sum / 60.0;
    }
    if (!ok) continue;

    s.inputs.resize(k.seq_len, kInputDim);
    for (int t = 0; t < k.seq_len; ++t) {
      const FeatureRecord& fr = features[size_t(anchor - k.seq_len + 1 + t)];
      for (int c = 0; c < kInputDim; ++c) s.inputs(t, c) = fr.x[c];
    }
    s.anchor_time = features[size_t(anchor)].timestamp;
    s.anchor_kt = features[size_t(anchor)].x[kKtIndex];
    samples.push_back(std::move(s));
  }
  return samples;
}

NormStats fit_norm_stats(const std::vector<WindowedSample>& train, double std_floor) {
  if (train.empty()) throw config_error("cannot fit normalization on an empty training set");
  const int h_count = int(train.front().targets.size());

  NormStats stats;
  stats.feature_mean = Vector::Zero(kInputDim);
  stats.feature_std = Vector::Zero(kInputDim);
  stats.target_mean = Vector::Zero(h_count);
  stats.target_std = Vector::Zero(h_count);

  std::size_t rows = 0;
  for (const auto& s : train) {
    stats.feature_mean += s.inputs.colwise().sum().transpose();
    rows += size_t(s.inputs.rows());
  }
  stats.feature_mean /= double(rows);
  for (const auto& s : train) {
    stats.feature_std +=
        (s.inputs.rowwise() - stats.feature_mean.transpose()).array().square().colwise().sum().matrix().transpose();
  }
  stats.feature_std = (stats.feature_std / double(rows)).cwiseSqrt();

  for (const auto& s : train) stats.target_mean += s.targets;
  stats.target_mean /= double(train.size());
  for (const auto& s : train) {
    stats.target_std += (s.targets - stats.target_mean).cwiseAbs2();
  }
  stats.target_std = (stats.target_std / double(train.size())).cwiseSqrt();

  for (int c = 0; c < kInputDim; ++c) {
    if (stats.feature_std(c) < std_floor) {
      throw data_error(std::string("degenerate feature column ") + std::to_string(c) +
                       (c < kFieldCount ? std::string(" (") + kFieldNames[size_t(c)] + ")" : "") +
                       ": std below floor");
    }
  }
  for (int h = 0; h < h_count; ++h) {
    if (stats.target_std(h) < std_floor) {
      throw data_error("degenerate target for horizon index " + std::to_string(h));
    }
  }
  return stats;
}

void normalize_samples(std::vector<WindowedSample>& samples, const NormStats& stats) {
  for (auto& s : samples) {
    s.inputs = (s.inputs.rowwise() - stats.feature_mean.transpose()).array().rowwise() /
               stats.feature_std.transpose().array();
    s.targets = (s.targets - stats.target_mean).cwiseQuotient(stats.target_std);
    if (!s.inputs.allFinite() || !s.targets.allFinite()) {
      throw numeric_error("non-finite normalized sample at " + format_iso(s.anchor_time));
    }
  }
}

double denormalize_target(double value, const NormStats& stats, int horizon_index) {
  return value * stats.target_std(horizon_index) + stats.target_mean(horizon_index);
}

DatasetSplit split_by_year(std::vector<WindowedSample> samples,
                           const std::vector<int>& train_years,
                           const std::vector<int>& test_years,
                           const FeatureConstants& constants) {
  std::set<int> train_set(train_years.begin(), train_years.end());
  std::set<int> test_set(test_years.begin(), test_years.end());
  if (train_set.empty()) throw config_error("train year set is empty");
  for (int y : test_set) {
    if (train_set.count(y)) {
      throw config_error("year " + std::to_string(y) + " appears in both train and test sets");
    }
  }

  DatasetSplit split;
  split.constants = constants;
  split.train_years = train_years;
  split.test_years = test_years;
  for (auto& s : samples) {
    int y = year_of(s.anchor_time);
    if (train_set.count(y)) {
      split.train.push_back(std::move(s));
    } else if (test_set.count(y)) {
      split.test.push_back(std::move(s));
    }
  }
  if (split.train.empty()) {
    throw config_error("no training samples fall in the requested train years");
  }
  split.norm = fit_norm_stats(split.train, constants.std_floor);
  normalize_samples(split.train, split.norm);
  normalize_samples(split.test, split.norm);
  return split;
}

namespace {

constexpr char kDatasetMagic[4] = {'S', 'F', 'D', 'S'};
constexpr std::uint8_t kDatasetVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (bits >> (8 * i)) & 0xFF;
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_samples(std::ostream& out, const std::vector<WindowedSample>& samples) {
  put_u32(out, std::uint32_t(samples.size()));
  for (const auto& s : samples) {
    put_f64(out, double(s.anchor_time));
    put_f64(out, s.anchor_kt);
    for (int t = 0; t < s.inputs.rows(); ++t)
      for (int c = 0; c < s.inputs.cols(); ++c) put_f64(out, s.inputs(t, c));
    for (int h = 0; h < s.targets.size(); ++h) put_f64(out, s.targets(h));
    for (int h = 0; h < s.clearsky_at_horizons.size(); ++h) put_f64(out, s.clearsky_at_horizons(h));
  }
}

std::vector<WindowedSample> get_samples(std::istream& in, int seq_len, int h_count) {
  std::uint32_t n = get_u32(in);
  std::vector<WindowedSample> samples(n);
  for (auto& s : samples) {
    s.anchor_time = EpochMinute(get_f64(in));
    s.anchor_kt = get_f64(in);
    s.inputs.resize(seq_len, kInputDim);
    for (int t = 0; t < seq_len; ++t)
      for (int c = 0; c < kInputDim; ++c) s.inputs(t, c) = get_f64(in);
    s.targets.resize(h_count);
    for (int h = 0; h < h_count; ++h) s.targets(h) = get_f64(in);
    s.clearsky_at_horizons.resize(h_count);
    for (int h = 0; h < h_count; ++h) s.clearsky_at_horizons(h) = get_f64(in);
  }
  return samples;
}

}  // namespace

void save_dataset(const std::string& path, const DatasetSplit& split) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw missing_input_error("cannot write dataset " + path);

  nlohmann::json manifest;
  manifest["site_id"] = split.site_id;
  manifest["horizons"] = split.horizons;
  manifest["train_years"] = split.train_years;
  manifest["test_years"] = split.test_years;
  manifest["seq_len"] = split.constants.seq_len;
  manifest["window_stride"] = split.constants.window_stride;
  manifest["ghi_floor"] = split.constants.ghi_floor;
  manifest["kt_max"] = split.constants.kt_max;
  manifest["gap_max"] = split.constants.gap_max;
  manifest["std_floor"] = split.constants.std_floor;
  const std::string text = manifest.dump();

  out.write(kDatasetMagic, 4);
  out.put(char(kDatasetVersion));
  put_u32(out, std::uint32_t(text.size()));
  out.write(text.data(), std::streamsize(text.size()));

  const int h_count = int(split.horizons.size());
  for (int c = 0; c < kInputDim; ++c) put_f64(out, split.norm.feature_mean(c));
  for (int c = 0; c < kInputDim; ++c) put_f64(out, split.norm.feature_std(c));
  for (int h = 0; h < h_count; ++h) put_f64(out, split.norm.target_mean(h));
  for (int h = 0; h < h_count; ++h) put_f64(out, split.norm.target_std(h));

  put_samples(out, split.train);
  put_samples(out, split.test);
  if (!out) throw missing_input_error("write failure on dataset " + path);
}

DatasetSplit load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw missing_input_error("cannot open dataset " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kDatasetMagic, 4) != 0) {
    throw format_error("not a dataset file: " + path);
  }
  if (in.get() != kDatasetVersion) throw format_error("unsupported dataset version in " + path);

  std::uint32_t text_len = get_u32(in);
  std::string text(text_len, '\0');
  in.read(text.data(), std::streamsize(text_len));
  if (!in) throw format_error("truncated dataset manifest in " + path);

  nlohmann::json manifest = nlohmann::json::parse(text);
  DatasetSplit split;
  split.site_id = manifest.at("site_id").get<std::string>();
  split.horizons = manifest.at("horizons").get<std::vector<int>>();
  split.train_years = manifest.at("train_years").get<std::vector<int>>();
  split.test_years = manifest.at("test_years").get<std::vector<int>>();
  split.constants.seq_len = manifest.at("seq_len").get<int>();
  split.constants.window_stride = manifest.at("window_stride").get<int>();
  split.constants.ghi_floor = manifest.at("ghi_floor").get<double>();
  split.constants.kt_max = manifest.at("kt_max").get<double>();
  split.constants.gap_max = manifest.at("gap_max").get<int>();
  split.constants.std_floor = manifest.at("std_floor").get<double>();

  const int h_count = int(split.horizons.size());
  split.norm.feature_mean.resize(kInputDim);
  split.norm.feature_std.resize(kInputDim);
  split.norm.target_mean.resize(h_count);
  split.norm.target_std.resize(h_count);
  for (int c = 0; c < kInputDim; ++c) split.norm.feature_mean(c) = get_f64(in);
  for (int c = 0; c < kInputDim; ++c) split.norm.feature_std(c) = get_f64(in);
  for (int h = 0; h < h_count; ++h) split.norm.target_mean(h) = get_f64(in);
  for (int h = 0; h < h_count; ++h) split.norm.target_std(h) = get_f64(in);

  split.train = get_samples(in, split.constants.seq_len, h_count);
  split.test = get_samples(in, split.constants.seq_len, h_count);
  if (!in) throw format_error("truncated dataset " + path);
  return split;
}

std::vector<RadiationRecord> generate_synthetic(const SiteMeta& site, EpochMinute start, int days,
                                                std::uint64_t seed) {
  if (days <= 0) throw config_error("synthetic generator needs at least one day");
  Rng rng(seed);
  AtmosParams atmos;

  const int n = days * 1440;
  std::vector<RadiationRecord> records;
  records.reserve(size_t(n));

  // Smooth AR(1) cloud process with a ~3 hour correlation time; the
  // clear-sky index the network has to learn to extrapolate.
  const double phi = std::exp(-1.0 / 180.0);
  const double mu = 0.72;
  const double sigma = 0.18 * std::sqrt(1.0 - phi * phi);
  double cloud = mu;

  double wind_dir = rng.uniform(0.0, 360.0);
  for (int i = 0; i < n; ++i) {
    EpochMinute ts = start + i;
    ClearSkyPoint cs = clear_sky_at(ts, site, atmos);
    cloud = mu + phi * (cloud - mu) + sigma * rng.normal();
    double kt = std::clamp(cloud, 0.05, 1.15);

    CivilTime c = to_civil(ts);
    double frac_day = (c.hour * 60.0 + c.minute) / 1440.0;
    double diurnal = std::sin(2.0 * M_PI * (frac_day - 0.25));

    RadiationRecord rec;
    rec.timestamp = ts;
    auto set = [&rec](const char* name, double v) {
      rec.values[size_t(field_index(name))] = v;
    };

    double ghi = kt * cs.ghi_clear;
    double temp = 12.0 + 9.0 * diurnal + rng.normal() * 0.15;
    double dw_ir = 295.0 + 1.2 * temp + rng.normal() * 0.5;
    double uw_ir = 330.0 + 1.5 * temp + rng.normal() * 0.5;
    set("dw_solar", ghi);
    set("uw_solar", 0.22 * ghi + rng.normal() * 0.3 * (ghi > 1.0 ? 1.0 : 0.0));
    set("direct_n", kt > 0.35 ? kt * kt * 0.9 * cs.ghi_clear : 0.05 * ghi);
    set("diffuse", std::max(0.0, ghi - kt * cs.direct_h));
    set("dw_ir", dw_ir);
    set("dw_casetemp", 273.15 + temp + rng.normal() * 0.1);
    set("dw_dometemp", 273.15 + temp + 0.4 + rng.normal() * 0.1);
    set("uw_ir", uw_ir);
    set("uw_casetemp", 273.15 + temp + 0.2 + rng.normal() * 0.1);
    set("uw_dometemp", 273.15 + temp + 0.6 + rng.normal() * 0.1);
    set("uvb", 0.15 * ghi + rng.normal() * 0.05);
    set("par", 0.45 * ghi + rng.normal() * 0.2);
    set("temp_air", temp);
    set("rh", std::clamp(55.0 - 18.0 * diurnal - 12.0 * (kt - mu) + rng.normal() * 1.0, 2.0, 100.0));
    set("windspd", std::abs(2.5 + 1.2 * diurnal + rng.normal() * 0.4));
    wind_dir = std::fmod(wind_dir + rng.normal() * 4.0 + 360.0, 360.0);
    set("winddir", wind_dir);
    set("pressure", 1013.0 - site.elevation_m / 8.5 + 2.0 * std::sin(2.0 * M_PI * i / (1440.0 * 5.0)) +
                        rng.normal() * 0.1);
    double netsolar = rec.values[size_t(field_index("dw_solar"))] -
                      rec.values[size_t(field_index("uw_solar"))];
    double netir = dw_ir - uw_ir;
    set("netsolar", netsolar);
    set("netir", netir);
    set("totalnet", netsolar + netir);
    records.push_back(rec);
  }
  return records;
}

}  // namespace solarfc
