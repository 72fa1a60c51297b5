#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solarfc/clearsky.hpp"
#include "solarfc/rnn.hpp"
#include "solarfc/surfrad.hpp"
#include "solarfc/time.hpp"

namespace solarfc {

// Input features per minute: the 20 measured fields, plus clear-sky GHI,
// plus the instantaneous clear-sky index.
constexpr int kInputDim = kFieldCount + 2;
constexpr int kGhiClearIndex = kFieldCount;      // column 20
constexpr int kKtIndex = kFieldCount + 1;        // column 21

struct FeatureConstants {
  double ghi_floor = 10.0;   // W/m^2; below it Kt is undefined (night)
  double kt_max = 2.0;       // clip for cloud-enhancement spikes
  int gap_max = 10;          // minutes; longer gaps get the mean fill
  double std_floor = 1e-8;
  int seq_len = 60;          // input steps (minutes)
  int window_stride = 1;     // minutes between consecutive anchors
};

struct FeatureRecord {
  EpochMinute timestamp = 0;
  double x[kInputDim] = {};  // finite iff valid
  bool valid = false;        // all 22 entries finite and Kt defined
};

struct NormStats {
  Vector feature_mean;  // [22]
  Vector feature_std;   // [22]
  Vector target_mean;   // [H]
  Vector target_std;    // [H]
};

struct WindowedSample {
  Matrix inputs;              // [seq_len x 22], normalized
  Vector targets;             // [H], normalized Kt_a
  EpochMinute anchor_time = 0;
  double anchor_kt = 0.0;             // instantaneous Kt_i at the anchor minute
  Vector clearsky_at_horizons;        // [H] W/m^2, Eq.-6 window mean clear-sky GHI
};

struct DatasetSplit {
  std::vector<WindowedSample> train;
  std::vector<WindowedSample> test;
  NormStats norm;
  std::vector<int> horizons;  // hours
  FeatureConstants constants;
  std::string site_id;
  std::vector<int> train_years;
  std::vector<int> test_years;
};

// Kt_i = dw_solar / ghi_clear, clipped to [0, kt_max]. nullopt when the
// clear-sky value is below the floor (sample excluded upstream).
std::optional<double> compute_kt(double dw_solar, double ghi_clear, const FeatureConstants& k);

// Mean of the 60 one-minute Kt values in the hour ending at f_h
// (inclusive). nullopt if any minute is missing.
std::optional<double> average_kt(const std::vector<FeatureRecord>& series, EpochMinute f_h);

// Resample onto a 1-minute grid (linear interpolation of the source
// cadence, e.g. pre-2009 3-minute files), then fill gaps: runs of at most
// gap_max absent minutes by linear interpolation, longer runs with the
// per-feature mean over `mean_years` (empty = whole period). A feature
// absent for the entire period is an error.
std::vector<RadiationRecord> impute(const std::vector<RadiationRecord>& records,
                                    const FeatureConstants& k,
                                    const std::vector<int>& mean_years);

// Join imputed observations with per-minute clear-sky values and attach
// Kt. Records outside the clear-sky range are dropped.
std::vector<FeatureRecord> join_features(const std::vector<RadiationRecord>& records,
                                         const std::vector<ClearSkyPoint>& clearsky,
                                         const FeatureConstants& k);

// One raw (un-normalized) sample per anchor where the seq_len history and
// every horizon's hourly window are complete.
std::vector<WindowedSample> build_windows(const std::vector<FeatureRecord>& features,
                                          const FeatureConstants& k,
                                          const std::vector<int>& horizons);

NormStats fit_norm_stats(const std::vector<WindowedSample>& train, double std_floor);
void normalize_samples(std::vector<WindowedSample>& samples, const NormStats& stats);
double denormalize_target(double value, const NormStats& stats, int horizon_index);

// Partition raw samples by anchor year, fit NormStats on train only, and
// normalize both sides.
DatasetSplit split_by_year(std::vector<WindowedSample> samples,
                           const std::vector<int>& train_years,
                           const std::vector<int>& test_years,
                           const FeatureConstants& constants = {});

// Dataset file: magic "SFDS", version byte, JSON manifest (constants,
// horizons, years, site), then the samples as little-endian float64.
void save_dataset(const std::string& path, const DatasetSplit& split);
DatasetSplit load_dataset(const std::string& path);

// Deterministic synthetic station data: Bird clear-sky curve times a
// smooth seeded AR(1) cloud process, with plausible values for the other
// measured fields. Enables the full pipeline without NOAA data.
std::vector<RadiationRecord> generate_synthetic(const SiteMeta& site, EpochMinute start, int days,
                                                std::uint64_t seed);

}  // namespace solarfc
