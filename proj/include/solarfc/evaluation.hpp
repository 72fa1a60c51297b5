#pragma once

#include <string>
#include <vector>

#include "solarfc/features.hpp"
#include "solarfc/rnn.hpp"

namespace solarfc {

struct EvalReport {
  std::string label;               // e.g. "rnn" or "persistence"
  std::string site_id;
  std::vector<int> test_years;
  std::vector<int> horizons;       // hours
  std::vector<double> rmse_norm;   // normalized-target units
  std::vector<double> rmse_kt;     // denormalized Kt units
  std::vector<double> rmse_wm2;    // W/m^2 via per-sample clear-sky scaling
  double mean_rmse_norm = 0.0;
  double mean_rmse_kt = 0.0;
  double mean_rmse_wm2 = 0.0;
  std::size_t sample_count = 0;
};

// Score a prediction matrix [n_samples x n_horizons] of denormalized Kt_a
// values against the test samples. Both the model and the persistence
// baseline go through this one path.
EvalReport score_predictions(const Matrix& kt_predictions,
                             const std::vector<WindowedSample>& test, const NormStats& stats,
                             const std::vector<int>& horizons,
                             const std::vector<int>& columns, std::string label);

// Run the checkpoint over the test split and score it. `columns` selects
// the target columns the checkpoint was trained on (empty = all).
EvalReport evaluate(const RnnParams& params, const std::vector<WindowedSample>& test,
                    const NormStats& stats, const std::vector<int>& horizons,
                    const std::vector<int>& columns = {}, double kt_max = 2.0);

// Kt persistence: forecast Kt_a(h) = Kt_i(anchor) for every horizon.
EvalReport persistence_baseline(const std::vector<WindowedSample>& test, const NormStats& stats,
                                const std::vector<int>& horizons,
                                const std::vector<int>& columns = {});

// Benchmark table: rows = horizons + "Mean RMSE", model/baseline column
// pairs per report. Returns human-readable text; the CSV mirror goes
// through render_tables_csv.
std::string render_tables(const std::vector<EvalReport>& reports,
                          const std::vector<EvalReport>& baselines);
std::string render_tables_csv(const std::vector<EvalReport>& reports,
                              const std::vector<EvalReport>& baselines);

}  // namespace solarfc
