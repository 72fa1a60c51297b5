#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "solarfc/features.hpp"
#include "solarfc/rnn.hpp"

namespace solarfc {

struct TrainConfig {
  // fixed_horizon trains one output against a single horizon column;
  // multi_horizon trains all configured horizons jointly.
  enum class Mode { FixedHorizon, MultiHorizon };
  Mode mode = Mode::MultiHorizon;
  int fixed_horizon_hours = 1;     // used in FixedHorizon mode
  int epochs = 1000;
  int batch_size = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
  int hidden_dim = 15;

  void validate() const;
};

struct TrainReport {
  std::vector<double> train_mse;  // one entry per epoch
  std::vector<double> test_mse;
  double wall_seconds = 0.0;
};

// p <- p - lr * g, elementwise over the five arrays.
RnnParams sgd_step(const RnnParams& params, const Gradients& grads, double lr);

// Mini-batch SGD: seeded shuffle each epoch, batch gradients averaged,
// last partial batch kept, then a full train and test MSE pass. The test
// split never influences the parameters. Deterministic for a fixed
// (config, split).
std::pair<RnnParams, TrainReport> train(const TrainConfig& config, const DatasetSplit& split);

// Which target columns the mode selects (indices into split.horizons).
std::vector<int> target_columns(const TrainConfig& config, const std::vector<int>& horizons);

struct Prediction {
  double kt = 0.0;   // denormalized Kt_a, clipped to [0, kt_max]
  double ghi = 0.0;  // W/m^2
};

// Forward pass on one normalized window, denormalized to Kt and scaled by
// the per-horizon clear-sky values into a GHI forecast. `columns` names
// the target columns the checkpoint was trained on (empty = all).
std::vector<Prediction> predict(const RnnParams& params, const Matrix& window,
                                const NormStats& stats, const Vector& clearsky_at_horizons,
                                const std::vector<int>& columns = {}, double kt_max = 2.0);

void write_train_report_csv(const std::string& path, const TrainReport& report);

}  // namespace solarfc
