#include "solarfc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "solarfc/errors.hpp"
#include "solarfc/rng.hpp"

namespace solarfc {

void TrainConfig::validate() const {
  if (epochs < 0) throw config_error("epochs must be >= 0");
  if (batch_size <= 0) throw config_error("batch_size must be positive");
  if (learning_rate <= 0.0) throw config_error("learning_rate must be positive");
  if (hidden_dim <= 0) throw config_error("hidden_dim must be positive");
  if (mode == Mode::FixedHorizon && (fixed_horizon_hours < 1 || fixed_horizon_hours > 4)) {
    throw config_error("fixed horizon must be one of 1..4 hours");
  }
}

std::vector<int> target_columns(const TrainConfig& config, const std::vector<int>& horizons) {
  if (config.mode == TrainConfig::Mode::MultiHorizon) {
    std::vector<int> all(horizons.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  auto it = std::find(horizons.begin(), horizons.end(), config.fixed_horizon_hours);
  if (it == horizons.end()) {
    throw config_error("dataset does not contain the " +
                       std::to_string(config.fixed_horizon_hours) + "-hour horizon");
  }
  return {int(it - horizons.begin())};
}

RnnParams sgd_step(const RnnParams& params, const Gradients& grads, double lr) {
  RnnParams next;
  next.w_hx = params.w_hx - lr * grads.w_hx;
  next.w_hh = params.w_hh - lr * grads.w_hh;
  next.b_h = params.b_h - lr * grads.b_h;
  next.w_yh = params.w_yh - lr * grads.w_yh;
  next.b_y = params.b_y - lr * grads.b_y;
  if (!next.all_finite()) {
    throw numeric_error("non-finite parameters after SGD step (learning rate too high?)");
  }
  return next;
}

namespace {

Vector select(const Vector& v, const std::vector<int>& cols) {
  Vector out(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) out(int(i)) = v(cols[i]);
  return out;
}

double dataset_mse(const RnnParams& params, const std::vector<WindowedSample>& samples,
                   const std::vector<int>& cols) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) {
    ForwardTrace trace = forward(params, s.inputs);
    total += mse(select(s.targets, cols), trace.output);
  }
  return total / double(samples.size());
}

}  // namespace

std::pair<RnnParams, TrainReport> train(const TrainConfig& config, const DatasetSplit& split) {
  config.validate();
  if (split.train.empty()) throw config_error("training split is empty");

  const std::vector<int> cols = target_columns(config, split.horizons);

  RnnDims dims;
  dims.input_dim = int(split.train.front().inputs.cols());
  dims.hidden_dim = config.hidden_dim;
  dims.output_dim = int(cols.size());
  dims.seq_len = split.constants.seq_len;
  dims.validate();

  RnnParams params = init_params(dims, config.seed);
  Rng shuffle_rng(config.seed ^ 0x5f5f5f5f5f5f5f5fULL);

  TrainReport report;
  report.train_mse.reserve(size_t(config.epochs));
  report.test_mse.reserve(size_t(config.epochs));
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t batch_start = 0; batch_start < order.size();
         batch_start += std::size_t(config.batch_size)) {
      const std::size_t batch_end =
          std::min(order.size(), batch_start + std::size_t(config.batch_size));
      Gradients acc;
      bool first = true;
      // Fixed iteration order keeps the reduction bitwise deterministic.
      for (std::size_t i = batch_start; i < batch_end; ++i) {
        const WindowedSample& s = split.train[order[i]];
        ForwardTrace trace = forward(params, s.inputs);
        auto [loss, g] = bptt(params, trace, select(s.targets, cols));
        (void)loss;
        if (first) {
          acc = std::move(g);
          first = false;
        } else {
          acc.w_hx += g.w_hx;
          acc.w_hh += g.w_hh;
          acc.b_h += g.b_h;
          acc.w_yh += g.w_yh;
          acc.b_y += g.b_y;
        }
      }
      const double scale = 1.0 / double(batch_end - batch_start);
      acc.w_hx *= scale;
      acc.w_hh *= scale;
      acc.b_h *= scale;
      acc.w_yh *= scale;
      acc.b_y *= scale;
      params = sgd_step(params, acc, config.learning_rate);
    }

    double train_loss = dataset_mse(params, split.train, cols);
    if (!std::isfinite(train_loss)) {
      throw numeric_error("training diverged at epoch " + std::to_string(epoch + 1));
    }
    report.train_mse.push_back(train_loss);
    report.test_mse.push_back(dataset_mse(params, split.test, cols));
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {std::move(params), std::move(report)};
}

std::vector<Prediction> predict(const RnnParams& params, const Matrix& window,
                                const NormStats& stats, const Vector& clearsky_at_horizons,
                                const std::vector<int>& columns, double kt_max) {
  std::vector<int> cols = columns;
  if (cols.empty()) {
    cols.resize(size_t(params.w_yh.rows()));
    std::iota(cols.begin(), cols.end(), 0);
  }
  if (int(cols.size()) != params.w_yh.rows()) {
    throw config_error("column selection does not match checkpoint output dimension");
  }
  if (clearsky_at_horizons.size() != params.w_yh.rows()) {
    throw config_error("clear-sky vector length does not match checkpoint output dimension");
  }

  ForwardTrace trace = forward(params, window);
  std::vector<Prediction> out(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) {
    double kt = denormalize_target(trace.output(int(i)), stats, cols[i]);
    kt = std::clamp(kt, 0.0, kt_max);
    out[i].kt = kt;
    out[i].ghi = kt * clearsky_at_horizons(int(i));
  }
  return out;
}

void write_train_report_csv(const std::string& path, const TrainReport& report) {
  std::ofstream out(path);
  if (!out) throw missing_input_error("cannot write report " + path);
  out << "epoch,train_mse,test_mse\n";
  char buf[64];
  for (size_t e = 0; e < report.train_mse.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", e + 1, report.train_mse[e],
                  report.test_mse[e]);
    out << buf;
  }
}

}  // namespace solarfc
