#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace solarfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RnnDims {
  int input_dim = 22;
  int hidden_dim = 15;
  int layer_count = 1;  // only 1 is supported
  int output_dim = 1;
  int seq_len = 60;

  void validate() const;
  bool operator==(const RnnDims&) const = default;
};

// The five trainable arrays of the single-layer Elman cell:
//   h(t) = relu(W_hx x(t) + W_hh h(t-1) + b_h)
//   y    = W_yh h(T) + b_y
struct RnnParams {
  Matrix w_hx;  // [H x D]
  Matrix w_hh;  // [H x H]
  Vector b_h;   // [H]
  Matrix w_yh;  // [O x H]
  Vector b_y;   // [O]

  RnnDims dims() const;
  bool all_finite() const;
};

using Gradients = RnnParams;  // same five shapes

struct ForwardTrace {
  Matrix inputs;   // [T x D]
  Matrix preact;   // [T x H] pre-activation sums
  Matrix hidden;   // [T x H] post-ReLU states
  Vector output;   // [O]
};

// Seeded uniform init scaled by 1/sqrt(fan-in); biases zero. Identical
// seed gives bitwise-identical parameters.
RnnParams init_params(const RnnDims& dims, std::uint64_t seed);

Vector relu(const Vector& v);

// Unroll over the whole sequence with h(0) = 0; output emitted at the
// final step only (identity output activation). The trace keeps every
// intermediate needed by bptt.
ForwardTrace forward(const RnnParams& params, const Matrix& sequence);

double mse(const Vector& targets, const Vector& predictions);

// Exact gradients of the final-step MSE loss through every time step.
// ReLU subgradient at 0 is taken as 0.
std::pair<double, Gradients> bptt(const RnnParams& params, const ForwardTrace& trace,
                                  const Vector& target);

// Checkpoint file: magic "SFCK", format-version byte, five dims as
// little-endian int32, then the five arrays as little-endian float64 in
// row-major order (w_hx, w_hh, b_h, w_yh, b_y).
void save_checkpoint(const std::string& path, const RnnParams& params);
RnnParams load_checkpoint(const std::string& path);

}  // namespace solarfc
