#include "solarfc/rnn.hpp"

#include <cstring>
#include <fstream>

#include "solarfc/errors.hpp"
#include "solarfc/rng.hpp"

namespace solarfc {

void RnnDims::validate() const {
  if (input_dim <= 0 || hidden_dim <= 0 || output_dim <= 0 || seq_len <= 0 || layer_count <= 0) {
    throw config_error("all network dimensions must be positive");
  }
  if (layer_count != 1) {
    throw config_error("only layer_count = 1 is supported, got " + std::to_string(layer_count));
  }
}

RnnDims RnnParams::dims() const {
  RnnDims d;
  d.hidden_dim = int(w_hx.rows());
  d.input_dim = int(w_hx.cols());
  d.output_dim = int(w_yh.rows());
  d.layer_count = 1;
  return d;
}

bool RnnParams::all_finite() const {
  return w_hx.allFinite() && w_hh.allFinite() && b_h.allFinite() && w_yh.allFinite() &&
         b_y.allFinite();
}

RnnParams init_params(const RnnDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng(seed);
  auto uniform_matrix = [&rng](int rows, int cols, int fan_in) {
    double bound = 1.0 / std::sqrt(double(fan_in));
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
  };
  RnnParams p;
  p.w_hx = uniform_matrix(dims.hidden_dim, dims.input_dim, dims.input_dim);
  p.w_hh = uniform_matrix(dims.hidden_dim, dims.hidden_dim, dims.hidden_dim);
  p.b_h = Vector::Zero(dims.hidden_dim);
  p.w_yh = uniform_matrix(dims.output_dim, dims.hidden_dim, dims.hidden_dim);
  p.b_y = Vector::Zero(dims.output_dim);
  return p;
}

Vector relu(const Vector& v) { return v.cwiseMax(0.0); }

ForwardTrace forward(const RnnParams& params, const Matrix& sequence) {
  const int t_steps = int(sequence.rows());
  const int hidden = int(params.w_hx.rows());
  if (sequence.cols() != params.w_hx.cols()) {
    throw config_error("sequence width " + std::to_string(sequence.cols()) +
                       " does not match input_dim " + std::to_string(params.w_hx.cols()));
  }
  if (t_steps == 0) throw config_error("empty input sequence");

  ForwardTrace trace;
  trace.inputs = sequence;
  trace.preact.resize(t_steps, hidden);
  trace.hidden.resize(t_steps, hidden);

  Vector h = Vector::Zero(hidden);
  for (int t = 0; t < t_steps; ++t) {
    Vector pre = params.w_hx * sequence.row(t).transpose() + params.w_hh * h + params.b_h;
    h = relu(pre);
    trace.preact.row(t) = pre.transpose();
    trace.hidden.row(t) = h.transpose();
    if (!pre.allFinite()) {
      throw numeric_error("non-finite hidden pre-activation at step " + std::to_string(t));
    }
  }
  trace.output = params.w_yh * h + params.b_y;
  if (!trace.output.allFinite()) throw numeric_error("non-finite network output");
  return trace;
}

double mse(const Vector& targets, const Vector& predictions) {
  if (targets.size() != predictions.size()) {
    throw config_error("mse length mismatch: " + std::to_string(targets.size()) + " vs " +
                       std::to_string(predictions.size()));
  }
  if (targets.size() == 0) throw config_error("mse of empty vectors");
  return (targets - predictions).squaredNorm() / double(targets.size());
}

std::pair<double, Gradients> bptt(const RnnParams& params, const ForwardTrace& trace,
                                  const Vector& target) {
  const int t_steps = int(trace.inputs.rows());
  const int out_dim = int(params.w_yh.rows());
  if (target.size() != out_dim) {
    throw config_error("target length does not match output_dim");
  }

  Gradients g;
  g.w_hx = Matrix::Zero(params.w_hx.rows(), params.w_hx.cols());
  g.w_hh = Matrix::Zero(params.w_hh.rows(), params.w_hh.cols());
  g.b_h = Vector::Zero(params.b_h.size());
  g.w_yh = Matrix::Zero(params.w_yh.rows(), params.w_yh.cols());
  g.b_y = Vector::Zero(params.b_y.size());

  Vector residual = trace.output - target;
  double loss = residual.squaredNorm() / double(out_dim);

  Vector d_out = (2.0 / double(out_dim)) * residual;
  Vector h_last = trace.hidden.row(t_steps - 1).transpose();
  g.w_yh = d_out * h_last.transpose();
  g.b_y = d_out;

  // Backwards through time. d_h carries dL/dh(t).
  Vector d_h = params.w_yh.transpose() * d_out;
  for (int t = t_steps - 1; t >= 0; --t) {
    // ReLU mask; derivative at exactly 0 is 0.
    Vector d_pre = d_h;
    for (int i = 0; i < d_pre.size(); ++i) {
      if (trace.preact(t, i) <= 0.0) d_pre(i) = 0.0;
    }
    g.b_h += d_pre;
    g.w_hx += d_pre * trace.inputs.row(t);
    if (t > 0) {
      g.w_hh += d_pre * trace.hidden.row(t - 1);
      d_h = params.w_hh.transpose() * d_pre;
    }
  }

  if (!g.all_finite()) throw numeric_error("non-finite gradient");
  return {loss, g};
}

namespace {

constexpr char kCheckpointMagic[4] = {'S', 'F', 'C', 'K'};
constexpr std::uint8_t kCheckpointVersion = 1;

void write_i32(std::ostream& out, std::int32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (std::uint32_t(v) >> (8 * i)) & 0xFF;
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::int32_t read_i32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return std::int32_t(v);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (bits >> (8 * i)) & 0xFF;
  out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
}

void read_matrix(std::istream& in, Matrix& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = read_f64(in);
}

}  // namespace

void save_checkpoint(const std::string& path, const RnnParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw missing_input_error("cannot write checkpoint " + path);
  out.write(kCheckpointMagic, 4);
  out.put(char(kCheckpointVersion));
  write_i32(out, std::int32_t(params.w_hx.cols()));  // D
  write_i32(out, std::int32_t(params.w_hx.rows()));  // H
  write_i32(out, 1);                                 // L
  write_i32(out, std::int32_t(params.w_yh.rows()));  // O
  write_matrix(out, params.w_hx);
  write_matrix(out, params.w_hh);
  write_matrix(out, params.b_h);
  write_matrix(out, params.w_yh);
  write_matrix(out, params.b_y);
  if (!out) throw missing_input_error("write failure on checkpoint " + path);
}

RnnParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw missing_input_error("cannot open checkpoint " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw format_error("not a checkpoint file: " + path);
  }
  int version = in.get();
  if (version != kCheckpointVersion) {
    throw format_error("unsupported checkpoint version " + std::to_string(version));
  }
  std::int32_t d = read_i32(in), h = read_i32(in), l = read_i32(in), o = read_i32(in);
  if (!in || d <= 0 || h <= 0 || l != 1 || o <= 0) {
    throw format_error("corrupt checkpoint header in " + path);
  }
  RnnParams p;
  p.w_hx.resize(h, d);
  p.w_hh.resize(h, h);
  p.b_h.resize(h);
  p.w_yh.resize(o, h);
  p.b_y.resize(o);
  read_matrix(in, p.w_hx);
  read_matrix(in, p.w_hh);
  Matrix bh(h, 1), by(o, 1);
  read_matrix(in, bh);
  read_matrix(in, p.w_yh);
  read_matrix(in, by);
  p.b_h = bh.col(0);
  p.b_y = by.col(0);
  if (!in) throw format_error("truncated checkpoint " + path);
  return p;
}

}  // namespace solarfc
