#include "mrl/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mrl {

namespace {

void check_dims(const MlpDims& d) {
  if (d.d_in < 1 || d.hidden < 1 || d.n_classes < 2)
    throw std::invalid_argument("MlpModel: bad dimensions");
}

void check_input(const MlpModel& m, std::span<const double> x, int label) {
  if (x.size() != static_cast<std::size_t>(m.dims.d_in))
    throw std::invalid_argument("mlp: input dimension mismatch");
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument("mlp: non-finite input");
  if (label < 1 || label > m.dims.n_classes)
    throw std::invalid_argument("mlp: label out of range");
}

// Fills ws.probs from ws.logits and returns the cross-entropy against label.
double softmax_xent(const MlpDims& dims, MlpWorkspace& ws, int label) {
  const int C = dims.n_classes;
  double mx = ws.logits[0];
  for (int c = 1; c < C; ++c) mx = std::max(mx, ws.logits[c]);
  double sum = 0.0;
  for (int c = 0; c < C; ++c) {
    ws.probs[c] = std::exp(ws.logits[c] - mx);
    sum += ws.probs[c];
  }
  for (int c = 0; c < C; ++c) ws.probs[c] /= sum;
  return -(ws.logits[label - 1] - mx - std::log(sum));
}

// dlogits = probs - onehot(label), then dz1 through the ReLU mask.
void backward_to_dz1(const MlpModel& model, int label, MlpWorkspace& ws) {
  const int C = model.dims.n_classes;
  const int H = model.dims.hidden;
  for (int c = 0; c < C; ++c) ws.dlogits[c] = ws.probs[c];
  ws.dlogits[label - 1] -= 1.0;
  for (int j = 0; j < H; ++j) {
    double s = 0.0;
    for (int c = 0; c < C; ++c) s += model.w2[c * H + j] * ws.dlogits[c];
    ws.dz1[j] = ws.z1[j] > 0.0 ? s : 0.0;
  }
}

template <class T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

}  // namespace

MlpModel MlpModel::init(MlpDims dims, Rng& rng) {
  check_dims(dims);
  MlpModel m = zeros(dims);
  double a1 = std::sqrt(6.0 / (dims.d_in + dims.hidden));
  for (auto& w : m.w1) w = rng.uniform(-a1, a1);
  double a2 = std::sqrt(6.0 / (dims.hidden + dims.n_classes));
  for (auto& w : m.w2) w = rng.uniform(-a2, a2);
  return m;
}

MlpModel MlpModel::zeros(MlpDims dims) {
  check_dims(dims);
  MlpModel m;
  m.dims = dims;
  m.w1.assign(static_cast<std::size_t>(dims.hidden) * dims.d_in, 0.0);
  m.b1.assign(dims.hidden, 0.0);
  m.w2.assign(static_cast<std::size_t>(dims.n_classes) * dims.hidden, 0.0);
  m.b2.assign(dims.n_classes, 0.0);
  return m;
}

std::size_t MlpModel::n_params() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

void MlpWorkspace::resize(const MlpDims& dims) {
  z1.assign(dims.hidden, 0.0);
  h.assign(dims.hidden, 0.0);
  logits.assign(dims.n_classes, 0.0);
  probs.assign(dims.n_classes, 0.0);
  dlogits.assign(dims.n_classes, 0.0);
  dz1.assign(dims.hidden, 0.0);
}

void MlpGrads::resize(const MlpDims& dims) {
  w1.assign(static_cast<std::size_t>(dims.hidden) * dims.d_in, 0.0);
  b1.assign(dims.hidden, 0.0);
  w2.assign(static_cast<std::size_t>(dims.n_classes) * dims.hidden, 0.0);
  b2.assign(dims.n_classes, 0.0);
  input.assign(dims.d_in, 0.0);
}

void MlpGrads::zero() {
  std::fill(w1.begin(), w1.end(), 0.0);
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(w2.begin(), w2.end(), 0.0);
  std::fill(b2.begin(), b2.end(), 0.0);
  std::fill(input.begin(), input.end(), 0.0);
}

void MlpGrads::add_scaled(double a, const MlpGrads& g) {
  for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += a * g.w1[i];
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += a * g.b1[i];
  for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += a * g.w2[i];
  for (std::size_t i = 0; i < b2.size(); ++i) b2[i] += a * g.b2[i];
}

void forward(const MlpModel& model, std::span<const double> x,
             MlpWorkspace& ws) {
  check_input(model, x, 1);
  const int D = model.dims.d_in;
  const int H = model.dims.hidden;
  const int C = model.dims.n_classes;
  for (int j = 0; j < H; ++j) {
    const double* row = model.w1.data() + static_cast<std::size_t>(j) * D;
    double s = model.b1[j];
    for (int i = 0; i < D; ++i) s += row[i] * x[i];
    ws.z1[j] = s;
    ws.h[j] = s > 0.0 ? s : 0.0;
  }
  for (int c = 0; c < C; ++c) {
    const double* row = model.w2.data() + static_cast<std::size_t>(c) * H;
    double s = model.b2[c];
    for (int j = 0; j < H; ++j) s += row[j] * ws.h[j];
    ws.logits[c] = s;
  }
}

double loss_only(const MlpModel& model, std::span<const double> x, int label,
                 MlpWorkspace& ws) {
  check_input(model, x, label);
  forward(model, x, ws);
  return softmax_xent(model.dims, ws, label);
}

double loss_and_grads(const MlpModel& model, std::span<const double> x,
                      int label, MlpGrads& out, MlpWorkspace& ws) {
  check_input(model, x, label);
  forward(model, x, ws);
  double loss = softmax_xent(model.dims, ws, label);
  backward_to_dz1(model, label, ws);
  const int D = model.dims.d_in;
  const int H = model.dims.hidden;
  const int C = model.dims.n_classes;
  for (int c = 0; c < C; ++c) {
    double g = ws.dlogits[c];
    out.b2[c] = g;
    double* row = out.w2.data() + static_cast<std::size_t>(c) * H;
    for (int j = 0; j < H; ++j) row[j] = g * ws.h[j];
  }
  std::fill(out.input.begin(), out.input.end(), 0.0);
  for (int j = 0; j < H; ++j) {
    double g = ws.dz1[j];
    out.b1[j] = g;
    double* row = out.w1.data() + static_cast<std::size_t>(j) * D;
    const double* w1row = model.w1.data() + static_cast<std::size_t>(j) * D;
    if (g == 0.0) {
      std::fill(row, row + D, 0.0);
      continue;
    }
    for (int i = 0; i < D; ++i) {
      row[i] = g * x[i];
      out.input[i] += g * w1row[i];
    }
  }
  return loss;
}

double loss_and_input_grad(const MlpModel& model, std::span<const double> x,
                           int label, std::span<double> gx,
                           MlpWorkspace& ws) {
  check_input(model, x, label);
  if (gx.size() != x.size())
    throw std::invalid_argument("loss_and_input_grad: bad gradient size");
  forward(model, x, ws);
  double loss = softmax_xent(model.dims, ws, label);
  backward_to_dz1(model, label, ws);
  const int D = model.dims.d_in;
  const int H = model.dims.hidden;
  std::fill(gx.begin(), gx.end(), 0.0);
  for (int j = 0; j < H; ++j) {
    double g = ws.dz1[j];
    if (g == 0.0) continue;
    const double* w1row = model.w1.data() + static_cast<std::size_t>(j) * D;
    for (int i = 0; i < D; ++i) gx[i] += g * w1row[i];
  }
  return loss;
}

int predict(const MlpModel& model, std::span<const double> x,
            MlpWorkspace& ws) {
  forward(model, x, ws);
  int best = 0;
  for (int c = 1; c < model.dims.n_classes; ++c)
    if (ws.logits[c] > ws.logits[best]) best = c;  // ties keep the lowest
  return best + 1;
}

OptimizerState OptimizerState::init(const MlpModel& model, OptConfig cfg) {
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("optimizer: lr <= 0");
  OptimizerState s;
  s.cfg = cfg;
  s.m.assign(model.n_params(), 0.0);
  if (cfg.kind == OptKind::Adam) s.v.assign(model.n_params(), 0.0);
  return s;
}

void opt_step(OptimizerState& state, MlpModel& model, const MlpGrads& grads) {
  if (state.m.size() != model.n_params())
    throw std::invalid_argument("opt_step: state/model mismatch");
  ++state.step_count;
  const OptConfig& c = state.cfg;
  std::size_t off = 0;
  auto apply = [&](std::vector<double>& w, const std::vector<double>& g) {
    if (c.kind == OptKind::Adam) {
      double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
      double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));
      for (std::size_t i = 0; i < w.size(); ++i) {
        double& m = state.m[off + i];
        double& v = state.v[off + i];
        m = c.beta1 * m + (1.0 - c.beta1) * g[i];
        v = c.beta2 * v + (1.0 - c.beta2) * g[i] * g[i];
        w[i] -= c.lr * (m / bc1) / (std::sqrt(v / bc2) + c.eps);
      }
    } else {
      for (std::size_t i = 0; i < w.size(); ++i) {
        double& m = state.m[off + i];
        m = c.momentum * m + g[i];
        w[i] -= c.lr * m;
      }
    }
    off += w.size();
  };
  apply(model.w1, grads.w1);
  apply(model.b1, grads.b1);
  apply(model.w2, grads.w2);
  apply(model.b2, grads.b2);
}

void save_checkpoint(const MlpModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  os.write("MRLM1", 5);
  write_raw(os, static_cast<std::int32_t>(model.dims.d_in));
  write_raw(os, static_cast<std::int32_t>(model.dims.hidden));
  write_raw(os, static_cast<std::int32_t>(model.dims.n_classes));
  auto dump = [&](const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  dump(model.w1);
  dump(model.b1);
  dump(model.w2);
  dump(model.b2);
  if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

MlpModel load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "MRLM1", 5) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  MlpDims dims;
  dims.d_in = read_raw<std::int32_t>(is);
  dims.hidden = read_raw<std::int32_t>(is);
  dims.n_classes = read_raw<std::int32_t>(is);
  check_dims(dims);
  MlpModel m = MlpModel::zeros(dims);
  auto slurp = [&](std::vector<double>& v) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
  };
  slurp(m.w1);
  slurp(m.b1);
  slurp(m.w2);
  slurp(m.b2);
  char extra;
  if (is.read(&extra, 1))
    throw std::runtime_error("checkpoint: trailing bytes in " + path);
  return m;
}

}  // namespace mrl
