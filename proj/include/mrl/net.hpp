#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrl/rng.hpp"

namespace mrl {

struct MlpDims {
  int d_in = 0;
  int hidden = 100;
  int n_classes = 2;
};

// One-hidden-layer ReLU classifier. Weights are row-major: w1 is
// hidden x d_in, w2 is n_classes x hidden. The ReLU subgradient at zero is
// taken as zero.
struct MlpModel {
  MlpDims dims;
  std::vector<double> w1, b1, w2, b2;

  // Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)), biases
  // zero. Draw order: w1 row-major, then w2 row-major.
  static MlpModel init(MlpDims dims, Rng& rng);
  static MlpModel zeros(MlpDims dims);
  std::size_t n_params() const;
};

// Scratch buffers reused across calls so the hot loops never allocate.
struct MlpWorkspace {
  std::vector<double> z1, h, logits, probs, dlogits, dz1;
  void resize(const MlpDims& dims);
};

struct MlpGrads {
  std::vector<double> w1, b1, w2, b2;
  std::vector<double> input;  // d_in, gradient of the loss in the input
  void resize(const MlpDims& dims);
  void zero();
  // this += a * g, parameter blocks only.
  void add_scaled(double a, const MlpGrads& g);
};

// Logits for x; fills ws.z1/h/logits.
void forward(const MlpModel& model, std::span<const double> x,
             MlpWorkspace& ws);

// Softmax cross-entropy of x against label (1-based), log-sum-exp
// stabilized. Input coordinates must be finite.
double loss_only(const MlpModel& model, std::span<const double> x, int label,
                 MlpWorkspace& ws);

// Loss plus exact gradients in every parameter and in the input.
double loss_and_grads(const MlpModel& model, std::span<const double> x,
                      int label, MlpGrads& out, MlpWorkspace& ws);

// Loss and input gradient only; identical values to loss_and_grads but
// skips the parameter outer products that attacks never use.
double loss_and_input_grad(const MlpModel& model, std::span<const double> x,
                           int label, std::span<double> gx, MlpWorkspace& ws);

int predict(const MlpModel& model, std::span<const double> x,
            MlpWorkspace& ws);

enum class OptKind { Adam, Sgd };

struct OptConfig {
  OptKind kind = OptKind::Adam;
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double momentum = 0.0;  // Sgd only
};

// Moments are stored flat over the parameter blocks in w1, b1, w2, b2 order.
struct OptimizerState {
  OptConfig cfg;
  long long step_count = 0;
  std::vector<double> m, v;

  static OptimizerState init(const MlpModel& model, OptConfig cfg);
};

// One update step in place; Adam uses bias-corrected moments.
void opt_step(OptimizerState& state, MlpModel& model, const MlpGrads& grads);

// Binary checkpoint: magic "MRLM1", little-endian int32 dims
// (d_in, hidden, n_classes), then float64 w1, b1, w2, b2 row-major.
void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);

}  // namespace mrl
