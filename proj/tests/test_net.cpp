#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mrl/net.hpp"

using namespace mrl;

namespace {

// Central finite difference in one coordinate of a flat view.
double central_diff(MlpModel& model, std::vector<double>& x, int label,
                    double* slot, double h, MlpWorkspace& ws) {
  double keep = *slot;
  *slot = keep + h;
  double up = loss_only(model, x, label, ws);
  *slot = keep - h;
  double dn = loss_only(model, x, label, ws);
  *slot = keep;
  return (up - dn) / (2.0 * h);
}

// Draw (model, input) pairs, rejecting inputs that park a hidden unit within
// 1e-4 of its ReLU kink, where the finite difference straddles the corner.
bool draw_smooth_case(MlpDims dims, Rng& rng, MlpModel& model,
                      std::vector<double>& x, MlpWorkspace& ws) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    model = MlpModel::init(dims, rng);
    x.resize(dims.d_in);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    forward(model, x, ws);
    bool smooth = true;
    for (double z : ws.z1)
      if (std::abs(z) < 1e-4) smooth = false;
    if (smooth) return true;
  }
  return false;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("analytic gradients match central differences") {
  const double h = 1e-5;
  for (int d : {2, 12, 102}) {
    MlpDims dims{d, 16, 2};
    Rng rng(100 + d);
    MlpModel model;
    std::vector<double> x;
    MlpWorkspace ws;
    ws.resize(dims);
    MlpGrads grads;
    grads.resize(dims);
    for (int rep = 0; rep < 3; ++rep) {
      REQUIRE(draw_smooth_case(dims, rng, model, x, ws));
      int label = 1 + rep % 2;
      loss_and_grads(model, x, label, grads, ws);
      double worst = 0.0;
      auto check_block = [&](std::vector<double>& params,
                             std::vector<double>& grad, int stride) {
        for (std::size_t i = 0; i < params.size(); i += stride) {
          double fd = central_diff(model, x, label, &params[i], h, ws);
          double denom = std::max(std::abs(fd), 1e-3);
          worst = std::max(worst, std::abs(fd - grad[i]) / denom);
        }
      };
      check_block(model.w1, grads.w1, 7);
      check_block(model.b1, grads.b1, 3);
      check_block(model.w2, grads.w2, 5);
      check_block(model.b2, grads.b2, 1);
      for (int i = 0; i < d; i += 3) {
        double fd = central_diff(model, x, label, &x[i], h, ws);
        double denom = std::max(std::abs(fd), 1e-3);
        worst = std::max(worst, std::abs(fd - grads.input[i]) / denom);
      }
      CHECK(worst <= 1e-5);
    }
  }
}

TEST_CASE("zero model yields log n_classes loss and uniform probabilities") {
  MlpDims dims{4, 8, 3};
  MlpModel model = MlpModel::zeros(dims);
  MlpWorkspace ws;
  ws.resize(dims);
  std::vector<double> x = {0.5, -1.0, 2.0, 0.25};
  for (int label = 1; label <= 3; ++label)
    CHECK(loss_only(model, x, label, ws) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("input-gradient fast path equals the full backward pass") {
  MlpDims dims{12, 20, 3};
  Rng rng(7);
  MlpModel model = MlpModel::init(dims, rng);
  MlpWorkspace ws;
  ws.resize(dims);
  MlpGrads grads;
  grads.resize(dims);
  std::vector<double> gx(dims.d_in);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(dims.d_in);
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    int label = 1 + static_cast<int>(rng.index(3));
    double full = loss_and_grads(model, x, label, grads, ws);
    double lean = loss_and_input_grad(model, x, label, gx, ws);
    CHECK(full == lean);
    for (int i = 0; i < dims.d_in; ++i) CHECK(gx[i] == grads.input[i]);
  }
}

TEST_CASE("prediction ties resolve to the lowest class") {
  MlpDims dims{2, 4, 3};
  MlpModel model = MlpModel::zeros(dims);
  MlpWorkspace ws;
  ws.resize(dims);
  std::vector<double> x = {1.0, -1.0};
  CHECK(predict(model, x, ws) == 1);
}

TEST_CASE("glorot init respects bounds and is seed-deterministic") {
  MlpDims dims{10, 50, 2};
  Rng a(3), b(3);
  MlpModel m1 = MlpModel::init(dims, a);
  MlpModel m2 = MlpModel::init(dims, b);
  CHECK(m1.w1 == m2.w1);
  CHECK(m1.w2 == m2.w2);
  double a1 = std::sqrt(6.0 / (10 + 50));
  double a2 = std::sqrt(6.0 / (50 + 2));
  for (double w : m1.w1) CHECK(std::abs(w) <= a1);
  for (double w : m1.w2) CHECK(std::abs(w) <= a2);
  for (double v : m1.b1) CHECK(v == 0.0);
  for (double v : m1.b2) CHECK(v == 0.0);
}

TEST_CASE("adam first step moves by lr in the gradient sign direction") {
  MlpDims dims{1, 1, 2};
  MlpModel model = MlpModel::zeros(dims);
  model.w1[0] = 0.5;
  OptConfig cfg;
  cfg.lr = 0.1;
  OptimizerState state = OptimizerState::init(model, cfg);
  MlpGrads grads;
  grads.resize(dims);
  grads.zero();
  grads.w1[0] = 0.04;
  opt_step(state, model, grads);
  // Bias correction makes m-hat = g and v-hat = g^2 on step one.
  CHECK(model.w1[0] ==
        doctest::Approx(0.5 - 0.1 * 0.04 / (0.04 + 1e-8)).epsilon(1e-12));
  CHECK(state.step_count == 1);
}

TEST_CASE("sgd with momentum accumulates velocity") {
  MlpDims dims{1, 1, 2};
  MlpModel model = MlpModel::zeros(dims);
  OptConfig cfg;
  cfg.kind = OptKind::Sgd;
  cfg.lr = 0.5;
  cfg.momentum = 0.9;
  OptimizerState state = OptimizerState::init(model, cfg);
  MlpGrads grads;
  grads.resize(dims);
  grads.zero();
  grads.w1[0] = 1.0;
  opt_step(state, model, grads);
  CHECK(model.w1[0] == doctest::Approx(-0.5).epsilon(1e-15));
  opt_step(state, model, grads);
  // v = 0.9 * 1 + 1 = 1.9; w = -0.5 - 0.5 * 1.9
  CHECK(model.w1[0] == doctest::Approx(-1.45).epsilon(1e-15));
}

TEST_CASE("checkpoints round-trip bitwise") {
  MlpDims dims{7, 11, 3};
  Rng rng(9);
  MlpModel model = MlpModel::init(dims, rng);
  model.b1[2] = -0.125;
  std::string path = temp_path("mrl_ckpt_roundtrip.mrlm");
  save_checkpoint(model, path);
  MlpModel back = load_checkpoint(path);
  CHECK(back.dims.d_in == 7);
  CHECK(back.dims.hidden == 11);
  CHECK(back.dims.n_classes == 3);
  CHECK(back.w1 == model.w1);
  CHECK(back.b1 == model.b1);
  CHECK(back.w2 == model.w2);
  CHECK(back.b2 == model.b2);
  std::remove(path.c_str());
}

TEST_CASE("corrupt checkpoints are rejected") {
  MlpDims dims{3, 4, 2};
  MlpModel model = MlpModel::zeros(dims);
  std::string path = temp_path("mrl_ckpt_corrupt.mrlm");

  save_checkpoint(model, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXXX", 5);
  }
  CHECK_THROWS(load_checkpoint(path));

  save_checkpoint(model, path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 9);
  CHECK_THROWS(load_checkpoint(path));

  save_checkpoint(model, path);
  {
    std::ofstream f(path, std::ios::app | std::ios::binary);
    f.write("junk", 4);
  }
  CHECK_THROWS(load_checkpoint(path));
  std::remove(path.c_str());
  CHECK_THROWS(load_checkpoint(path));
}

TEST_CASE("forward rejects non-finite input") {
  MlpDims dims{2, 3, 2};
  MlpModel model = MlpModel::zeros(dims);
  MlpWorkspace ws;
  ws.resize(dims);
  std::vector<double> bad = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS(forward(model, bad, ws));
}
