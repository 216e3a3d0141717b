#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mrl/eval.hpp"
#include "mrl/geometry.hpp"

using namespace mrl;

namespace {

MlpModel trained_stub(const MlpDims& dims, std::uint64_t seed) {
  Rng rng(seed);
  return MlpModel::init(dims, rng);
}

}  // namespace

TEST_CASE("nauc unit truths") {
  std::vector<double> grid = {0.0, 0.125, 0.25, 0.375, 0.5};
  std::vector<double> affine = {1.0, 0.875, 0.75, 0.625, 0.5};
  std::vector<double> ones(5, 1.0);
  CHECK(std::abs(nauc(grid, affine) - 0.75) <= 1e-12);
  CHECK(std::abs(nauc(grid, ones) - 1.0) <= 1e-12);
  std::vector<double> zero_to = {1.0, 0.5, 0.0, 0.0, 0.0};
  CHECK(nauc(grid, zero_to) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("nauc of a straight drop to zero over the span is one half") {
  std::vector<double> grid = {0.0, 0.2, 0.4};
  std::vector<double> acc = {1.0, 0.5, 0.0};
  CHECK(std::abs(nauc(grid, acc) - 0.5) <= 1e-12);
}

TEST_CASE("nauc validates its inputs") {
  std::vector<double> grid = {0.0, 0.1, 0.2};
  CHECK_THROWS(nauc(grid, std::vector<double>{1.0, 0.5}));
  CHECK_THROWS(nauc(std::vector<double>{0.0, 0.2, 0.1},
                    std::vector<double>{1.0, 1.0, 1.0}));
  CHECK_THROWS(nauc(std::vector<double>{0.1, 0.2, 0.3},
                    std::vector<double>{1.0, 1.0, 1.0}));
  CHECK_THROWS(nauc(grid, std::vector<double>{1.0, 0.5, 1.5}));
}

TEST_CASE("eps grid hits both endpoints exactly") {
  auto grid = eps_grid_for(0.5, 21);
  CHECK(grid.size() == 21);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 0.5);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK_THROWS(eps_grid_for(0.5, 1));
  CHECK_THROWS(eps_grid_for(0.0, 5));
}

TEST_CASE("curve at budget zero equals clean accuracy for every attack") {
  auto data = make_circles(80, 3, 5);
  MlpModel model = trained_stub({data.spec.d, 20, 2}, 7);
  std::vector<AttackConfig> suite = {fgsm_config(Norm::L2, 0.0),
                                     bim_config(Norm::L2, 0.0, 10),
                                     ball_pgd_config(Norm::L2, 0.0, 10)};
  auto grid = eps_grid_for(0.4, 5);
  RobustnessCurve curve = robustness_curve(model, data, suite, grid, 11);
  double clean = clean_accuracy(model, data);
  for (const auto& [name, acc] : curve.per_attack)
    CHECK(acc[0] == clean);
  CHECK(curve.min_curve[0] == clean);
  CHECK(curve.n_test == data.size());
}

TEST_CASE("min curve is the pointwise minimum over attacks") {
  auto data = make_circles(60, 2, 9);
  MlpModel model = trained_stub({data.spec.d, 16, 2}, 13);
  std::vector<AttackConfig> suite = {fgsm_config(Norm::L2, 0.0),
                                     bim_config(Norm::L2, 0.0, 10)};
  auto grid = eps_grid_for(0.5, 7);
  RobustnessCurve curve = robustness_curve(model, data, suite, grid, 17);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double want = 1.0;
    for (const auto& [name, acc] : curve.per_attack)
      want = std::min(want, acc[g]);
    CHECK(curve.min_curve[g] == want);
  }
}

TEST_CASE("identical inputs give identical curves") {
  auto data = make_circles(50, 4, 19);
  MlpModel model = trained_stub({data.spec.d, 16, 2}, 23);
  std::vector<AttackConfig> suite = {ball_pgd_config(Norm::L2, 0.0, 8)};
  auto grid = eps_grid_for(0.3, 5);
  RobustnessCurve a = robustness_curve(model, data, suite, grid, 29);
  RobustnessCurve b = robustness_curve(model, data, suite, grid, 29);
  CHECK(a.min_curve == b.min_curve);
  RobustnessCurve c = robustness_curve(model, data, suite, grid, 31);
  CHECK(a.per_attack[0].first == c.per_attack[0].first);
}

TEST_CASE("curve rejects bad suites and grids") {
  auto data = make_circles(20, 1, 1);
  MlpModel model = trained_stub({data.spec.d, 8, 2}, 1);
  std::vector<AttackConfig> empty;
  auto grid = eps_grid_for(0.3, 3);
  CHECK_THROWS(robustness_curve(model, data, empty, grid, 1));
  std::vector<AttackConfig> voro = {voronoi_pgd_config(Norm::L2, 0.1, 5)};
  CHECK_THROWS(robustness_curve(model, data, voro, grid, 1));
  std::vector<AttackConfig> ok = {fgsm_config(Norm::L2, 0.0)};
  std::vector<double> bad_grid = {0.1, 0.2};
  CHECK_THROWS(robustness_curve(model, data, ok, bad_grid, 1));
}

TEST_CASE("aggregation averages curves and naucs") {
  std::vector<double> grid = {0.0, 0.25, 0.5};
  RobustnessCurve a, b;
  a.eps_grid = b.eps_grid = grid;
  a.min_curve = {1.0, 1.0, 0.5};
  b.min_curve = {1.0, 0.5, 0.5};
  CurveAggregate agg = aggregate_curves({a, b});
  CHECK(agg.n_curves == 2);
  CHECK(agg.acc_mean[1] == doctest::Approx(0.75).epsilon(1e-15));
  double na = nauc(grid, a.min_curve), nb = nauc(grid, b.min_curve);
  CHECK(agg.nauc_mean == doctest::Approx(0.5 * (na + nb)).epsilon(1e-15));
  // Sample convention: sqrt of the two-point variance with n-1 = 1.
  double want_std = std::sqrt((na - agg.nauc_mean) * (na - agg.nauc_mean) +
                              (nb - agg.nauc_mean) * (nb - agg.nauc_mean));
  CHECK(agg.nauc_std == doctest::Approx(want_std).epsilon(1e-12));
  CHECK(agg.acc_std[0] == 0.0);

  CurveAggregate one = aggregate_curves({a});
  CHECK(one.nauc_std == 0.0);
  b.eps_grid = {0.0, 0.3, 0.5};
  CHECK_THROWS(aggregate_curves({a, b}));
  CHECK_THROWS(aggregate_curves({}));
}

TEST_CASE("a perfect nn-like model stays flat across the sweep") {
  // A wide-margin linear problem the stub cannot fail: radius separation.
  auto data = make_circles(100, 0, 37);
  MlpDims dims{2, 20, 2};
  MlpModel model = MlpModel::zeros(dims);
  // Hand-built radius detector: h = relu(|x| proxy), logits favor class 2
  // once x.x is large. Frozen weights keep this test independent of training.
  for (int j = 0; j < 20; ++j) {
    model.w1[j * 2 + 0] = j % 2 ? 0.7 : -0.7;
    model.w1[j * 2 + 1] = j % 3 ? 0.7 : -0.7;
    model.b1[j] = 0.1;
  }
  for (int j = 0; j < 20; ++j) {
    model.w2[j] = -1.0;
    model.w2[20 + j] = 1.0;
  }
  model.b2 = {4.0, -4.0};
  double clean = clean_accuracy(model, data);
  std::vector<AttackConfig> suite = {fgsm_config(Norm::L2, 0.0)};
  auto grid = eps_grid_for(0.2, 3);
  RobustnessCurve curve = robustness_curve(model, data, suite, grid, 41);
  CHECK(curve.min_curve[0] == clean);
  for (double acc : curve.min_curve) {
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }
}
