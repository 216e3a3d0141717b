#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "mrl/attacks.hpp"
#include "mrl/eval.hpp"
#include "mrl/geometry.hpp"
#include "mrl/net.hpp"
#include "mrl/rng.hpp"
#include "mrl/training.hpp"
#include "mrl/voronoi.hpp"

using namespace mrl;

// Every parallel kernel promises bit-identical output to its serial
// reference: reductions accumulate per fixed-size chunk and combine the
// partials in chunk order, so the float addition order never depends on the
// execution mode or thread count.

namespace {

std::vector<double> tube_queries(const ManifoldSpec& spec, std::size_t n,
                                 std::uint64_t seed) {
  auto a = tube_sample(spec, 1, 0.3, Norm::L2, n / 2, derive_seed(seed, "a"));
  auto b = tube_sample(spec, 2, 0.3, Norm::L2, n - n / 2,
                       derive_seed(seed, "b"));
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("delta cover measurement matches across modes") {
  auto [train, test] = make_planes(15, 10);
  for (Norm p : {Norm::L2, Norm::Linf}) {
    double s = measure_delta_cover(train, test, p, par::Mode::Serial);
    double q = measure_delta_cover(train, test, p, par::Mode::Parallel);
    CHECK(s == q);
  }
}

TEST_CASE("mc coverage estimate matches across modes") {
  auto ds = make_circles(300, 10, 5);
  McEstimate s = coverage_ratio_mc(ds, 0.4, 20000, 9, par::Mode::Serial);
  McEstimate q = coverage_ratio_mc(ds, 0.4, 20000, 9, par::Mode::Parallel);
  CHECK(s.value == q.value);
  CHECK(s.std_error == q.std_error);
  CHECK(s.hits == q.hits);
  CHECK(s.n == q.n);
}

TEST_CASE("nearest and classify batches match across modes") {
  auto ds = make_circles(200, 6, 11);
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  auto queries = tube_queries(ds.spec, 1000, 13);
  const std::size_t nq = queries.size() / ds.spec.d;

  auto hs = nearest_batch(index, queries.data(), nq, par::Mode::Serial);
  auto hq = nearest_batch(index, queries.data(), nq, par::Mode::Parallel);
  REQUIRE(hs.size() == hq.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    CHECK(hs[i].index == hq[i].index);
    CHECK(hs[i].dist == hq[i].dist);
  }

  auto cs = nn_classify_batch(index, queries.data(), nq, par::Mode::Serial);
  auto cq = nn_classify_batch(index, queries.data(), nq, par::Mode::Parallel);
  CHECK(cs == cq);
}

TEST_CASE("robustness curve matches across modes") {
  auto [train, test] = make_planes(15, 4);
  TrainConfig tc;
  tc.epochs = 5;
  tc.hidden = 16;
  MlpModel model = train_single(train, tc, 3).model;

  std::vector<AttackConfig> suite = {fgsm_config(Norm::Linf, 0.0),
                                     bim_config(Norm::Linf, 0.0, 10)};
  auto grid = eps_grid_for(0.5, 6);
  RobustnessCurve s =
      robustness_curve(model, test, suite, grid, 21, par::Mode::Serial);
  RobustnessCurve q =
      robustness_curve(model, test, suite, grid, 21, par::Mode::Parallel);
  CHECK(s.eps_grid == q.eps_grid);
  CHECK(s.min_curve == q.min_curve);
  REQUIRE(s.per_attack.size() == q.per_attack.size());
  for (std::size_t a = 0; a < s.per_attack.size(); ++a) {
    CHECK(s.per_attack[a].first == q.per_attack[a].first);
    CHECK(s.per_attack[a].second == q.per_attack[a].second);
  }

  CHECK(clean_accuracy(model, test, par::Mode::Serial) ==
        clean_accuracy(model, test, par::Mode::Parallel));
}

TEST_CASE("training matches across modes in every mode") {
  auto [train, test] = make_planes(15, 3);
  (void)test;

  TrainConfig tc;
  tc.epochs = 3;
  tc.hidden = 12;

  SUBCASE("natural") { tc.mode = TrainMode::Natural; }
  SUBCASE("ball") {
    tc.mode = TrainMode::BallAdv;
    tc.attack = ball_pgd_config(Norm::L2, 0.5, 10);
  }
  SUBCASE("voronoi") {
    tc.mode = TrainMode::VoronoiAdv;
    tc.attack = voronoi_pgd_config(Norm::L2, 0.05, 10);
  }

  TrainedModel s = train_single(train, tc, 5, par::Mode::Serial);
  TrainedModel q = train_single(train, tc, 5, par::Mode::Parallel);
  CHECK(s.model.w1 == q.model.w1);
  CHECK(s.model.b1 == q.model.b1);
  CHECK(s.model.w2 == q.model.w2);
  CHECK(s.model.b2 == q.model.b2);
  CHECK(s.final_loss == q.final_loss);
  CHECK(s.epochs_run == q.epochs_run);
}

TEST_CASE("chunked iteration covers the range exactly once") {
  for (std::size_t n : {0ull, 1ull, 7ull, 256ull, 1000ull}) {
    for (std::size_t chunk : {1ull, 3ull, 256ull}) {
      std::vector<int> seen(n, 0);
      par::for_chunks(n, chunk, par::Mode::Serial,
                      [&](std::size_t, std::size_t b, std::size_t e) {
                        for (std::size_t i = b; i < e; ++i) ++seen[i];
                      });
      bool all_once = true;
      for (int c : seen) all_once = all_once && c == 1;
      CHECK(all_once);
    }
  }
}
