// Times the chunked kernels in both execution modes and checks that the
// parallel results are bitwise identical to the serial ones.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "mrl/eval.hpp"
#include "mrl/geometry.hpp"
#include "mrl/training.hpp"

namespace {

double time_call(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

void report(const char* name, std::size_t n, double ts, double tp,
            bool equal) {
  std::printf("%-14s %10zu %10.3f %10.3f %8.2f %7s\n", name, n, ts, tp,
              ts / (tp > 0 ? tp : 1e-12), equal ? "yes" : "NO");
}

}  // namespace

int main() {
  using namespace mrl;
  std::printf("threads available: %d\n\n", par::max_threads());
  std::printf("%-14s %10s %10s %10s %8s %7s\n", "kernel", "n", "serial_s",
              "parallel_s", "speedup", "equal");

  auto [train, test] = make_planes(29, 100);
  const ManifoldSpec& spec = train.spec;

  {
    LabeledDataset ref;
    ref.spec = spec;
    ref.role = DatasetRole::Test;
    for (int cls = 1; cls <= spec.n_classes; ++cls) {
      auto pts = tube_sample(spec, cls, 0.0, Norm::L2, 10000,
                             derive_seed(7, "dense", cls));
      ref.points.insert(ref.points.end(), pts.begin(), pts.end());
      ref.labels.insert(ref.labels.end(), pts.size() / spec.d, cls);
    }
    double ds = 0, dp = 0;
    double ts = time_call([&] {
      ds = measure_delta_cover(train, ref, Norm::L2, par::Mode::Serial);
    });
    double tp = time_call([&] {
      dp = measure_delta_cover(train, ref, Norm::L2, par::Mode::Parallel);
    });
    report("delta_cover", ref.size(), ts, tp,
           std::memcmp(&ds, &dp, sizeof ds) == 0);
  }

  {
    McEstimate s{}, p{};
    double ts = time_call([&] {
      s = coverage_ratio_mc(train, 0.5, 200000, 11, par::Mode::Serial);
    });
    double tp = time_call([&] {
      p = coverage_ratio_mc(train, 0.5, 200000, 11, par::Mode::Parallel);
    });
    report("mc_coverage", static_cast<std::size_t>(s.n), ts, tp,
           s.hits == p.hits && s.n == p.n);
  }

  {
    NeighborIndex index = NeighborIndex::build(train, Norm::L2);
    auto queries = tube_sample(spec, 1, 0.45, Norm::L2, 20000, 13);
    const std::size_t nq = queries.size() / spec.d;
    std::vector<int> ls, lp;
    double ts = time_call([&] {
      ls = nn_classify_batch(index, queries.data(), nq, par::Mode::Serial);
    });
    double tp = time_call([&] {
      lp = nn_classify_batch(index, queries.data(), nq, par::Mode::Parallel);
    });
    report("nn_classify", ls.size(), ts, tp, ls == lp);
  }

  {
    Rng rng(21);
    MlpModel model = MlpModel::init({spec.d, 100, spec.n_classes}, rng);
    std::vector<AttackConfig> suite = {fgsm_config(Norm::L2, 0.0),
                                       bim_config(Norm::L2, 0.0, 40)};
    auto grid = eps_grid_for(0.5, 5);
    RobustnessCurve cs, cp;
    double ts = time_call([&] {
      cs = robustness_curve(model, test, suite, grid, 17, par::Mode::Serial);
    });
    double tp = time_call([&] {
      cp = robustness_curve(model, test, suite, grid, 17,
                            par::Mode::Parallel);
    });
    report("curve", test.size() * grid.size() * suite.size(), ts, tp,
           same_bits(cs.min_curve, cp.min_curve));
  }

  {
    TrainConfig tc;
    tc.mode = TrainMode::Natural;
    tc.epochs = 15;
    tc.retrainings = 1;
    tc.seed = 3;
    auto sub = make_circles(200, 100, 5);
    TrainedModel ms{}, mp{};
    double ts = time_call(
        [&] { ms = train_single(sub, tc, tc.seed, par::Mode::Serial); });
    double tp = time_call(
        [&] { mp = train_single(sub, tc, tc.seed, par::Mode::Parallel); });
    bool equal = same_bits(ms.model.w1, mp.model.w1) &&
                 same_bits(ms.model.w2, mp.model.w2) &&
                 same_bits(ms.model.b1, mp.model.b1) &&
                 same_bits(ms.model.b2, mp.model.b2);
    report("train_epoch", sub.size() * tc.epochs, ts, tp, equal);
  }

  return 0;
}
