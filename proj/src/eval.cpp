#include "mrl/eval.hpp"

#include <cmath>
#include <stdexcept>

namespace mrl {

namespace {

constexpr std::size_t kEvalChunk = 64;

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2)
    throw std::invalid_argument("eval: grid needs at least two budgets");
  if (grid[0] != 0.0)
    throw std::invalid_argument("eval: grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("eval: grid must increase strictly");
}

}  // namespace

std::vector<double> eps_grid_for(double eps_max, int n_points) {
  if (n_points < 2)
    throw std::invalid_argument("eps_grid_for: need at least two points");
  if (!(eps_max > 0.0))
    throw std::invalid_argument("eps_grid_for: eps_max must be positive");
  std::vector<double> g(n_points);
  for (int i = 0; i < n_points; ++i)
    g[i] = eps_max * (static_cast<double>(i) / (n_points - 1));
  return g;
}

RobustnessCurve robustness_curve(const MlpModel& model,
                                 const LabeledDataset& test,
                                 std::span<const AttackConfig> suite,
                                 std::span<const double> eps_grid,
                                 std::uint64_t seed, par::Mode mode) {
  if (test.size() == 0)
    throw std::invalid_argument("robustness_curve: empty test set");
  if (test.dim() != model.dims.d_in)
    throw std::invalid_argument("robustness_curve: dimension mismatch");
  if (suite.empty())
    throw std::invalid_argument("robustness_curve: empty attack suite");
  for (const AttackConfig& a : suite)
    if (a.kind == AttackKind::VoronoiPgd)
      throw std::invalid_argument(
          "robustness_curve: cell-constrained attack has no budget axis");
  check_grid(eps_grid);

  const std::size_t n = test.size();
  const std::size_t nchunks = (n + kEvalChunk - 1) / kEvalChunk;
  RobustnessCurve curve;
  curve.eps_grid.assign(eps_grid.begin(), eps_grid.end());
  curve.n_test = n;

  std::vector<std::size_t> chunk_hits(nchunks);
  for (const AttackConfig& base : suite) {
    std::vector<double> acc(eps_grid.size());
    const std::string name = attack_name(base.kind);
    const std::string stream_label = "eval/" + name;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      AttackConfig cfg = base;
      cfg.epsilon = eps_grid[e];
      if (cfg.kind == AttackKind::Bim || cfg.kind == AttackKind::BallPgd)
        cfg.step = cfg.iters > 0 ? 2.5 * cfg.epsilon / cfg.iters : 0.0;
      std::fill(chunk_hits.begin(), chunk_hits.end(), 0);
      par::for_chunks(n, kEvalChunk, mode,
                      [&](std::size_t c, std::size_t b, std::size_t end) {
        AttackWorkspace ws;
        ws.resize(model.dims);
        std::vector<double> adv(model.dims.d_in);
        std::size_t hits = 0;
        for (std::size_t i = b; i < end; ++i) {
          // One stream per (attack, budget, example): partition-independent.
          Rng rng = Rng::substream(seed, stream_label, e * n + i);
          apply_attack(model, test.point(i), test.labels[i], cfg, rng,
                       nullptr, ws, adv);
          if (predict(model, adv, ws.net) == test.labels[i]) ++hits;
        }
        chunk_hits[c] = hits;
      });
      std::size_t hits = 0;
      for (std::size_t h : chunk_hits) hits += h;
      acc[e] = static_cast<double>(hits) / static_cast<double>(n);
    }
    curve.per_attack.emplace_back(name, std::move(acc));
  }

  curve.min_curve.assign(eps_grid.size(), 1.0);
  for (const auto& [name, acc] : curve.per_attack)
    for (std::size_t e = 0; e < acc.size(); ++e)
      curve.min_curve[e] = std::min(curve.min_curve[e], acc[e]);
  return curve;
}

double nauc(std::span<const double> eps_grid, std::span<const double> acc) {
  check_grid(eps_grid);
  if (acc.size() != eps_grid.size())
    throw std::invalid_argument("nauc: grid/accuracy size mismatch");
  for (double a : acc)
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("nauc: accuracy outside [0, 1]");
  double area = 0.0;
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    area += 0.5 * (acc[i] + acc[i - 1]) * (eps_grid[i] - eps_grid[i - 1]);
  return area / (eps_grid.back() - eps_grid.front());
}

CurveAggregate aggregate_curves(const std::vector<RobustnessCurve>& curves) {
  if (curves.empty())
    throw std::invalid_argument("aggregate_curves: no curves");
  const auto& grid = curves.front().eps_grid;
  for (const auto& c : curves)
    if (c.eps_grid != grid)
      throw std::invalid_argument("aggregate_curves: mismatched grids");

  CurveAggregate agg;
  agg.eps_grid = grid;
  agg.n_curves = curves.size();
  const double n = static_cast<double>(curves.size());
  agg.acc_mean.assign(grid.size(), 0.0);
  agg.acc_std.assign(grid.size(), 0.0);
  for (std::size_t e = 0; e < grid.size(); ++e) {
    double mean = 0.0;
    for (const auto& c : curves) mean += c.min_curve[e];
    mean /= n;
    double ss = 0.0;
    for (const auto& c : curves) {
      double t = c.min_curve[e] - mean;
      ss += t * t;
    }
    agg.acc_mean[e] = mean;
    agg.acc_std[e] = curves.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  std::vector<double> naucs;
  naucs.reserve(curves.size());
  for (const auto& c : curves) naucs.push_back(nauc(c.eps_grid, c.min_curve));
  double mean = 0.0;
  for (double v : naucs) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : naucs) ss += (v - mean) * (v - mean);
  agg.nauc_mean = mean;
  agg.nauc_std = curves.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return agg;
}

double clean_accuracy(const MlpModel& model, const LabeledDataset& data,
                      par::Mode mode) {
  if (data.size() == 0)
    throw std::invalid_argument("clean_accuracy: empty dataset");
  const std::size_t n = data.size();
  const std::size_t nchunks = (n + kEvalChunk - 1) / kEvalChunk;
  std::vector<std::size_t> chunk_hits(nchunks, 0);
  par::for_chunks(n, kEvalChunk, mode,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
    MlpWorkspace ws;
    ws.resize(model.dims);
    std::size_t hits = 0;
    for (std::size_t i = b; i < e; ++i)
      if (predict(model, data.point(i), ws) == data.labels[i]) ++hits;
    chunk_hits[c] = hits;
  });
  std::size_t hits = 0;
  for (std::size_t h : chunk_hits) hits += h;
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace mrl
