#include "mrl/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mrl {

namespace {

constexpr std::size_t kBatchChunk = 4;

struct ChunkScratch {
  MlpGrads grads;
  AttackWorkspace ws;
  std::vector<double> adv;
  MlpGrads example_grads;
  double loss_sum = 0.0;
};

}  // namespace

std::string train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::Natural: return "natural";
    case TrainMode::BallAdv: return "ball_adv";
    case TrainMode::VoronoiAdv: return "voronoi_adv";
  }
  throw std::invalid_argument("train_mode_name: bad mode");
}

TrainMode train_mode_from_name(const std::string& name) {
  if (name == "natural") return TrainMode::Natural;
  if (name == "ball_adv") return TrainMode::BallAdv;
  if (name == "voronoi_adv") return TrainMode::VoronoiAdv;
  throw std::invalid_argument("unknown training mode: " + name);
}

void validate_train_config(const TrainConfig& cfg,
                           const LabeledDataset& data) {
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.role != DatasetRole::Train)
    throw std::invalid_argument("train: dataset role is not train");
  int max_label = 0;
  for (int l : data.labels) {
    if (l < 1) throw std::invalid_argument("train: labels must start at 1");
    max_label = std::max(max_label, l);
  }
  if (max_label < 2)
    throw std::invalid_argument("train: need at least two classes");
  if (cfg.epochs < 1 || cfg.batch < 1 || cfg.retrainings < 1 ||
      cfg.hidden < 1 || cfg.m < 1)
    throw std::invalid_argument("train: bad loop configuration");
  if (!(cfg.opt.lr > 0.0)) throw std::invalid_argument("train: lr <= 0");
  switch (cfg.mode) {
    case TrainMode::Natural:
      break;
    case TrainMode::BallAdv:
      if (cfg.attack.kind == AttackKind::VoronoiPgd)
        throw std::invalid_argument(
            "train: ball mode needs a ball-constrained attack");
      if (cfg.attack.epsilon < 0.0)
        throw std::invalid_argument("train: negative attack budget");
      break;
    case TrainMode::VoronoiAdv:
      if (cfg.attack.kind != AttackKind::VoronoiPgd)
        throw std::invalid_argument(
            "train: cell mode needs the cell-constrained attack");
      break;
  }
}

TrainedModel train_single(const LabeledDataset& data, const TrainConfig& cfg,
                          std::uint64_t seed, par::Mode mode) {
  validate_train_config(cfg, data);
  const std::size_t n = data.size();
  const int d = data.dim();
  int n_classes = 0;
  for (int l : data.labels) n_classes = std::max(n_classes, l);

  MlpDims dims{d, cfg.hidden, n_classes};
  Rng init_rng = Rng::substream(seed, "init");
  MlpModel model = MlpModel::init(dims, init_rng);
  OptimizerState opt = OptimizerState::init(model, cfg.opt);

  const std::size_t max_chunks = (cfg.batch + kBatchChunk - 1) / kBatchChunk;
  std::vector<ChunkScratch> scratch(max_chunks);
  for (auto& s : scratch) {
    s.grads.resize(dims);
    s.example_grads.resize(dims);
    s.ws.resize(dims);
    s.adv.assign(d, 0.0);
  }
  MlpGrads batch_grads;
  batch_grads.resize(dims);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  NeighborIndex nn_index;
  std::vector<ConstraintSet> cells;
  const bool wants_cells = cfg.mode == TrainMode::VoronoiAdv;

  TrainedModel out;
  out.seed = seed;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (wants_cells) {
      // Rebuilt each epoch so a refreshed train set would be picked up.
      nn_index = NeighborIndex::build(data, cfg.attack.p);
      cells.resize(n);
      par::for_chunks(n, 16, mode,
                      [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
          cells[i] = constraint_set(nn_index, i, cfg.m);
      });
    }
    Rng shuffle_rng = Rng::substream(seed, "shuffle", epoch);
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch) {
      const std::size_t bsz = std::min<std::size_t>(cfg.batch, n - start);
      const std::size_t nchunks = (bsz + kBatchChunk - 1) / kBatchChunk;
      par::for_chunks(bsz, kBatchChunk, mode,
                      [&](std::size_t c, std::size_t b, std::size_t e) {
        ChunkScratch& s = scratch[c];
        s.grads.zero();
        s.loss_sum = 0.0;
        for (std::size_t bi = b; bi < e; ++bi) {
          const std::size_t idx = order[start + bi];
          std::span<const double> x = data.point(idx);
          const int y = data.labels[idx];
          std::span<const double> xin = x;
          if (cfg.mode != TrainMode::Natural) {
            Rng arng = Rng::substream(
                seed, "attack",
                static_cast<std::uint64_t>(epoch) * n + idx);
            apply_attack(model, x, y, cfg.attack, arng,
                         wants_cells ? &cells[idx] : nullptr, s.ws, s.adv);
            xin = std::span<const double>(s.adv);
          }
          s.loss_sum +=
              loss_and_grads(model, xin, y, s.example_grads, s.ws.net);
          s.grads.add_scaled(1.0, s.example_grads);
        }
      });
      batch_grads.zero();
      double batch_loss = 0.0;
      // Chunk partials combine in index order: the sum is schedule-free.
      for (std::size_t c = 0; c < nchunks; ++c) {
        batch_grads.add_scaled(1.0 / static_cast<double>(bsz),
                               scratch[c].grads);
        batch_loss += scratch[c].loss_sum;
      }
      epoch_loss += batch_loss;
      opt_step(opt, model, batch_grads);
    }
    epoch_loss /= static_cast<double>(n);
    out.final_loss = epoch_loss;
    out.epochs_run = epoch + 1;
    if (epoch_loss < cfg.early_stop_loss) break;
  }
  out.model = std::move(model);
  return out;
}

TrainResult train(const LabeledDataset& data, const TrainConfig& cfg,
                  par::Mode mode) {
  validate_train_config(cfg, data);
  TrainResult result;
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < cfg.retrainings; ++r)
    result.runs.push_back(train_single(data, cfg, cfg.seed + r, mode));
  auto t1 = std::chrono::steady_clock::now();
  result.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

}  // namespace mrl
