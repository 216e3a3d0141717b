#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrl/attacks.hpp"
#include "mrl/dataset.hpp"
#include "mrl/net.hpp"
#include "mrl/parallel.hpp"

namespace mrl {

enum class TrainMode { Natural, BallAdv, VoronoiAdv };

std::string train_mode_name(TrainMode mode);
TrainMode train_mode_from_name(const std::string& name);

struct TrainConfig {
  TrainMode mode = TrainMode::Natural;
  int epochs = 200;
  int batch = 64;
  int retrainings = 1;
  int hidden = 100;
  int m = 10;  // rivals kept per other class when building cells
  OptConfig opt;
  AttackConfig attack;  // inner maximization; ignored for Natural
  double early_stop_loss = 1e-4;
  std::uint64_t seed = 1;
};

struct TrainedModel {
  MlpModel model;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  int epochs_run = 0;
};

struct TrainResult {
  std::vector<TrainedModel> runs;
  double wall_seconds = 0.0;
};

// Rejects incompatible mode/attack pairs and malformed data before any
// training work starts.
void validate_train_config(const TrainConfig& cfg, const LabeledDataset& data);

// One model from one seed. Minibatch descent over shuffled epochs; the loss
// is the cross-entropy of the attacked batch (the clean batch for Natural).
// Stops early once an epoch's mean loss drops below early_stop_loss.
// Identical (data, cfg, seed) give a bit-identical model in either execution
// mode and for any thread count.
TrainedModel train_single(const LabeledDataset& data, const TrainConfig& cfg,
                          std::uint64_t seed,
                          par::Mode mode = par::default_mode());

// cfg.retrainings runs seeded seed, seed + 1, ...
TrainResult train(const LabeledDataset& data, const TrainConfig& cfg,
                  par::Mode mode = par::default_mode());

}  // namespace mrl
