#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrl/attacks.hpp"
#include "mrl/dataset.hpp"
#include "mrl/net.hpp"
#include "mrl/parallel.hpp"

namespace mrl {

// Accuracy under each attack at each budget, plus the pointwise minimum
// (the robustness the weakest attack leaves standing).
struct RobustnessCurve {
  std::vector<double> eps_grid;
  std::vector<std::pair<std::string, std::vector<double>>> per_attack;
  std::vector<double> min_curve;
  std::size_t n_test = 0;
};

// n_points evenly spaced budgets from 0 to eps_max inclusive; n_points >= 2.
std::vector<double> eps_grid_for(double eps_max, int n_points);

// Evaluates the model against every suite attack at every grid budget. The
// grid must start at 0 and increase strictly; the suite must be nonempty and
// free of the cell-constrained attack (it has no budget axis to sweep). Per
// budget, ball attacks get epsilon = budget and step = 2.5 * budget / iters.
RobustnessCurve robustness_curve(const MlpModel& model,
                                 const LabeledDataset& test,
                                 std::span<const AttackConfig> suite,
                                 std::span<const double> eps_grid,
                                 std::uint64_t seed,
                                 par::Mode mode = par::default_mode());

// Normalized area under an accuracy curve: the trapezoid integral over the
// grid divided by the grid span. 1.0 means fully robust across the range.
double nauc(std::span<const double> eps_grid, std::span<const double> acc);

struct CurveAggregate {
  std::vector<double> eps_grid;
  std::vector<double> acc_mean, acc_std;  // of the min curve, per budget
  double nauc_mean = 0.0;
  double nauc_std = 0.0;
  std::size_t n_curves = 0;
};

// Mean and sample standard deviation across retraining curves sharing one
// grid.
CurveAggregate aggregate_curves(const std::vector<RobustnessCurve>& curves);

// Clean accuracy of the model on a labeled set.
double clean_accuracy(const MlpModel& model, const LabeledDataset& data,
                      par::Mode mode = par::default_mode());

}  // namespace mrl
