#pragma once

#include <span>
#include <string>
#include <vector>

#include "mrl/net.hpp"
#include "mrl/voronoi.hpp"

namespace mrl {

enum class AttackKind { Fgsm, Bim, BallPgd, VoronoiPgd };

std::string attack_name(AttackKind kind);
AttackKind attack_from_name(const std::string& name);

struct AttackConfig {
  AttackKind kind = AttackKind::Fgsm;
  Norm p = Norm::L2;
  double epsilon = 0.0;  // ball radius; 0 disables the perturbation
  double step = 0.0;     // per-iteration step size
  int iters = 1;
  bool random_start = false;
};

AttackConfig fgsm_config(Norm p, double eps);
// BIM: iterated FGSM from the clean point, projected into the ball after
// every step. Default step 2.5 * eps / iters.
AttackConfig bim_config(Norm p, double eps, int iters = 40);
// Same loop from a uniform random point of the ball.
AttackConfig ball_pgd_config(Norm p, double eps, int iters = 40);
AttackConfig voronoi_pgd_config(Norm p, double step, int iters = 40);

// Attack scratch: gradient and trial-point buffers plus the net workspace.
struct AttackWorkspace {
  MlpWorkspace net;
  std::vector<double> gx, trial;
  void resize(const MlpDims& dims);
};

// Single ascent step of size eps along the loss gradient (sign for l-inf,
// unit l2 direction otherwise). Zero gradient or eps == 0 returns x bitwise.
void fgsm_into(const MlpModel& model, std::span<const double> x, int label,
               double eps, Norm p, AttackWorkspace& ws,
               std::span<double> out);

// Projected gradient ascent inside the eps-ball around x; the iterate is
// pulled back into the ball after every step (coordinate clamp for l-inf,
// radial rescale for l2). eps == 0, step == 0, or iters == 0 returns x
// bitwise and draws nothing from rng.
void ball_pgd_into(const MlpModel& model, std::span<const double> x, int label,
                   const AttackConfig& cfg, Rng& rng, AttackWorkspace& ws,
                   std::span<double> out);

// Gradient ascent that stays inside the anchor's Voronoi cell: after each
// step the constraints are checked, and the first violating iterate is
// discarded, ending the attack at the last feasible point. cfg.epsilon and
// cfg.random_start are ignored; x itself must be feasible.
void voronoi_pgd_into(const MlpModel& model, std::span<const double> x,
                      int label, const ConstraintSet& cs,
                      const AttackConfig& cfg, AttackWorkspace& ws,
                      std::span<double> out);

// Dispatcher; cs may be null for everything except VoronoiPgd.
void apply_attack(const MlpModel& model, std::span<const double> x, int label,
                  const AttackConfig& cfg, Rng& rng, const ConstraintSet* cs,
                  AttackWorkspace& ws, std::span<double> out);

std::vector<double> fgsm(const MlpModel& model, std::span<const double> x,
                         int label, double eps, Norm p);
std::vector<double> ball_pgd(const MlpModel& model, std::span<const double> x,
                             int label, const AttackConfig& cfg, Rng& rng);
std::vector<double> voronoi_pgd(const MlpModel& model,
                                std::span<const double> x, int label,
                                const ConstraintSet& cs,
                                const AttackConfig& cfg);

}  // namespace mrl
