#include "mrl/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrl {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Ascent direction from the gradient; false when the gradient vanishes.
bool ascent_direction(std::span<double> g, Norm p) {
  if (p == Norm::Linf) {
    bool any = false;
    for (auto& v : g) {
      v = sign(v);
      any = any || v != 0.0;
    }
    return any;
  }
  double n = norm_of(g, Norm::L2);
  if (n == 0.0) return false;
  for (auto& v : g) v /= n;
  return true;
}

// Pull y back into the l-p ball of radius eps around x.
void project_ball(std::span<const double> x, std::span<double> y, double eps,
                  Norm p) {
  if (p == Norm::Linf) {
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = std::clamp(y[i], x[i] - eps, x[i] + eps);
    return;
  }
  double n = distance(x, y, Norm::L2);
  if (n > eps) {
    double s = eps / n;
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = x[i] + s * (y[i] - x[i]);
  }
}

void check_attack_args(const MlpModel& model, std::span<const double> x,
                       std::span<double> out) {
  if (x.size() != static_cast<std::size_t>(model.dims.d_in) ||
      out.size() != x.size())
    throw std::invalid_argument("attack: dimension mismatch");
}

}  // namespace

std::string attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::Fgsm: return "fgsm";
    case AttackKind::Bim: return "bim";
    case AttackKind::BallPgd: return "ball_pgd";
    case AttackKind::VoronoiPgd: return "voronoi_pgd";
  }
  throw std::invalid_argument("attack_name: bad kind");
}

AttackKind attack_from_name(const std::string& name) {
  if (name == "fgsm") return AttackKind::Fgsm;
  if (name == "bim") return AttackKind::Bim;
  if (name == "ball_pgd") return AttackKind::BallPgd;
  if (name == "voronoi_pgd") return AttackKind::VoronoiPgd;
  throw std::invalid_argument("unknown attack: " + name);
}

AttackConfig fgsm_config(Norm p, double eps) {
  AttackConfig c;
  c.kind = AttackKind::Fgsm;
  c.p = p;
  c.epsilon = eps;
  c.iters = 1;
  return c;
}

AttackConfig bim_config(Norm p, double eps, int iters) {
  AttackConfig c;
  c.kind = AttackKind::Bim;
  c.p = p;
  c.epsilon = eps;
  c.iters = iters;
  c.step = iters > 0 ? 2.5 * eps / iters : 0.0;
  c.random_start = false;
  return c;
}

AttackConfig ball_pgd_config(Norm p, double eps, int iters) {
  AttackConfig c = bim_config(p, eps, iters);
  c.kind = AttackKind::BallPgd;
  c.random_start = true;
  return c;
}

AttackConfig voronoi_pgd_config(Norm p, double step, int iters) {
  AttackConfig c;
  c.kind = AttackKind::VoronoiPgd;
  c.p = p;
  c.epsilon = 0.0;
  c.step = step;
  c.iters = iters;
  return c;
}

void AttackWorkspace::resize(const MlpDims& dims) {
  net.resize(dims);
  gx.assign(dims.d_in, 0.0);
  trial.assign(dims.d_in, 0.0);
}

void fgsm_into(const MlpModel& model, std::span<const double> x, int label,
               double eps, Norm p, AttackWorkspace& ws,
               std::span<double> out) {
  check_attack_args(model, x, out);
  if (eps < 0.0) throw std::invalid_argument("fgsm: eps < 0");
  std::copy(x.begin(), x.end(), out.begin());
  if (eps == 0.0) return;
  loss_and_input_grad(model, x, label, ws.gx, ws.net);
  if (!ascent_direction(ws.gx, p)) return;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps * ws.gx[i];
}

void ball_pgd_into(const MlpModel& model, std::span<const double> x, int label,
                   const AttackConfig& cfg, Rng& rng, AttackWorkspace& ws,
                   std::span<double> out) {
  check_attack_args(model, x, out);
  if (cfg.epsilon < 0.0 || cfg.step < 0.0 || cfg.iters < 0)
    throw std::invalid_argument("ball_pgd: bad config");
  std::copy(x.begin(), x.end(), out.begin());
  if (cfg.epsilon == 0.0 || cfg.step == 0.0 || cfg.iters == 0) return;
  const int d = model.dims.d_in;
  if (cfg.random_start) {
    if (cfg.p == Norm::Linf) {
      for (int i = 0; i < d; ++i)
        out[i] = x[i] + rng.uniform(-cfg.epsilon, cfg.epsilon);
    } else {
      for (;;) {
        double n = 0.0;
        for (int i = 0; i < d; ++i) {
          ws.trial[i] = rng.normal();
          n += ws.trial[i] * ws.trial[i];
        }
        n = std::sqrt(n);
        if (n <= 1e-12) continue;
        double r = cfg.epsilon * std::pow(rng.uniform_pos(), 1.0 / d);
        for (int i = 0; i < d; ++i) out[i] = x[i] + r * ws.trial[i] / n;
        break;
      }
    }
  }
  for (int it = 0; it < cfg.iters; ++it) {
    loss_and_input_grad(model, out, label, ws.gx, ws.net);
    if (!ascent_direction(ws.gx, cfg.p)) break;
    for (int i = 0; i < d; ++i) out[i] += cfg.step * ws.gx[i];
    project_ball(x, out, cfg.epsilon, cfg.p);
  }
}

void voronoi_pgd_into(const MlpModel& model, std::span<const double> x,
                      int label, const ConstraintSet& cs,
                      const AttackConfig& cfg, AttackWorkspace& ws,
                      std::span<double> out) {
  check_attack_args(model, x, out);
  if (cs.d != model.dims.d_in)
    throw std::invalid_argument("voronoi_pgd: constraint dimension mismatch");
  if (cfg.step < 0.0 || cfg.iters < 0)
    throw std::invalid_argument("voronoi_pgd: bad config");
  std::copy(x.begin(), x.end(), out.begin());
  if (cfg.step == 0.0 || cfg.iters == 0) return;
  const int d = model.dims.d_in;
  for (int it = 0; it < cfg.iters; ++it) {
    loss_and_input_grad(model, out, label, ws.gx, ws.net);
    if (!ascent_direction(ws.gx, cfg.p)) return;
    for (int i = 0; i < d; ++i) ws.trial[i] = out[i] + cfg.step * ws.gx[i];
    std::span<const double> trial{ws.trial.data(), static_cast<std::size_t>(d)};
    // First infeasible iterate ends the attack at the last feasible one.
    if (!in_voronoi_cell(cs, trial, cfg.p)) return;
    std::copy(ws.trial.begin(), ws.trial.end(), out.begin());
  }
}

void apply_attack(const MlpModel& model, std::span<const double> x, int label,
                  const AttackConfig& cfg, Rng& rng, const ConstraintSet* cs,
                  AttackWorkspace& ws, std::span<double> out) {
  switch (cfg.kind) {
    case AttackKind::Fgsm:
      fgsm_into(model, x, label, cfg.epsilon, cfg.p, ws, out);
      return;
    case AttackKind::Bim:
    case AttackKind::BallPgd:
      ball_pgd_into(model, x, label, cfg, rng, ws, out);
      return;
    case AttackKind::VoronoiPgd:
      if (cs == nullptr)
        throw std::invalid_argument("apply_attack: missing constraint set");
      voronoi_pgd_into(model, x, label, *cs, cfg, ws, out);
      return;
  }
  throw std::invalid_argument("apply_attack: bad kind");
}

std::vector<double> fgsm(const MlpModel& model, std::span<const double> x,
                         int label, double eps, Norm p) {
  AttackWorkspace ws;
  ws.resize(model.dims);
  std::vector<double> out(x.size());
  fgsm_into(model, x, label, eps, p, ws, out);
  return out;
}

std::vector<double> ball_pgd(const MlpModel& model, std::span<const double> x,
                             int label, const AttackConfig& cfg, Rng& rng) {
  AttackWorkspace ws;
  ws.resize(model.dims);
  std::vector<double> out(x.size());
  ball_pgd_into(model, x, label, cfg, rng, ws, out);
  return out;
}

std::vector<double> voronoi_pgd(const MlpModel& model,
                                std::span<const double> x, int label,
                                const ConstraintSet& cs,
                                const AttackConfig& cfg) {
  AttackWorkspace ws;
  ws.resize(model.dims);
  std::vector<double> out(x.size());
  voronoi_pgd_into(model, x, label, cs, cfg, ws, out);
  return out;
}

}  // namespace mrl
