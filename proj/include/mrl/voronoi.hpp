#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mrl/dataset.hpp"
#include "mrl/parallel.hpp"

namespace mrl {

// Exact brute-force nearest-neighbor index over a labeled point set. Ties
// resolve to the lowest point index, so results are reproducible.
struct NeighborIndex {
  std::vector<double> points;  // row-major size() x d
  std::vector<int> labels;
  int d = 0;
  Norm p = Norm::L2;

  static NeighborIndex build(const LabeledDataset& ds, Norm p);
  std::size_t size() const { return labels.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
};

struct NnHit {
  std::size_t index = 0;
  double dist = 0.0;
};

NnHit nearest(const NeighborIndex& index, std::span<const double> q);
int nn_classify(const NeighborIndex& index, std::span<const double> q);

// Nearest hits for nq row-major queries.
std::vector<NnHit> nearest_batch(const NeighborIndex& index,
                                 const double* queries, std::size_t nq,
                                 par::Mode mode = par::default_mode());
std::vector<int> nn_classify_batch(const NeighborIndex& index,
                                   const double* queries, std::size_t nq,
                                   par::Mode mode = par::default_mode());

// An anchor point plus, per rival class, its m nearest points of that class.
// A query inside the cell is at least as close to the anchor as to every
// rival, so staying inside keeps the anchor's 1-NN label defensible.
struct ConstraintSet {
  std::vector<double> anchor;
  std::vector<double> rivals;  // row-major n_rivals x d
  std::vector<std::size_t> rival_ids;  // indices into the source index
  int d = 0;
  int m = 0;

  std::size_t n_rivals() const { return rival_ids.size(); }
  std::span<const double> rival(std::size_t r) const {
    return {rivals.data() + r * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
};

// Constraint set for index point anchor_id: the m nearest points of each
// class other than the anchor's, ties to the lowest index. Classes with
// fewer than m points contribute all of them.
ConstraintSet constraint_set(const NeighborIndex& index, std::size_t anchor_id,
                             int m);

// True when q is no farther from the anchor than from every rival
// (boundaries count as inside).
bool in_voronoi_cell(const ConstraintSet& cs, std::span<const double> q,
                     Norm p);

struct CertResult {
  bool ok = false;
  bool beyond_reach = false;  // eps outside the certifiable range entirely
};

// Certification tests for a labeled delta-cover of a manifold pair whose
// decision axis lies at distance `reach`: the 1-NN rule is correct on the
// whole eps-tube when delta <= 2 * (reach - eps); covering the tube with
// radius-delta balls instead needs delta <= reach - eps.
CertResult certify_nn_cover(double delta, double reach, double eps);
CertResult certify_ball_cover(double delta, double reach, double eps);

}  // namespace mrl
