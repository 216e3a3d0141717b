#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mrl/dataset.hpp"
#include "mrl/parallel.hpp"
#include "mrl/rng.hpp"

namespace mrl {

// Two concentric circles (class 1 at radius r1, class 2 at r2) embedded in
// d = 2 + codim dimensions, angles uniform, trailing coordinates zero.
// Emits all class-1 points first. Identical (args, seed) give identical bits.
LabeledDataset make_circles(int n_per_class, int codim, std::uint64_t seed);

// Two parallel plane patches on a regular vertex grid: class c's patch spans
// [lo, hi]^2 in the first two coordinates, the last coordinate is 0 for
// class 1 and `separation` for class 2, everything between is zero. Train set
// holds the vertices_per_axis^2 grid vertices per class, test set the cell
// centers. Deterministic, no randomness involved.
std::pair<LabeledDataset, LabeledDataset> make_planes(int vertices_per_axis,
                                                      int codim);

// Vertex count per axis for a named cover level: 1.0 -> 15, 0.5 -> 29,
// 0.25 -> 57. Halving the level halves the grid spacing.
int planes_vertices_for_cover(double cover_level);

// Directed cover radius: max over reference points of the distance to the
// nearest candidate point of the same class. A class present in the
// reference but absent from the candidate is uncoverable: +infinity.
double measure_delta_cover(const LabeledDataset& candidate,
                           const LabeledDataset& reference, Norm p,
                           par::Mode mode = par::default_mode());

enum class TubeRadial { Ball, Shell };

// n points within l-p distance eps of class class_id's manifold: a uniform
// on-manifold draw plus a normal-space perturbation. Ball fills the tube
// uniformly (radius eps * u^(1/(d-k))); Shell pins the radius at eps, the
// worst case for certification. eps must stay below the reach.
std::vector<double> tube_sample(const ManifoldSpec& spec, int class_id,
                                double eps, Norm p, std::size_t n,
                                std::uint64_t seed,
                                TubeRadial radial = TubeRadial::Ball);

// One on-manifold point for class class_id, written to out (length spec.d).
void sample_on_manifold(const ManifoldSpec& spec, int class_id, Rng& rng,
                        std::span<double> out);

// Exact l2 distance from x to class class_id's manifold.
double distance_to_class_manifold(const ManifoldSpec& spec, int class_id,
                                  std::span<const double> x);

// Upper bound for the fraction of an eps-tube around a k-manifold of volume
// vol_k that n sample balls of radius eps can fill, in ambient dimension d:
// Gamma((d-k)/2 + 1) / Gamma(d/2 + 1) * pi^(k/2) * eps^k * n / vol_k,
// evaluated through lgamma so large d stays finite.
double coverage_ratio_bound(int d, int k, double eps, std::size_t n,
                            double vol_k);

// Stirling form of the same bound: (2 pi / (d - k))^(k/2) * eps^k * n / vol_k.
double coverage_ratio_asymptotic(int d, int k, double eps, std::size_t n,
                                 double vol_k);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t hits = 0;
  std::size_t n = 0;
};

// Monte Carlo estimate of the covered fraction of the eps-tube around the
// train set's manifolds: draw tube points (classes weighted by manifold
// volume), count those within l2 eps of some train point. n_mc < 1000 is
// refused as statistically meaningless.
McEstimate coverage_ratio_mc(const LabeledDataset& train, double eps,
                             std::size_t n_mc, std::uint64_t seed,
                             par::Mode mode = par::default_mode());

struct CoveringGap {
  double delta_nn = 0.0;     // cover radius sufficient for the 1-NN rule
  double delta_ball = 0.0;   // cover radius needed for plain eps-balls
  double count_ratio_lower = 0.0;  // lower bound on ball/nn cover sizes
};

// For a k-flat at unit separation scale: the 1-NN classifier tolerates a
// cover of radius 2*sqrt(1-eps), plain balls need sqrt(1-eps^2), and the
// cover sizes differ by at least (4 / (1 + eps))^(k/2). eps in [0, 1).
CoveringGap covering_gap(int k, double eps);

struct CoverCounts {
  double n_nn = 0.0;
  double n_ball = 0.0;
  int per_axis_nn = 0;
  int per_axis_ball = 0;
  double ratio() const { return n_ball / n_nn; }
};

// Sizes of concrete axis-aligned grid covers of the two plane patches (side
// `side` per axis, k grid axes) at the radii from covering_gap. Constructive
// check that the count ratio bound is attained by real covers.
CoverCounts cover_grid_counts(int k, double eps, double side = 20.0);

}  // namespace mrl
