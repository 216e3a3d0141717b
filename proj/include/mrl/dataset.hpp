#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace mrl {

enum class Norm { L2, Linf };

double distance(std::span<const double> a, std::span<const double> b, Norm p);
double norm_of(std::span<const double> v, Norm p);

enum class ManifoldKind { Circles, Planes, Ingested };

// Geometry card for a dataset: intrinsic dimension k, ambient dimension d,
// and the scales that certification needs. reach_decision_axis bounds the
// certifiable perturbation budget; medial_reach bounds how far a tube can
// grow before touching the set of points with ambiguous nearest class.
// Ingested data has no known geometry, so both are NaN there.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Ingested;
  int k = 0;
  int d = 0;
  int n_classes = 2;
  double reach_decision_axis = std::numeric_limits<double>::quiet_NaN();
  double medial_reach = std::numeric_limits<double>::quiet_NaN();
  double vol_k = std::numeric_limits<double>::quiet_NaN();

  // Circles extent (two concentric circles in the first two coordinates).
  double r1 = 1.0;
  double r2 = 3.0;

  // Planes extent (two parallel hyperplane patches; the last coordinate
  // separates the classes, the first two span the patch).
  double lo = -10.0;
  double hi = 10.0;
  double separation = 2.0;

  int codim() const { return d - k; }
  bool has_reach() const;
  // Intrinsic k-volume of one class's manifold. Labels are 1-based.
  double class_vol(int label) const;
};

ManifoldSpec circles_spec(int codim);
ManifoldSpec planes_spec(int codim);
ManifoldSpec ingested_spec(int d, int n_classes);

enum class DatasetRole { Train, Test };

struct LabeledDataset {
  std::vector<double> points;  // row-major, size() x spec.d
  std::vector<int> labels;     // class ids in {1..C}
  ManifoldSpec spec;
  DatasetRole role = DatasetRole::Train;
  std::uint64_t seed = 0;  // generator seed, echoed into metadata

  std::size_t size() const { return labels.size(); }
  int dim() const { return spec.d; }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(spec.d),
            static_cast<std::size_t>(spec.d)};
  }
};

// Fraction of test points whose label matches `predicted`.
double label_accuracy(const std::vector<int>& predicted,
                      const std::vector<int>& truth);

}  // namespace mrl
