#include "mrl/dataset.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mrl {

double distance(std::span<const double> a, std::span<const double> b, Norm p) {
  if (a.size() != b.size())
    throw std::invalid_argument("distance: dimension mismatch");
  if (p == Norm::L2) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double t = a[i] - b[i];
      s += t * t;
    }
    return std::sqrt(s);
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm_of(std::span<const double> v, Norm p) {
  if (p == Norm::L2) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool ManifoldSpec::has_reach() const {
  return std::isfinite(reach_decision_axis) && std::isfinite(medial_reach);
}

double ManifoldSpec::class_vol(int label) const {
  if (label < 1 || label > n_classes)
    throw std::invalid_argument("class_vol: label out of range");
  switch (kind) {
    case ManifoldKind::Circles:
      return 2.0 * std::numbers::pi * (label == 1 ? r1 : r2);
    case ManifoldKind::Planes:
      return (hi - lo) * (hi - lo);
    case ManifoldKind::Ingested:
      throw std::invalid_argument("class_vol: unknown for ingested data");
  }
  throw std::invalid_argument("class_vol: bad kind");
}

ManifoldSpec circles_spec(int codim) {
  if (codim < 0) throw std::invalid_argument("circles_spec: codim < 0");
  ManifoldSpec s;
  s.kind = ManifoldKind::Circles;
  s.k = 1;
  s.d = 2 + codim;
  s.n_classes = 2;
  // Decision axis sits at the radius midway between the circles; the inner
  // circle also has a medial point at the origin, at distance r1.
  s.reach_decision_axis = (s.r2 - s.r1) / 2.0;
  s.medial_reach = std::min(s.r1, (s.r2 - s.r1) / 2.0);
  s.vol_k = 2.0 * std::numbers::pi * (s.r1 + s.r2);
  return s;
}

ManifoldSpec planes_spec(int codim) {
  if (codim < 1)
    throw std::invalid_argument("planes_spec: needs a separating coordinate");
  ManifoldSpec s;
  s.kind = ManifoldKind::Planes;
  s.k = 2;
  s.d = 2 + codim;
  s.n_classes = 2;
  // Parallel patches one separation apart; the decision axis is the midplane.
  s.reach_decision_axis = s.separation / 2.0;
  s.medial_reach = s.separation / 2.0;
  s.vol_k = 2.0 * (s.hi - s.lo) * (s.hi - s.lo);
  return s;
}

ManifoldSpec ingested_spec(int d, int n_classes) {
  if (d < 1 || n_classes < 2)
    throw std::invalid_argument("ingested_spec: bad shape");
  ManifoldSpec s;
  s.kind = ManifoldKind::Ingested;
  s.k = 0;
  s.d = d;
  s.n_classes = n_classes;
  return s;
}

double label_accuracy(const std::vector<int>& predicted,
                      const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || truth.empty())
    throw std::invalid_argument("label_accuracy: size mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace mrl
