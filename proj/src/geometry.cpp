#include "mrl/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mrl {

namespace {

constexpr std::size_t kCoverChunk = 256;
constexpr std::size_t kMcChunk = 1024;

// Squared l2 distance with early exit once the partial sum clears cap.
double dist_sq_capped(const double* a, const double* b, int d, double cap) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double t = a[i] - b[i];
    s += t * t;
    if (s > cap) return s;
  }
  return s;
}

double dist_inf_capped(const double* a, const double* b, int d, double cap) {
  double m = 0.0;
  for (int i = 0; i < d; ++i) {
    double t = std::abs(a[i] - b[i]);
    if (t > m) {
      m = t;
      if (m >= cap) return m;
    }
  }
  return m;
}

// Unit l-p direction. Gaussian for l2, a normalized cube draw for l-inf.
void unit_direction(Rng& rng, Norm p, std::span<double> dir) {
  for (;;) {
    double nrm = 0.0;
    if (p == Norm::L2) {
      for (auto& x : dir) x = rng.normal();
      for (double x : dir) nrm += x * x;
      nrm = std::sqrt(nrm);
    } else {
      for (auto& x : dir) x = rng.uniform(-1.0, 1.0);
      for (double x : dir) nrm = std::max(nrm, std::abs(x));
    }
    if (nrm > 1e-12) {
      for (auto& x : dir) x /= nrm;
      return;
    }
  }
}

// Perturbs an on-manifold row inside the normal space at that point. With the
// radial law eps*u^(1/q), q the normal dimension, the offset is uniform in the
// normal q-ball, so base x offset is the uniform tube measure for the flat
// patches (for circles it is the documented bounded-curvature approximation).
// An ambient-ball offset would not be: its mass concentrates near the manifold
// and the coverage estimate would overshoot the closed-form bound.
void add_normal_offset(const ManifoldSpec& spec, Rng& rng, Norm p, double eps,
                       TubeRadial radial, std::span<double> row,
                       std::span<double> w) {
  const int q = spec.d - spec.k;
  unit_direction(rng, p, w.first(q));
  // Same draws either way, so Ball and Shell runs share points/directions.
  double u = rng.uniform_pos();
  double r = radial == TubeRadial::Ball ? eps * std::pow(u, 1.0 / q) : eps;
  if (spec.kind == ManifoldKind::Circles) {
    double rho = std::hypot(row[0], row[1]);
    row[0] += r * w[0] * (row[0] / rho);
    row[1] += r * w[0] * (row[1] / rho);
    for (int j = 1; j < q; ++j) row[j + 1] += r * w[j];
  } else {
    for (int j = 0; j < q; ++j) row[j + 2] += r * w[j];
  }
}

}  // namespace

LabeledDataset make_circles(int n_per_class, int codim, std::uint64_t seed) {
  if (n_per_class <= 0)
    throw std::invalid_argument("make_circles: n_per_class must be positive");
  LabeledDataset ds;
  ds.spec = circles_spec(codim);
  ds.role = DatasetRole::Train;
  ds.seed = seed;
  const int d = ds.spec.d;
  ds.points.assign(static_cast<std::size_t>(2 * n_per_class) * d, 0.0);
  ds.labels.reserve(2 * static_cast<std::size_t>(n_per_class));
  Rng rng = Rng::substream(seed, "circles");
  std::size_t row = 0;
  for (int cls = 1; cls <= 2; ++cls) {
    const double r = cls == 1 ? ds.spec.r1 : ds.spec.r2;
    for (int i = 0; i < n_per_class; ++i, ++row) {
      double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      ds.points[row * d + 0] = r * std::cos(theta);
      ds.points[row * d + 1] = r * std::sin(theta);
      ds.labels.push_back(cls);
    }
  }
  return ds;
}

int planes_vertices_for_cover(double cover_level) {
  if (!(cover_level > 0.0))
    throw std::invalid_argument("planes_vertices_for_cover: level <= 0");
  double v = 14.0 / cover_level;
  double r = std::round(v);
  if (std::abs(v - r) > 1e-9)
    throw std::invalid_argument(
        "planes_vertices_for_cover: level must divide the base grid");
  return static_cast<int>(r) + 1;
}

std::pair<LabeledDataset, LabeledDataset> make_planes(int vertices_per_axis,
                                                      int codim) {
  if (vertices_per_axis < 2)
    throw std::invalid_argument("make_planes: need at least 2 vertices");
  ManifoldSpec spec = planes_spec(codim);
  const int d = spec.d;
  const int n = vertices_per_axis;
  const double spacing = (spec.hi - spec.lo) / (n - 1);

  LabeledDataset train;
  train.spec = spec;
  train.role = DatasetRole::Train;
  train.points.assign(static_cast<std::size_t>(2) * n * n * d, 0.0);
  train.labels.reserve(static_cast<std::size_t>(2) * n * n);

  LabeledDataset test;
  test.spec = spec;
  test.role = DatasetRole::Test;
  test.points.assign(static_cast<std::size_t>(2) * (n - 1) * (n - 1) * d, 0.0);
  test.labels.reserve(static_cast<std::size_t>(2) * (n - 1) * (n - 1));

  std::size_t row = 0;
  for (int cls = 1; cls <= 2; ++cls) {
    const double off = cls == 1 ? 0.0 : spec.separation;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j, ++row) {
        double* p = train.points.data() + row * d;
        p[0] = spec.lo + i * spacing;
        p[1] = spec.lo + j * spacing;
        p[d - 1] = off;
        train.labels.push_back(cls);
      }
    }
  }
  row = 0;
  for (int cls = 1; cls <= 2; ++cls) {
    const double off = cls == 1 ? 0.0 : spec.separation;
    for (int i = 0; i + 1 < n; ++i) {
      for (int j = 0; j + 1 < n; ++j, ++row) {
        double* p = test.points.data() + row * d;
        p[0] = spec.lo + (i + 0.5) * spacing;
        p[1] = spec.lo + (j + 0.5) * spacing;
        p[d - 1] = off;
        test.labels.push_back(cls);
      }
    }
  }
  return {std::move(train), std::move(test)};
}

double measure_delta_cover(const LabeledDataset& candidate,
                           const LabeledDataset& reference, Norm p,
                           par::Mode mode) {
  if (candidate.spec.d != reference.spec.d)
    throw std::invalid_argument("measure_delta_cover: dimension mismatch");
  const int d = candidate.dim();
  // Candidate rows grouped by class; a reference class with no candidates
  // cannot be covered at any radius.
  int max_label = 0;
  for (int l : candidate.labels) max_label = std::max(max_label, l);
  for (int l : reference.labels) max_label = std::max(max_label, l);
  std::vector<std::vector<std::size_t>> by_class(max_label + 1);
  for (std::size_t i = 0; i < candidate.size(); ++i)
    by_class[candidate.labels[i]].push_back(i);

  const std::size_t n = reference.size();
  const std::size_t nchunks = (n + kCoverChunk - 1) / kCoverChunk;
  std::vector<double> chunk_max(nchunks, 0.0);
  par::for_chunks(n, kCoverChunk, mode,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
    double mx = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      const auto& cand = by_class[reference.labels[i]];
      if (cand.empty()) {
        mx = std::numeric_limits<double>::infinity();
        break;
      }
      const double* q = reference.points.data() + i * d;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t idx : cand) {
        const double* x = candidate.points.data() + idx * d;
        double dist = p == Norm::L2 ? dist_sq_capped(q, x, d, best)
                                    : dist_inf_capped(q, x, d, best);
        if (dist < best) best = dist;
      }
      if (p == Norm::L2) best = std::sqrt(best);
      mx = std::max(mx, best);
    }
    chunk_max[c] = mx;
  });
  double out = 0.0;
  for (double m : chunk_max) out = std::max(out, m);
  return out;
}

void sample_on_manifold(const ManifoldSpec& spec, int class_id, Rng& rng,
                        std::span<double> out) {
  if (class_id < 1 || class_id > spec.n_classes)
    throw std::invalid_argument("sample_on_manifold: label out of range");
  if (out.size() != static_cast<std::size_t>(spec.d))
    throw std::invalid_argument("sample_on_manifold: bad output size");
  std::fill(out.begin(), out.end(), 0.0);
  switch (spec.kind) {
    case ManifoldKind::Circles: {
      double r = class_id == 1 ? spec.r1 : spec.r2;
      double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      out[0] = r * std::cos(theta);
      out[1] = r * std::sin(theta);
      return;
    }
    case ManifoldKind::Planes: {
      out[0] = rng.uniform(spec.lo, spec.hi);
      out[1] = rng.uniform(spec.lo, spec.hi);
      out[spec.d - 1] = class_id == 1 ? 0.0 : spec.separation;
      return;
    }
    case ManifoldKind::Ingested:
      throw std::invalid_argument("sample_on_manifold: no known geometry");
  }
}

std::vector<double> tube_sample(const ManifoldSpec& spec, int class_id,
                                double eps, Norm p, std::size_t n,
                                std::uint64_t seed, TubeRadial radial) {
  if (!spec.has_reach())
    throw std::invalid_argument("tube_sample: geometry unknown");
  if (eps < 0.0) throw std::invalid_argument("tube_sample: eps < 0");
  if (eps >= spec.reach_decision_axis)
    throw std::invalid_argument("tube_sample: eps at or beyond the reach");
  const int d = spec.d;
  std::vector<double> out(n * static_cast<std::size_t>(d));
  std::vector<double> w(d - spec.k);
  Rng rng = Rng::substream(seed, "tube");
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> row{out.data() + i * d, static_cast<std::size_t>(d)};
    sample_on_manifold(spec, class_id, rng, row);
    if (eps == 0.0) continue;
    add_normal_offset(spec, rng, p, eps, radial, row, w);
  }
  return out;
}

double distance_to_class_manifold(const ManifoldSpec& spec, int class_id,
                                  std::span<const double> x) {
  if (class_id < 1 || class_id > spec.n_classes)
    throw std::invalid_argument("distance_to_class_manifold: bad label");
  if (x.size() != static_cast<std::size_t>(spec.d))
    throw std::invalid_argument("distance_to_class_manifold: bad dimension");
  const int d = spec.d;
  switch (spec.kind) {
    case ManifoldKind::Circles: {
      double r = class_id == 1 ? spec.r1 : spec.r2;
      double rho = std::hypot(x[0], x[1]);
      double s = (rho - r) * (rho - r);
      for (int i = 2; i < d; ++i) s += x[i] * x[i];
      return std::sqrt(s);
    }
    case ManifoldKind::Planes: {
      auto excess = [&](double v) {
        if (v < spec.lo) return spec.lo - v;
        if (v > spec.hi) return v - spec.hi;
        return 0.0;
      };
      double off = class_id == 1 ? 0.0 : spec.separation;
      double s = excess(x[0]) * excess(x[0]) + excess(x[1]) * excess(x[1]);
      for (int i = 2; i + 1 < d; ++i) s += x[i] * x[i];
      s += (x[d - 1] - off) * (x[d - 1] - off);
      return std::sqrt(s);
    }
    case ManifoldKind::Ingested:
      throw std::invalid_argument(
          "distance_to_class_manifold: no known geometry");
  }
  throw std::invalid_argument("distance_to_class_manifold: bad kind");
}

double coverage_ratio_bound(int d, int k, double eps, std::size_t n,
                            double vol_k) {
  if (k < 1 || d <= k)
    throw std::invalid_argument("coverage_ratio_bound: need d > k >= 1");
  if (eps < 0.0 || !std::isfinite(eps))
    throw std::invalid_argument("coverage_ratio_bound: bad eps");
  if (!(vol_k > 0.0) || !std::isfinite(vol_k))
    throw std::invalid_argument("coverage_ratio_bound: bad vol_k");
  if (n == 0 || eps == 0.0) return 0.0;
  double lg = std::lgamma((d - k) / 2.0 + 1.0) - std::lgamma(d / 2.0 + 1.0);
  double logv = lg + 0.5 * k * std::log(std::numbers::pi) +
                k * std::log(eps) + std::log(static_cast<double>(n)) -
                std::log(vol_k);
  return std::exp(logv);
}

double coverage_ratio_asymptotic(int d, int k, double eps, std::size_t n,
                                 double vol_k) {
  if (k < 1 || d <= k)
    throw std::invalid_argument("coverage_ratio_asymptotic: need d > k >= 1");
  if (!(vol_k > 0.0))
    throw std::invalid_argument("coverage_ratio_asymptotic: bad vol_k");
  return std::pow(2.0 * std::numbers::pi / (d - k), 0.5 * k) *
         std::pow(eps, k) * static_cast<double>(n) / vol_k;
}

McEstimate coverage_ratio_mc(const LabeledDataset& train, double eps,
                             std::size_t n_mc, std::uint64_t seed,
                             par::Mode mode) {
  if (n_mc < 1000)
    throw std::invalid_argument("coverage_ratio_mc: n_mc too small");
  const ManifoldSpec& spec = train.spec;
  if (!spec.has_reach())
    throw std::invalid_argument("coverage_ratio_mc: geometry unknown");
  if (!(eps > 0.0) || eps > spec.medial_reach)
    throw std::invalid_argument(
        "coverage_ratio_mc: eps must lie in (0, medial_reach]");
  if (train.size() == 0)
    throw std::invalid_argument("coverage_ratio_mc: empty train set");

  const int d = spec.d;
  const double eps2 = eps * eps;
  std::vector<double> cum(spec.n_classes);
  double total = 0.0;
  for (int c = 1; c <= spec.n_classes; ++c) {
    total += spec.class_vol(c);
    cum[c - 1] = total;
  }

  const std::size_t nchunks = (n_mc + kMcChunk - 1) / kMcChunk;
  std::vector<std::size_t> chunk_hits(nchunks, 0);
  par::for_chunks(n_mc, kMcChunk, mode,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
    Rng rng = Rng::substream(seed, "mc", c);
    std::vector<double> pt(d), w(d - spec.k);
    std::size_t hits = 0;
    for (std::size_t i = b; i < e; ++i) {
      double u = rng.uniform() * total;
      int cls = 1;
      while (cls < spec.n_classes && u >= cum[cls - 1]) ++cls;
      sample_on_manifold(spec, cls, rng, pt);
      add_normal_offset(spec, rng, Norm::L2, eps, TubeRadial::Ball, pt, w);
      for (std::size_t t = 0; t < train.size(); ++t) {
        const double* x = train.points.data() + t * d;
        if (dist_sq_capped(pt.data(), x, d, eps2) <= eps2) {
          ++hits;
          break;
        }
      }
    }
    chunk_hits[c] = hits;
  });

  McEstimate est;
  est.n = n_mc;
  for (std::size_t h : chunk_hits) est.hits += h;
  est.value = static_cast<double>(est.hits) / static_cast<double>(n_mc);
  est.std_error =
      std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n_mc));
  return est;
}

CoveringGap covering_gap(int k, double eps) {
  if (k < 1) throw std::invalid_argument("covering_gap: k < 1");
  if (eps < 0.0 || eps >= 1.0)
    throw std::invalid_argument("covering_gap: eps must lie in [0, 1)");
  CoveringGap g;
  g.delta_nn = 2.0 * std::sqrt(1.0 - eps);
  g.delta_ball = std::sqrt(1.0 - eps * eps);
  g.count_ratio_lower = std::pow(4.0 / (1.0 + eps), 0.5 * k);
  return g;
}

CoverCounts cover_grid_counts(int k, double eps, double side) {
  if (!(side > 0.0)) throw std::invalid_argument("cover_grid_counts: side");
  CoveringGap g = covering_gap(k, eps);
  auto per_axis = [&](double delta) {
    // Grid spacing s makes the cell half-diagonal equal delta.
    double s = 2.0 * delta / std::sqrt(static_cast<double>(k));
    return static_cast<int>(std::ceil(side / s - 1e-9)) + 1;
  };
  CoverCounts c;
  c.per_axis_nn = per_axis(g.delta_nn);
  c.per_axis_ball = per_axis(g.delta_ball);
  c.n_nn = 2.0 * std::pow(static_cast<double>(c.per_axis_nn), k);
  c.n_ball = 2.0 * std::pow(static_cast<double>(c.per_axis_ball), k);
  return c;
}

}  // namespace mrl
