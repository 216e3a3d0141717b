#include "mrl/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mrl {

namespace {

constexpr std::size_t kBatchChunk = 64;

double dist_sq(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

double dist_inf(const double* a, const double* b, int d) {
  double m = 0.0;
  for (int i = 0; i < d; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Comparable distance key: squared for l2 (monotone, cheaper), plain for
// l-inf.
double dist_key(const double* a, const double* b, int d, Norm p) {
  return p == Norm::L2 ? dist_sq(a, b, d) : dist_inf(a, b, d);
}

}  // namespace

NeighborIndex NeighborIndex::build(const LabeledDataset& ds, Norm p) {
  if (ds.size() == 0)
    throw std::invalid_argument("NeighborIndex: empty dataset");
  NeighborIndex idx;
  idx.points = ds.points;
  idx.labels = ds.labels;
  idx.d = ds.dim();
  idx.p = p;
  return idx;
}

NnHit nearest(const NeighborIndex& index, std::span<const double> q) {
  if (index.size() == 0) throw std::invalid_argument("nearest: empty index");
  if (q.size() != static_cast<std::size_t>(index.d))
    throw std::invalid_argument("nearest: dimension mismatch");
  std::size_t best = 0;
  double best_key = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < index.size(); ++i) {
    double key = dist_key(q.data(), index.points.data() + i * index.d,
                          index.d, index.p);
    if (key < best_key) {  // strict: ties keep the lowest index
      best_key = key;
      best = i;
    }
  }
  NnHit hit;
  hit.index = best;
  hit.dist = index.p == Norm::L2 ? std::sqrt(best_key) : best_key;
  return hit;
}

int nn_classify(const NeighborIndex& index, std::span<const double> q) {
  return index.labels[nearest(index, q).index];
}

std::vector<NnHit> nearest_batch(const NeighborIndex& index,
                                 const double* queries, std::size_t nq,
                                 par::Mode mode) {
  std::vector<NnHit> out(nq);
  par::for_chunks(nq, kBatchChunk, mode,
                  [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      out[i] = nearest(index, {queries + i * index.d,
                               static_cast<std::size_t>(index.d)});
  });
  return out;
}

std::vector<int> nn_classify_batch(const NeighborIndex& index,
                                   const double* queries, std::size_t nq,
                                   par::Mode mode) {
  std::vector<NnHit> hits = nearest_batch(index, queries, nq, mode);
  std::vector<int> out(nq);
  for (std::size_t i = 0; i < nq; ++i) out[i] = index.labels[hits[i].index];
  return out;
}

ConstraintSet constraint_set(const NeighborIndex& index, std::size_t anchor_id,
                             int m) {
  if (anchor_id >= index.size())
    throw std::invalid_argument("constraint_set: anchor out of range");
  if (m < 1) throw std::invalid_argument("constraint_set: m < 1");
  const int d = index.d;
  const int anchor_label = index.labels[anchor_id];
  const double* a = index.points.data() + anchor_id * d;

  ConstraintSet cs;
  cs.d = d;
  cs.m = m;
  cs.anchor.assign(a, a + d);

  int max_label = 0;
  for (int l : index.labels) max_label = std::max(max_label, l);
  // (key, index) pairs per rival class, sorted so ties stay index-ordered.
  std::vector<std::vector<std::pair<double, std::size_t>>> per_class(
      max_label + 1);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index.labels[i] == anchor_label) continue;
    double key = dist_key(a, index.points.data() + i * d, d, index.p);
    per_class[index.labels[i]].emplace_back(key, i);
  }
  for (auto& v : per_class) {
    std::size_t take = std::min<std::size_t>(m, v.size());
    std::partial_sort(v.begin(), v.begin() + take, v.end());
    for (std::size_t r = 0; r < take; ++r) cs.rival_ids.push_back(v[r].second);
  }
  cs.rivals.resize(cs.rival_ids.size() * static_cast<std::size_t>(d));
  for (std::size_t r = 0; r < cs.rival_ids.size(); ++r) {
    const double* src = index.points.data() + cs.rival_ids[r] * d;
    std::copy(src, src + d, cs.rivals.data() + r * d);
  }
  return cs;
}

bool in_voronoi_cell(const ConstraintSet& cs, std::span<const double> q,
                     Norm p) {
  if (q.size() != static_cast<std::size_t>(cs.d))
    throw std::invalid_argument("in_voronoi_cell: dimension mismatch");
  const int d = cs.d;
  double da = dist_key(q.data(), cs.anchor.data(), d, p);
  for (std::size_t r = 0; r < cs.n_rivals(); ++r) {
    if (dist_key(q.data(), cs.rivals.data() + r * d, d, p) < da) return false;
  }
  return true;
}

CertResult certify_nn_cover(double delta, double reach, double eps) {
  if (!(delta >= 0.0) || !(eps >= 0.0) || !std::isfinite(reach))
    throw std::invalid_argument("certify_nn_cover: bad arguments");
  CertResult r;
  r.beyond_reach = eps >= reach;
  r.ok = !r.beyond_reach && delta <= 2.0 * (reach - eps);
  return r;
}

CertResult certify_ball_cover(double delta, double reach, double eps) {
  if (!(delta >= 0.0) || !(eps >= 0.0) || !std::isfinite(reach))
    throw std::invalid_argument("certify_ball_cover: bad arguments");
  CertResult r;
  r.beyond_reach = eps >= reach;
  r.ok = !r.beyond_reach && delta <= reach - eps;
  return r;
}

}  // namespace mrl
