#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mrl/geometry.hpp"
#include "mrl/rng.hpp"
#include "mrl/voronoi.hpp"

using namespace mrl;

namespace {

LabeledDataset random_set(int n, int d, int n_classes, std::uint64_t seed) {
  LabeledDataset ds;
  ds.spec = ingested_spec(d, n_classes);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ds.points.push_back(rng.uniform(-1.0, 1.0));
    ds.labels.push_back(1 + static_cast<int>(rng.index(n_classes)));
  }
  return ds;
}

}  // namespace

TEST_CASE("nearest matches a plain scan on random sets") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (Norm p : {Norm::L2, Norm::Linf}) {
      LabeledDataset ds = random_set(50, 5, 3, seed);
      NeighborIndex index = NeighborIndex::build(ds, p);
      Rng rng(seed + 100);
      for (int t = 0; t < 50; ++t) {
        std::vector<double> q(5);
        for (auto& x : q) x = rng.uniform(-1.2, 1.2);
        NnHit hit = nearest(index, q);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
          double dist = distance(q, ds.point(i), p);
          if (dist < best) {
            best = dist;
            best_i = i;
          }
        }
        CHECK(hit.index == best_i);
        CHECK(hit.dist == doctest::Approx(best).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("nearest ties resolve to the lowest index") {
  LabeledDataset ds;
  ds.spec = ingested_spec(1, 2);
  ds.points = {1.0, -1.0, 1.0};
  ds.labels = {1, 2, 2};
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  std::vector<double> origin = {0.0};
  CHECK(nearest(index, origin).index == 0);
  std::vector<double> right = {1.0};
  CHECK(nearest(index, right).index == 0);
}

TEST_CASE("nn classification recovers circle labels in the tube") {
  auto train = make_circles(400, 5, 3);
  NeighborIndex index = NeighborIndex::build(train, Norm::L2);
  for (int cls : {1, 2}) {
    auto pts = tube_sample(train.spec, cls, 0.3, Norm::L2, 500, 7);
    for (std::size_t i = 0; i * train.spec.d < pts.size(); ++i) {
      std::span<const double> q{pts.data() + i * train.spec.d,
                                static_cast<std::size_t>(train.spec.d)};
      CHECK(nn_classify(index, q) == cls);
    }
  }
}

TEST_CASE("batch queries agree with single queries") {
  LabeledDataset ds = random_set(200, 4, 3, 11);
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  LabeledDataset queries = random_set(300, 4, 3, 12);
  auto hits = nearest_batch(index, queries.points.data(), 300);
  auto labels = nn_classify_batch(index, queries.points.data(), 300);
  for (std::size_t i = 0; i < 300; ++i) {
    NnHit one = nearest(index, queries.point(i));
    CHECK(hits[i].index == one.index);
    CHECK(hits[i].dist == one.dist);
    CHECK(labels[i] == index.labels[one.index]);
  }
}

TEST_CASE("constraint set holds the m nearest rivals per class") {
  LabeledDataset ds = random_set(60, 3, 3, 13);
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  for (std::size_t anchor = 0; anchor < 10; ++anchor) {
    ConstraintSet cs = constraint_set(index, anchor, 4);
    CHECK(cs.m == 4);
    CHECK(cs.anchor == std::vector<double>(ds.point(anchor).begin(),
                                           ds.point(anchor).end()));
    // Rivals listed per class in ascending class order, each block sorted
    // by distance; no same-class point appears.
    int anchor_label = ds.labels[anchor];
    for (std::size_t r = 0; r < cs.n_rivals(); ++r)
      CHECK(index.labels[cs.rival_ids[r]] != anchor_label);
    for (int cls = 1; cls <= 3; ++cls) {
      if (cls == anchor_label) continue;
      std::vector<std::pair<double, std::size_t>> want;
      for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.labels[i] == cls)
          want.push_back({distance(ds.point(anchor), ds.point(i), Norm::L2),
                          i});
      std::sort(want.begin(), want.end());
      std::size_t found = 0;
      for (std::size_t r = 0; r < cs.n_rivals(); ++r)
        if (index.labels[cs.rival_ids[r]] == cls) {
          CHECK(cs.rival_ids[r] == want[found].second);
          ++found;
        }
      CHECK(found == std::min<std::size_t>(4, want.size()));
    }
  }
}

TEST_CASE("constraint set exhausts small rival classes without error") {
  LabeledDataset ds;
  ds.spec = ingested_spec(2, 2);
  ds.points = {0.0, 0.0, 1.0, 0.0, 2.0, 0.0};
  ds.labels = {1, 2, 2};
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  ConstraintSet cs = constraint_set(index, 0, 10);
  CHECK(cs.n_rivals() == 2);
  CHECK(cs.rival_ids == std::vector<std::size_t>{1, 2});
}

TEST_CASE("larger m extends the same ranked rival list") {
  LabeledDataset ds = random_set(80, 4, 2, 17);
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  ConstraintSet small = constraint_set(index, 3, 3);
  ConstraintSet big = constraint_set(index, 3, 8);
  for (std::size_t r = 0; r < small.n_rivals(); ++r)
    CHECK(small.rival_ids[r] == big.rival_ids[r]);
}

TEST_CASE("voronoi membership: hand geometry in both norms") {
  ConstraintSet cs;
  cs.d = 2;
  cs.m = 1;
  cs.anchor = {0.0, 0.0};
  cs.rivals = {2.0, 0.0};
  cs.rival_ids = {1};
  std::vector<double> inside = {0.9, 0.3};
  std::vector<double> outside = {1.2, 0.3};
  std::vector<double> boundary = {1.0, -5.0};
  for (Norm p : {Norm::L2, Norm::Linf}) {
    CHECK(in_voronoi_cell(cs, cs.anchor, p));
    CHECK(in_voronoi_cell(cs, inside, p));
    CHECK_FALSE(in_voronoi_cell(cs, outside, p));
  }
  CHECK(in_voronoi_cell(cs, boundary, Norm::L2));
}

TEST_CASE("full-rival cells reproduce the 1-NN partition") {
  LabeledDataset ds = random_set(40, 3, 2, 19);
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> q(3);
    for (auto& x : q) x = rng.uniform(-1.0, 1.0);
    NnHit hit = nearest(index, q);
    ConstraintSet cs = constraint_set(index, hit.index, 40);
    CHECK(in_voronoi_cell(cs, q, Norm::L2));
  }
}

TEST_CASE("points strictly closer to a rival leave the cell") {
  LabeledDataset ds = random_set(40, 3, 2, 29);
  NeighborIndex index = NeighborIndex::build(ds, Norm::L2);
  Rng rng(31);
  int checked = 0;
  for (int t = 0; t < 400 && checked < 50; ++t) {
    std::vector<double> q(3);
    for (auto& x : q) x = rng.uniform(-1.0, 1.0);
    NnHit hit = nearest(index, q);
    // Pick an anchor of the other class; q is closer to hit, a rival of it.
    std::size_t other = 0;
    bool found = false;
    for (std::size_t i = 0; i < ds.size() && !found; ++i)
      if (ds.labels[i] != ds.labels[hit.index] &&
          distance(q, ds.point(i), Norm::L2) > hit.dist + 1e-9) {
        other = i;
        found = true;
      }
    if (!found) continue;
    ConstraintSet cs = constraint_set(index, other, 40);
    CHECK_FALSE(in_voronoi_cell(cs, q, Norm::L2));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("certification thresholds and the factor-two gap") {
  CHECK(certify_nn_cover(1.0102, 1.0, 0.45).ok);
  CHECK_FALSE(certify_ball_cover(1.0102, 1.0, 0.45).ok);
  // Boundary counts as certified.
  CHECK(certify_nn_cover(1.1, 1.0, 0.45).ok);
  CHECK_FALSE(certify_nn_cover(1.1 + 1e-9, 1.0, 0.45).ok);
  CHECK(certify_ball_cover(0.55, 1.0, 0.45).ok);
  CHECK_FALSE(certify_ball_cover(0.55 + 1e-9, 1.0, 0.45).ok);
  // The nn rule tolerates exactly twice the ball radius at every eps.
  for (double eps : {0.0, 0.2, 0.4}) {
    CHECK(certify_nn_cover(2.0 * (1.0 - eps), 1.0, eps).ok);
    CHECK(certify_ball_cover(1.0 - eps, 1.0, eps).ok);
    CHECK_FALSE(certify_ball_cover(1.0 - eps + 1e-9, 1.0, eps).ok);
  }
}

TEST_CASE("budgets at or past the reach are flagged, not certified") {
  CertResult r = certify_nn_cover(0.1, 1.0, 1.0);
  CHECK_FALSE(r.ok);
  CHECK(r.beyond_reach);
  CertResult b = certify_ball_cover(0.1, 1.0, 1.5);
  CHECK_FALSE(b.ok);
  CHECK(b.beyond_reach);
  CHECK_FALSE(certify_nn_cover(0.1, 1.0, 0.5).beyond_reach);
}
