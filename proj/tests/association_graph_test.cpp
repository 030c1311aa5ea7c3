#include <random>

#include <gtest/gtest.h>

#include "mtmc/association_graph.hpp"
#include "mtmc/error.hpp"

namespace mtmc {
namespace {

TrajectoryRecord rec(std::string id, int cam, std::int64_t s, std::int64_t e, Eigen::VectorXd f,
                     std::optional<std::string> identity = std::nullopt) {
  return {std::move(id), cam, s, e, std::move(f), std::move(identity)};
}

TEST(EdgeRawFeatures, IdenticalVectors) {
  const Eigen::Vector3d v(0.3, -1.0, 2.0);
  const auto r = edge_raw_features(v, v);
  EXPECT_DOUBLE_EQ(r.euclidean, 0.0);
  EXPECT_NEAR(r.cosine_distance, 0.0, 1e-15);
}

TEST(EdgeRawFeatures, OrthogonalUnitVectors) {
  const auto r = edge_raw_features(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1));
  EXPECT_NEAR(r.euclidean, 1.41421356, 1e-8);
  EXPECT_DOUBLE_EQ(r.cosine_distance, 1.0);
}

TEST(EdgeRawFeatures, Antipodal) {
  const auto r = edge_raw_features(Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0));
  EXPECT_DOUBLE_EQ(r.euclidean, 2.0);
  EXPECT_DOUBLE_EQ(r.cosine_distance, 2.0);
}

TEST(EdgeRawFeatures, ZeroNormThrows) {
  EXPECT_THROW(edge_raw_features(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), Error);
}

TEST(TemporalGap, OverlapAndDisjoint) {
  EXPECT_EQ(temporal_gap(0, 100, 50, 200), 0);
  EXPECT_EQ(temporal_gap(0, 100, 1500, 1600), 1400);
  EXPECT_EQ(temporal_gap(1500, 1600, 0, 100), 1400);
}

TrajectorySet two_ids_four_cams() {
  std::vector<TrajectoryRecord> recs;
  for (int id = 0; id < 2; ++id) {
    for (int cam = 1; cam <= 4; ++cam) {
      Eigen::VectorXd f = Eigen::VectorXd::Constant(3, 0.1);
      f[id] += 1.0;
      recs.push_back(rec("t" + std::to_string(id) + std::to_string(cam), cam, 0, 10, f,
                         "v" + std::to_string(id)));
    }
  }
  return TrajectorySet(std::move(recs), 4, 3);
}

TEST(BuildGraph, TwoIdentitiesFourCameras) {
  const auto g = build_graph(two_ids_four_cams());
  EXPECT_EQ(g.node_count(), 8u);
  EXPECT_EQ(g.edge_count(), 24u);
  ASSERT_TRUE(g.labels.has_value());
  int positives = 0;
  for (auto y : *g.labels) positives += y;
  EXPECT_EQ(positives, 12);  // 2 identities x C(4,2)
}

TEST(BuildGraph, SingleCameraHasNoEdges) {
  std::vector<TrajectoryRecord> recs;
  for (int i = 0; i < 5; ++i) recs.push_back(rec("t" + std::to_string(i), 1, 0, 1, Eigen::Vector2d(1, i)));
  const auto g = build_graph(TrajectorySet(std::move(recs), 1, 2));
  EXPECT_EQ(g.node_count(), 5u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(BuildGraph, TemporalThresholdCutsDistantPair) {
  std::vector<TrajectoryRecord> recs{rec("a", 1, 0, 100, Eigen::Vector2d(1, 0)),
                                     rec("b", 2, 1500, 1600, Eigen::Vector2d(0, 1))};
  const TrajectorySet s(std::move(recs), 2, 2);
  EXPECT_EQ(build_graph(s, 300).edge_count(), 0u);
  EXPECT_EQ(build_graph(s).edge_count(), 1u);
  EXPECT_EQ(build_graph(s, 1400).edge_count(), 1u);
}

TEST(BuildGraph, UnlabeledWhenAnyIdentityMissing) {
  std::vector<TrajectoryRecord> recs{rec("a", 1, 0, 1, Eigen::Vector2d(1, 0), "x"),
                                     rec("b", 2, 0, 1, Eigen::Vector2d(0, 1))};
  EXPECT_FALSE(build_graph(TrajectorySet(std::move(recs), 2, 2)).labels.has_value());
}

TEST(BuildGraph, CanonicalNodeOrder) {
  std::vector<TrajectoryRecord> recs{rec("z", 2, 0, 1, Eigen::Vector2d(1, 0)),
                                     rec("b", 1, 0, 1, Eigen::Vector2d(0, 1)),
                                     rec("a", 2, 0, 1, Eigen::Vector2d(1, 1))};
  const auto g = build_graph(TrajectorySet(std::move(recs), 2, 2));
  ASSERT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.nodes[0].trajectory_id, "b");
  EXPECT_EQ(g.nodes[1].trajectory_id, "a");
  EXPECT_EQ(g.nodes[2].trajectory_id, "z");
  EXPECT_EQ(g.features.row(2), Eigen::RowVector2d(1, 0));
}

TrajectorySet random_instance(std::mt19937_64& rng, int max_nodes) {
  std::uniform_int_distribution<int> n_dist(1, max_nodes), cam_count(1, 5), frame(0, 3000),
      len(0, 400), ident(0, 4);
  std::normal_distribution<double> g;
  const int m = cam_count(rng);
  std::uniform_int_distribution<int> cam(1, m);
  const int n = n_dist(rng);
  std::vector<TrajectoryRecord> recs;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd f(4);
    for (auto& v : f) v = g(rng);
    const int s = frame(rng);
    recs.push_back(rec("t" + std::to_string(i), cam(rng), s, s + len(rng), f,
                       "v" + std::to_string(ident(rng))));
  }
  return TrajectorySet(std::move(recs), m, 4);
}

TEST(BuildGraphProperty, EdgeCountMatchesPerCameraProducts) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_instance(rng, 20);
    std::vector<std::size_t> per_cam(s.camera_count() + 1, 0);
    for (const auto& r : s.records()) ++per_cam[r.camera_id];
    std::size_t expected = 0;
    for (int a = 1; a <= s.camera_count(); ++a)
      for (int b = a + 1; b <= s.camera_count(); ++b) expected += per_cam[a] * per_cam[b];
    const auto g = build_graph(s);
    EXPECT_EQ(g.edge_count(), expected);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto [i, j] = g.edges[e];
      EXPECT_LT(i, j);
      EXPECT_NE(g.nodes[i].camera_id, g.nodes[j].camera_id);
      if (e > 0) EXPECT_LT(g.edges[e - 1], g.edges[e]);
    }
  }
}

TEST(BuildGraphProperty, LabelsAreSymmetricAndMatchIdentity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = build_graph(random_instance(rng, 15));
    ASSERT_TRUE(g.labels.has_value());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& a = g.nodes[g.edges[e].first];
      const auto& b = g.nodes[g.edges[e].second];
      EXPECT_EQ((*g.labels)[e], *a.identity_id == *b.identity_id);
      EXPECT_EQ((*g.labels)[e], *b.identity_id == *a.identity_id);
    }
  }
}

TEST(BuildGraphProperty, ThresholdMonotone) {
  std::mt19937_64 rng(17);
  const std::vector<std::int64_t> thresholds{0, 50, 200, 700, 1500, 4000};
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_instance(rng, 20);
    std::vector<EdgeEndpoints> prev;
    for (auto t : thresholds) {
      const auto g = build_graph(s, t);
      EXPECT_TRUE(std::includes(g.edges.begin(), g.edges.end(), prev.begin(), prev.end()));
      prev = g.edges;
    }
    EXPECT_TRUE(std::includes(build_graph(s).edges.begin(), build_graph(s).edges.end(), prev.begin(),
                              prev.end()));
  }
}

}  // namespace
}  // namespace mtmc
