#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "it2pf/clustering.hpp"
#include "it2pf/errors.hpp"
#include "it2pf/rng.hpp"

using namespace it2pf;

namespace {

MatrixXd two_blobs(Rng& rng, int per_blob, double a, double b, double spread) {
  MatrixXd pts(2 * per_blob, 2);
  for (int i = 0; i < 2 * per_blob; ++i) {
    const double c = i < per_blob ? a : b;
    pts(i, 0) = c + spread * rng.normal();
    pts(i, 1) = c + spread * rng.normal();
  }
  return pts;
}

// Lloyd's k-means, started from the first point of each blob.
MatrixXd kmeans(const MatrixXd& pts, MatrixXd centers) {
  for (int it = 0; it < 100; ++it) {
    MatrixXd sum = MatrixXd::Zero(centers.rows(), pts.cols());
    VectorXd cnt = VectorXd::Zero(centers.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      Eigen::Index best = 0;
      (centers.rowwise() - pts.row(i)).rowwise().squaredNorm().minCoeff(&best);
      sum.row(best) += pts.row(i);
      cnt[best] += 1.0;
    }
    for (Eigen::Index c = 0; c < centers.rows(); ++c) centers.row(c) = sum.row(c) / cnt[c];
  }
  return centers;
}

// Direct potential sum, one pair at a time.
double potential(const MatrixXd& pts, Eigen::Index i, double r_a) {
  double p = 0.0;
  for (Eigen::Index j = 0; j < pts.rows(); ++j) p += std::exp(-4.0 * (pts.row(i) - pts.row(j)).squaredNorm() / (r_a * r_a));
  return p;
}

}  // namespace

TEST(Subtractive, SinglePoint) {
  MatrixXd pts(1, 3);
  pts << 0.2, 0.4, 0.6;
  const auto c = subtractive_cluster(pts, SubtractiveParams{});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], 0u);
}

TEST(Subtractive, IdenticalPoints) {
  const MatrixXd pts = MatrixXd::Constant(20, 2, 0.5);
  EXPECT_EQ(subtractive_cluster(pts, SubtractiveParams{}).size(), 1u);
}

TEST(Subtractive, PotentialsMatchBruteForce) {
  Rng rng(2);
  MatrixXd pts(30, 3);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform();
  const VectorXd p = subtractive_potentials(pts, 0.4);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) EXPECT_NEAR(p[i], potential(pts, i, 0.4), 1e-12);
}

TEST(Subtractive, TwoSeparatedBlobs) {
  Rng rng(4);
  const MatrixXd pts = two_blobs(rng, 40, 0.1, 0.9, 0.003);
  SubtractiveParams sp;
  sp.r_a = 0.05;
  sp.r_b = 0.075;
  const auto c = subtractive_cluster(pts, sp);
  ASSERT_EQ(c.size(), 2u);
  // First center is the brute-force potential maximum.
  double best = -1.0;
  Eigen::Index arg = 0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double p = potential(pts, i, sp.r_a);
    if (p > best) {
      best = p;
      arg = i;
    }
  }
  EXPECT_EQ(c[0], static_cast<std::size_t>(arg));
  const bool first_low = c[0] < 40;
  const bool second_low = c[1] < 40;
  EXPECT_NE(first_low, second_low);
}

TEST(Subtractive, TopReturnsRequestedCount) {
  Rng rng(6);
  MatrixXd pts(50, 2);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform();
  const auto c = subtractive_top(pts, SubtractiveParams{}, 5);
  ASSERT_EQ(c.size(), 5u);
  std::vector<std::size_t> s = c;
  std::sort(s.begin(), s.end());
  EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
}

TEST(Subtractive, InvalidParameters) {
  SubtractiveParams sp;
  sp.r_b = 0.1;
  EXPECT_THROW(sp.validate(), Error);
  EXPECT_THROW(subtractive_cluster(MatrixXd(0, 2), SubtractiveParams{}), Error);
}

TEST(Fcm, SingleClusterIsMean) {
  Rng rng(8);
  MatrixXd pts(25, 3);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.normal();
  const ClusterResult r = fcm_refine(pts, 1, pts.row(0), FcmParams{});
  const VectorXd mean = pts.colwise().mean().transpose();
  EXPECT_LT((r.centers.row(0).transpose() - mean).norm(), 1e-10);
  EXPECT_TRUE((r.memberships.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST(Fcm, TwoBlobsMatchKMeans) {
  Rng rng(10);
  const MatrixXd pts = two_blobs(rng, 50, 0.2, 0.8, 0.03);
  MatrixXd init(2, 2);
  init.row(0) = pts.row(0);
  init.row(1) = pts.row(50);
  const ClusterResult r = fcm_refine(pts, 2, init, FcmParams{});
  const MatrixXd km = kmeans(pts, init);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index j = 0;
    (km.rowwise() - r.centers.row(c)).rowwise().squaredNorm().minCoeff(&j);
    EXPECT_LT((km.row(j) - r.centers.row(c)).norm(), 0.05);
  }
}

TEST(Fcm, SymmetricPointHasEqualMemberships) {
  MatrixXd pts(3, 1);
  pts << -1.0, 0.0, 1.0;
  MatrixXd init(2, 1);
  init << -1.0, 1.0;
  FcmParams fp;
  fp.max_iter = 1;
  const ClusterResult r = fcm_refine(pts, 2, init, fp);
  EXPECT_NEAR(r.memberships(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(r.memberships(1, 1), 0.5, 1e-12);
}

TEST(Fcm, ObjectiveNonIncreasing) {
  Rng rng(12);
  MatrixXd pts(60, 2);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform();
  MatrixXd init(3, 2);
  init << pts.row(0), pts.row(1), pts.row(2);
  const ClusterResult r = fcm_refine(pts, 3, init, FcmParams{});
  ASSERT_GE(r.objective_history.size(), 2u);
  for (std::size_t i = 1; i < r.objective_history.size(); ++i)
    EXPECT_LE(r.objective_history[i], r.objective_history[i - 1] * (1.0 + 1e-12) + 1e-15);
  for (Eigen::Index j = 0; j < pts.rows(); ++j) EXPECT_NEAR(r.memberships.col(j).sum(), 1.0, 1e-12);
}

TEST(Premises, UnitWidthsGiveDeltaBounds) {
  ClusterResult r;
  r.p = 2;
  r.centers = MatrixXd::Zero(2, 4);
  r.widths = MatrixXd::Ones(2, 4);
  const auto prem = build_premises(r, 3, 0.2);
  ASSERT_EQ(prem.size(), 2u);
  for (const RulePremise& p : prem) {
    ASSERT_EQ(p.sets.size(), 3u);
    for (const IT2Gaussian& g : p.sets) {
      EXPECT_NEAR(g.sigma() * (1.0 - g.delta()), 0.8, 1e-15);
      EXPECT_NEAR(g.sigma() * (1.0 + g.delta()), 1.2, 1e-15);
    }
  }
}

TEST(Premises, StandardNormalCloud) {
  Rng rng(14);
  MatrixXd pts(4000, 3);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.normal();
  const ClusterResult r = fcm_refine(pts, 1, pts.row(0), FcmParams{});
  const auto prem = build_premises(r, 3, 0.2);
  for (const IT2Gaussian& g : prem[0].sets) {
    EXPECT_NEAR(g.center(), 0.0, 0.1);
    EXPECT_NEAR(g.sigma(), 1.0, 0.1);
  }
}

TEST(Premises, ZeroVarianceUsesWidthFloor) {
  MatrixXd pts(10, 2);
  for (int i = 0; i < 10; ++i) {
    pts(i, 0) = 1.0;
    pts(i, 1) = 0.1 * i;
  }
  FcmParams fp;
  fp.width_floor = 0.01;
  const ClusterResult r = fcm_refine(pts, 1, pts.row(0), fp);
  EXPECT_DOUBLE_EQ(r.widths(0, 0), 0.01);
  EXPECT_GT(r.widths(0, 1), 0.01);
}

TEST(Hypercube, ScalesToUnitRange) {
  MatrixXd pts(3, 2);
  pts << 1, 7, 2, 7, 3, 7;
  const MatrixXd u = to_unit_hypercube(pts);
  EXPECT_DOUBLE_EQ(u(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(u(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(u(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(u(1, 1), 0.0);
}
