#include <Eigen/Core>
#include <set>

#include "disto/augment.hpp"
#include "disto/kmeans.hpp"
#include "disto/rng.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace disto;

namespace {

Eigen::MatrixXf gaussian_blobs(int per_blob, int dim, int blobs, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXf m(per_blob * blobs, dim);
  for (int b = 0; b < blobs; ++b) {
    Eigen::VectorXf center(dim);
    for (int j = 0; j < dim; ++j) center[j] = static_cast<float>(rng.gaussian() * 10.0);
    for (int i = 0; i < per_blob; ++i)
      for (int j = 0; j < dim; ++j)
        m(b * per_blob + i, j) = center[j] + static_cast<float>(rng.gaussian() * 0.2);
  }
  return m;
}

double sq_dist(const Eigen::MatrixXf& m, int a, int b) {
  return (m.row(a) - m.row(b)).squaredNorm();
}

}  // namespace

TEST_SUITE_BEGIN("kmeans");

TEST_CASE("well-separated blobs are recovered exactly") {
  const auto m = gaussian_blobs(20, 6, 4, 3);
  const auto index = fit_clusters(m, 4, 17);
  REQUIRE(index.k == 4);
  REQUIRE(index.assignment.size() == 80);
  // every blob lands in one cluster and no cluster mixes blobs
  for (int b = 0; b < 4; ++b) {
    const int c = index.assignment[b * 20];
    for (int i = 1; i < 20; ++i) CHECK(index.assignment[b * 20 + i] == c);
  }
  std::set<int> used(index.assignment.begin(), index.assignment.end());
  CHECK(used.size() == 4);
}

TEST_CASE("same seed reproduces the exact clustering, twice") {
  const auto m = gaussian_blobs(15, 5, 3, 8);
  const auto a = fit_clusters(m, 5, 99);
  const auto b = fit_clusters(m, 5, 99);
  CHECK(a.assignment == b.assignment);
  CHECK(a.iterations == b.iterations);
  CHECK((a.centroids - b.centroids).norm() == doctest::Approx(0.0));
}

TEST_CASE("k equal to point count puts every point alone at zero distance") {
  const auto m = gaussian_blobs(4, 3, 2, 5);  // 8 points
  const auto index = fit_clusters(m, 8, 1);
  std::set<int> used(index.assignment.begin(), index.assignment.end());
  CHECK(used.size() == 8);
  for (int i = 0; i < 8; ++i) {
    const int c = index.assignment[i];
    CHECK((m.row(i) - index.centroids.row(c)).norm() == doctest::Approx(0.0).epsilon(1e-6));
  }
  for (const auto& members : index.members) CHECK(members.size() == 1);
}

TEST_CASE("members lists mirror assignments and stay sorted") {
  const auto m = gaussian_blobs(10, 4, 3, 2);
  const auto index = fit_clusters(m, 3, 7);
  std::size_t total = 0;
  for (int c = 0; c < index.k; ++c) {
    const auto& mem = index.members[c];
    CHECK(std::is_sorted(mem.begin(), mem.end()));
    CHECK_FALSE(mem.empty());
    total += mem.size();
    for (const int i : mem) CHECK(index.assignment[i] == c);
  }
  CHECK(total == static_cast<std::size_t>(m.rows()));
  CHECK(index.cluster_of(0) == index.assignment[0]);
}

TEST_CASE("every point sits closer to its own centroid than to any other") {
  // Lloyd's fixed point: assignment step has converged
  const auto m = gaussian_blobs(12, 6, 4, 21);
  const auto index = fit_clusters(m, 4, 4);
  for (int i = 0; i < m.rows(); ++i) {
    const double own = (m.row(i) - index.centroids.row(index.assignment[i])).squaredNorm();
    for (int c = 0; c < index.k; ++c)
      CHECK(own <= (m.row(i) - index.centroids.row(c)).squaredNorm() + 1e-5);
  }
}

TEST_CASE("degenerate duplicate points do not leave empty clusters") {
  Eigen::MatrixXf m(6, 2);
  m << 1, 1, 1, 1, 1, 1, 9, 9, 9, 9, 9, 9;
  const auto index = fit_clusters(m, 3, 12);
  for (const auto& members : index.members) CHECK_FALSE(members.empty());
}

TEST_CASE("invalid arguments are rejected") {
  const auto m = gaussian_blobs(5, 3, 1, 1);
  CHECK_THROWS_AS(fit_clusters(m, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fit_clusters(m, 6, 1), std::invalid_argument);
  CHECK_THROWS_AS(fit_clusters(Eigen::MatrixXf(0, 3), 1, 1), std::invalid_argument);
}

TEST_CASE("index round trips through its JSON artifact") {
  testutil::TempDir dir;
  const auto m = gaussian_blobs(8, 4, 2, 31);
  const auto index = fit_clusters(m, 3, 77);
  index.save(dir.str("index.json"));
  const auto back = ClusterIndex::load(dir.str("index.json"));
  CHECK(back.k == index.k);
  CHECK(back.seed == index.seed);
  CHECK(back.iterations == index.iterations);
  CHECK(back.assignment == index.assignment);
  CHECK(back.members == index.members);
  CHECK((back.centroids - index.centroids).norm() == doctest::Approx(0.0));
}

TEST_CASE("farthest-in-cluster matches an exhaustive scan on a big pool") {
  // independent oracle for the same-cluster farthest lookup
  const auto m = gaussian_blobs(50, 8, 6, 13);  // 300 points
  const auto index = fit_clusters(m, 6, 5);
  for (int q = 0; q < m.rows(); ++q) {
    const auto got = farthest_in_cluster(q, index, m);
    // exhaustive scan over the cluster, lowest index wins ties
    int best = -1;
    double best_d = -1.0;
    for (const int j : index.members[index.assignment[q]]) {
      if (j == q) continue;
      const double d = sq_dist(m, q, j);
      if (d > best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < 0) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == best);
    }
  }
}

TEST_SUITE_END();
