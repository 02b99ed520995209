#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace disto {

// Result of clustering the distractor pool feature matrix.
struct ClusterIndex {
  int k = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  Eigen::MatrixXf centroids;        // k x d
  std::vector<int> assignment;      // pool index -> cluster id
  std::vector<std::vector<int>> members;  // cluster id -> pool indices, ascending

  int cluster_of(int pool_index) const { return assignment.at(pool_index); }

  void save(const std::string& path) const;
  static ClusterIndex load(const std::string& path);
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed.
// Clusters that empty out are refilled with the point farthest from its
// current centroid, so every cluster is non-empty on return.
ClusterIndex fit_clusters(const Eigen::MatrixXf& features, int k, std::uint64_t seed,
                          int max_iterations = 300);

}  // namespace disto
