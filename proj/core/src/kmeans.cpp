#include "disto/kmeans.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "disto/rng.hpp"

namespace disto {

namespace {

using Eigen::Index;

// Squared euclidean distance from every row of m to the row vector c.
Eigen::VectorXf sq_dist_to(const Eigen::MatrixXf& m, const Eigen::RowVectorXf& c) {
  return (m.rowwise() - c).rowwise().squaredNorm();
}

Eigen::MatrixXf seed_centroids(const Eigen::MatrixXf& x, int k, Rng& rng) {
  const Index n = x.rows();
  Eigen::MatrixXf centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<Index>(rng.index(static_cast<std::size_t>(n))));
  Eigen::VectorXf best = sq_dist_to(x, centroids.row(0));
  for (int c = 1; c < k; ++c) {
    const double total = static_cast<double>(best.sum());
    Index pick = 0;
    if (total <= 0.0) {
      // all remaining mass is on duplicate points; any choice is equivalent
      pick = static_cast<Index>(rng.index(static_cast<std::size_t>(n)));
    } else {
      double target = rng.uniform() * total;
      for (Index i = 0; i < n; ++i) {
        target -= static_cast<double>(best[i]);
        if (target <= 0.0) {
          pick = i;
          break;
        }
        pick = i;
      }
    }
    centroids.row(c) = x.row(pick);
    best = best.cwiseMin(sq_dist_to(x, centroids.row(c)));
  }
  return centroids;
}

}  // namespace

ClusterIndex fit_clusters(const Eigen::MatrixXf& features, int k, std::uint64_t seed,
                          int max_iterations) {
  const Index n = features.rows();
  if (n == 0) throw std::invalid_argument("kmeans: empty feature matrix");
  if (k <= 0) throw std::invalid_argument("kmeans: k must be positive");
  if (k > n) throw std::invalid_argument("kmeans: k exceeds number of points");

  Rng rng(seed);
  ClusterIndex idx;
  idx.k = k;
  idx.seed = seed;
  idx.centroids = seed_centroids(features, k, rng);
  idx.assignment.assign(static_cast<std::size_t>(n), -1);

  Eigen::MatrixXf dists(n, k);
  for (int iter = 0; iter < max_iterations; ++iter) {
    for (int c = 0; c < k; ++c) dists.col(c) = sq_dist_to(features, idx.centroids.row(c));

    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int arg = 0;
      float best = dists(i, 0);
      for (int c = 1; c < k; ++c) {
        if (dists(i, c) < best) {
          best = dists(i, c);
          arg = c;
        }
      }
      if (idx.assignment[static_cast<std::size_t>(i)] != arg) {
        idx.assignment[static_cast<std::size_t>(i)] = arg;
        changed = true;
      }
    }
    idx.iterations = iter + 1;

    Eigen::MatrixXf sums = Eigen::MatrixXf::Zero(k, features.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = idx.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += features.row(i);
      counts[static_cast<std::size_t>(c)]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        idx.centroids.row(c) = sums.row(c) / static_cast<float>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // refill an empty cluster with the point farthest from its own centroid
      Index far = 0;
      float far_d = -1.0f;
      for (Index i = 0; i < n; ++i) {
        const int ci = idx.assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(ci)] <= 1) continue;
        const float d = (features.row(i) - idx.centroids.row(ci)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      const int old = idx.assignment[static_cast<std::size_t>(far)];
      counts[static_cast<std::size_t>(old)]--;
      sums.row(old) -= features.row(far);
      idx.centroids.row(old) = sums.row(old) / static_cast<float>(counts[static_cast<std::size_t>(old)]);
      idx.assignment[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      idx.centroids.row(c) = features.row(far);
      changed = true;
    }

    if (!changed) break;
  }

  idx.members.assign(static_cast<std::size_t>(k), {});
  for (Index i = 0; i < n; ++i)
    idx.members[static_cast<std::size_t>(idx.assignment[static_cast<std::size_t>(i)])].push_back(
        static_cast<int>(i));
  return idx;
}

void ClusterIndex::save(const std::string& path) const {
  nlohmann::json j;
  j["k"] = k;
  j["seed"] = seed;
  j["iterations"] = iterations;
  j["dim"] = centroids.cols();
  j["assignment"] = assignment;
  std::vector<std::vector<float>> rows;
  rows.reserve(static_cast<std::size_t>(centroids.rows()));
  for (Eigen::Index r = 0; r < centroids.rows(); ++r) {
    std::vector<float> row(static_cast<std::size_t>(centroids.cols()));
    for (Eigen::Index c = 0; c < centroids.cols(); ++c) row[static_cast<std::size_t>(c)] = centroids(r, c);
    rows.push_back(std::move(row));
  }
  j["centroids"] = rows;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("kmeans: cannot write " + path);
  out << j.dump() << "\n";
}

ClusterIndex ClusterIndex::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("kmeans: cannot read " + path);
  nlohmann::json j;
  in >> j;
  ClusterIndex idx;
  idx.k = j.at("k").get<int>();
  idx.seed = j.at("seed").get<std::uint64_t>();
  idx.iterations = j.at("iterations").get<int>();
  idx.assignment = j.at("assignment").get<std::vector<int>>();
  const auto rows = j.at("centroids").get<std::vector<std::vector<float>>>();
  const auto dim = j.at("dim").get<Eigen::Index>();
  idx.centroids.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      idx.centroids(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  idx.members.assign(static_cast<std::size_t>(idx.k), {});
  for (std::size_t i = 0; i < idx.assignment.size(); ++i)
    idx.members[static_cast<std::size_t>(idx.assignment[i])].push_back(static_cast<int>(i));
  return idx;
}

}  // namespace disto
