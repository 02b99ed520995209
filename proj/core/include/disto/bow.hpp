#pragma once

#include <Eigen/Core>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace disto {

// TF-IDF features with a least-squares linear read-out, clamped into [0,1].
class BowModel {
 public:
  static BowModel fit(const std::vector<std::string>& texts, const std::vector<double>& targets);

  double predict(const std::string& txt) const;

  // l2-normalized tf-idf row over the fitted vocabulary
  Eigen::VectorXd tfidf(const std::string& txt) const;

  const std::vector<std::string>& vocab() const { return columns_; }
  double idf(const std::string& token) const;
  double intercept() const { return intercept_; }
  bool fitted() const { return !columns_.empty(); }

  nlohmann::json to_json() const;
  static BowModel from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> columns_;
  std::unordered_map<std::string, int> index_;
  Eigen::VectorXd idf_;
  Eigen::VectorXd coef_;
  double intercept_ = 0.0;
};

}  // namespace disto
