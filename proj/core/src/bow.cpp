#include "disto/bow.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "disto/text.hpp"

namespace disto {

namespace {

std::map<std::string, double> term_counts(const std::string& txt) {
  std::map<std::string, double> tf;
  for (const auto& tok : text::tokenize(txt)) tf[text::lower(tok)] += 1.0;
  return tf;
}

}  // namespace

BowModel BowModel::fit(const std::vector<std::string>& texts,
                       const std::vector<double>& targets) {
  if (texts.empty()) throw std::invalid_argument("bow: no training texts");
  if (texts.size() != targets.size())
    throw std::invalid_argument("bow: texts and targets differ in length");

  BowModel model;
  std::map<std::string, int> df;
  std::vector<std::map<std::string, double>> rows;
  rows.reserve(texts.size());
  for (const auto& txt : texts) {
    rows.push_back(term_counts(txt));
    for (const auto& [tok, _] : rows.back()) df[tok]++;
  }
  const double n = static_cast<double>(texts.size());
  model.columns_.reserve(df.size());
  model.idf_.resize(static_cast<Eigen::Index>(df.size()));
  for (const auto& [tok, count] : df) {
    model.index_.emplace(tok, static_cast<int>(model.columns_.size()));
    model.idf_[static_cast<Eigen::Index>(model.columns_.size())] =
        std::log((1.0 + n) / (1.0 + count)) + 1.0;
    model.columns_.push_back(tok);
  }

  const Eigen::Index v = static_cast<Eigen::Index>(model.columns_.size());
  const Eigen::Index rows_n = static_cast<Eigen::Index>(texts.size());
  // columns: v tf-idf features plus an unpenalized intercept column;
  // a small ridge block keeps collinear vocabularies well-posed
  const double ridge = 1e-4;
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index r = 0; r < rows_n; ++r) {
    double sq = 0.0;
    for (const auto& [tok, count] : rows[static_cast<std::size_t>(r)]) {
      const double w = count * model.idf_[model.index_.at(tok)];
      sq += w * w;
    }
    const double inv = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
    for (const auto& [tok, count] : rows[static_cast<std::size_t>(r)]) {
      const int c = model.index_.at(tok);
      trips.emplace_back(r, c, count * model.idf_[c] * inv);
    }
    trips.emplace_back(r, v, 1.0);
  }
  for (Eigen::Index c = 0; c < v; ++c) trips.emplace_back(rows_n + c, c, std::sqrt(ridge));

  Eigen::SparseMatrix<double> a(rows_n + v, v + 1);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows_n + v);
  for (Eigen::Index r = 0; r < rows_n; ++r) b[r] = targets[static_cast<std::size_t>(r)];

  Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> solver;
  solver.setMaxIterations(4000);
  solver.setTolerance(1e-12);
  solver.compute(a);
  const Eigen::VectorXd x = solver.solve(b);
  model.coef_ = x.head(v);
  model.intercept_ = x[v];
  return model;
}

Eigen::VectorXd BowModel::tfidf(const std::string& txt) const {
  if (!fitted()) throw std::logic_error("bow: model not fitted");
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(columns_.size()));
  for (const auto& [tok, count] : term_counts(txt)) {
    const auto it = index_.find(tok);
    if (it != index_.end()) row[it->second] = count * idf_[it->second];
  }
  const double norm = row.norm();
  if (norm > 0.0) row /= norm;
  return row;
}

double BowModel::predict(const std::string& txt) const {
  const double raw = tfidf(txt).dot(coef_) + intercept_;
  return std::clamp(raw, 0.0, 1.0);
}

double BowModel::idf(const std::string& token) const {
  const auto it = index_.find(text::lower(token));
  if (it == index_.end()) throw std::out_of_range("bow: token not in vocabulary: " + token);
  return idf_[it->second];
}

nlohmann::json BowModel::to_json() const {
  nlohmann::json j;
  j["columns"] = columns_;
  j["idf"] = std::vector<double>(idf_.data(), idf_.data() + idf_.size());
  j["coef"] = std::vector<double>(coef_.data(), coef_.data() + coef_.size());
  j["intercept"] = intercept_;
  return j;
}

BowModel BowModel::from_json(const nlohmann::json& j) {
  BowModel model;
  model.columns_ = j.at("columns").get<std::vector<std::string>>();
  const auto idf = j.at("idf").get<std::vector<double>>();
  const auto coef = j.at("coef").get<std::vector<double>>();
  if (idf.size() != model.columns_.size() || coef.size() != model.columns_.size())
    throw std::runtime_error("bow: inconsistent serialized model");
  model.idf_ = Eigen::Map<const Eigen::VectorXd>(idf.data(), static_cast<Eigen::Index>(idf.size()));
  model.coef_ =
      Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  model.intercept_ = j.at("intercept").get<double>();
  for (std::size_t i = 0; i < model.columns_.size(); ++i)
    model.index_.emplace(model.columns_[i], static_cast<int>(i));
  return model;
}

}  // namespace disto
