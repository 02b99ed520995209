#include <cmath>
#include <fstream>
#include <sstream>

#include "disto/train.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace disto;

namespace {

ScorerConfig toy_scorer_config(Architecture arch = Architecture::sept) {
  ScorerConfig sc;
  sc.architecture = arch;
  sc.max_seq_len = 32;
  sc.d_model = 16;
  sc.heads = 2;
  sc.layers = 1;
  sc.d_ff = 32;
  sc.vocab_cap = 64;
  return sc;
}

}  // namespace

TEST_SUITE_BEGIN("train");

TEST_CASE("mae matches hand computation") {
  CHECK(mae({0.2, 0.8, 0.5}, {0.0, 1.0, 0.5}) == doctest::Approx(0.4 / 3.0).epsilon(1e-12));
  CHECK(mae({1.0}, {1.0}) == 0.0);
  CHECK_THROWS_AS(mae({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(mae({0.5}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("pearson reproduces a hand-worked example") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 1, 4, 3, 5};
  const auto res = pearson(x, y);
  CHECK(res.r == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(res.p == doctest::Approx(0.10408803866182799).epsilon(1e-10));
}

TEST_CASE("pearson is invariant under positive affine maps and flips sign on negation") {
  const std::vector<double> x = {0.1, 0.9, 0.4, 0.7, 0.2, 0.6};
  const std::vector<double> y = {0.0, 1.0, 0.5, 0.8, 0.1, 0.4};
  const auto base = pearson(x, y);
  std::vector<double> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 2.5 * x[i] + 3.0;
  const auto same = pearson(scaled, y);
  CHECK(same.r == doctest::Approx(base.r).epsilon(1e-12));
  CHECK(same.p == doctest::Approx(base.p).epsilon(1e-12));
  std::vector<double> negated(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) negated[i] = -y[i];
  const auto flipped = pearson(x, negated);
  CHECK(flipped.r == doctest::Approx(-base.r).epsilon(1e-12));
  CHECK(flipped.p == doctest::Approx(base.p).epsilon(1e-10));
}

TEST_CASE("pearson rejects degenerate inputs") {
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(pearson({1, 2, 3}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), std::domain_error);
  CHECK_THROWS_AS(pearson({1, 2, 3}, {4, 4, 4}), std::domain_error);
}

TEST_CASE("perfectly correlated data yields r = 1 with p = 0") {
  const auto res = pearson({1, 2, 3, 4}, {10, 20, 30, 40});
  CHECK(res.r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.p == doctest::Approx(0.0));
}

TEST_CASE("betainc behaves like the regularized incomplete beta function") {
  CHECK(betainc(2.0, 3.0, 0.0) == 0.0);
  CHECK(betainc(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) is the uniform CDF
  CHECK(betainc(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  // I_x(2,1) = x^2 and I_x(1,2) = 1 - (1-x)^2
  CHECK(betainc(2.0, 1.0, 0.3) == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(betainc(1.0, 2.0, 0.3) == doctest::Approx(0.51).epsilon(1e-12));
  // symmetric distributions have their median at one half
  CHECK(betainc(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(betainc(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("evaluate reports mae as a percentage and drops undefined correlations") {
  // gold-only rows share target 1.0, so the correlation has zero variance
  const auto rows = flatten(testutil::topic_corpus({.instances = 8}));
  const auto cp = train(
      {.learning_rate = 1e-6, .patience = 1, .max_epochs = 1, .seed = 3},
      toy_scorer_config(), rows, rows);
  const auto result = evaluate(cp, rows);
  CHECK(result.n == rows.size());
  CHECK(result.mae_percent == doctest::Approx(100.0 * result.mae).epsilon(1e-12));
  CHECK_FALSE(result.pearson.has_value());
  CHECK_THROWS_AS(evaluate(cp, {}), std::invalid_argument);
}

TEST_CASE("train validates its configuration and data") {
  const auto rows = testutil::toy_separable_rows(8, 1);
  const auto sc = toy_scorer_config();
  CHECK_THROWS_AS(train({.learning_rate = 0.0}, sc, rows, rows), std::invalid_argument);
  CHECK_THROWS_AS(train({.patience = 0}, sc, rows, rows), std::invalid_argument);
  CHECK_THROWS_AS(train({.batch_size = 0}, sc, rows, rows), std::invalid_argument);
  CHECK_THROWS_AS(train({}, sc, {}, rows), std::invalid_argument);
  CHECK_THROWS_AS(train({}, sc, rows, {}), std::invalid_argument);
  auto bad = rows;
  bad[0].target = 1.5;
  CHECK_THROWS_AS(train({}, sc, bad, rows), std::invalid_argument);
}

TEST_CASE("patience one with frozen weights stops after two evaluations") {
  // a step of 1e-30 is far below the float ulp of every weight, so the
  // validation error repeats exactly and the second evaluation exhausts
  // the patience budget
  const auto rows = testutil::toy_separable_rows(8, 2);
  TrainConfig tc;
  tc.learning_rate = 1e-30;
  tc.patience = 1;
  tc.max_epochs = 10;
  tc.seed = 4;
  const auto cp = train(tc, toy_scorer_config(), rows, rows);
  CHECK(cp.metadata().epochs == 2);
  CHECK(cp.metadata().metrics.at("best_epoch") == doctest::Approx(1.0));
}

TEST_CASE("an absurd learning rate raises a divergence error with location info") {
  const auto rows = testutil::toy_separable_rows(24, 3);
  TrainConfig tc;
  tc.learning_rate = 1e30;
  tc.batch_size = 16;
  tc.patience = 5;
  tc.max_epochs = 5;
  tc.seed = 5;
  CHECK_THROWS_AS(train(tc, toy_scorer_config(), rows, rows), TrainingDivergence);
  try {
    train(tc, toy_scorer_config(), rows, rows);
  } catch (const TrainingDivergence& e) {
    CHECK(e.epoch >= 1);
    CHECK(e.step >= 0);
    CHECK(std::string(e.what()).find("lr") != std::string::npos);
  }
}

TEST_CASE("a tiny encoder drives training error toward zero on a separable toy task") {
  const auto train_rows = testutil::toy_separable_rows(32, 6);
  const auto val_rows = testutil::toy_separable_rows(16, 7);
  TrainConfig tc;
  tc.learning_rate = 3e-3;
  tc.batch_size = 8;
  tc.patience = 50;
  tc.max_epochs = 50;  // 4 steps per epoch, 200 steps total
  tc.seed = 8;
  const auto cp = train(tc, toy_scorer_config(), train_rows, val_rows);
  const auto on_train = evaluate(cp, train_rows);
  CHECK(on_train.mae < 0.10);
  CHECK(cp.metadata().metrics.at("best_val_mae") < 0.15);
}

TEST_CASE("the metrics log is a csv with one line per evaluation") {
  testutil::TempDir dir;
  const auto rows = testutil::toy_separable_rows(8, 9);
  TrainConfig tc;
  tc.learning_rate = 1e-30;
  tc.patience = 1;
  tc.max_epochs = 10;
  tc.seed = 1;
  tc.metrics_log_path = dir.str("metrics.csv");
  train(tc, toy_scorer_config(), rows, rows);

  std::ifstream in(tc.metrics_log_path);
  REQUIRE(in.good());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);  // header plus the two evaluations
  CHECK(lines[0] == "epoch,step,train_loss,val_mae,val_r");
  CHECK(lines[1].substr(0, 2) == "1,");
  CHECK(lines[2].substr(0, 2) == "2,");
}

TEST_CASE("training is reproducible under a fixed seed") {
  const auto train_rows = testutil::toy_separable_rows(16, 10);
  const auto val_rows = testutil::toy_separable_rows(8, 11);
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  tc.max_epochs = 3;
  tc.patience = 3;
  tc.seed = 12;
  const auto a = train(tc, toy_scorer_config(), train_rows, val_rows);
  const auto b = train(tc, toy_scorer_config(), train_rows, val_rows);
  CHECK(a.fingerprint() == b.fingerprint());
  tc.seed = 13;
  const auto c = train(tc, toy_scorer_config(), train_rows, val_rows);
  CHECK(a.fingerprint() != c.fingerprint());
  // the data fingerprint tracks the rows, not the seed
  CHECK(a.metadata().data_fingerprint == c.metadata().data_fingerprint);
  CHECK(a.metadata().data_fingerprint.size() == 16);
}

TEST_CASE("the bow architecture trains through the same entry point") {
  testutil::TempDir dir;
  const auto train_rows = testutil::toy_separable_rows(32, 14);
  const auto val_rows = testutil::toy_separable_rows(16, 15);
  TrainConfig tc;
  tc.seed = 16;
  tc.metrics_log_path = dir.str("bow.csv");
  const auto cp = train(tc, toy_scorer_config(Architecture::bow), train_rows, val_rows);
  CHECK(cp.config().architecture == Architecture::bow);
  CHECK(cp.metadata().epochs == 0);
  // token presence separates the classes, so the linear fit nails them
  const auto result = evaluate(cp, val_rows);
  CHECK(result.mae < 0.05);
  CHECK(cp.metadata().metrics.at("best_val_mae") == doctest::Approx(result.mae).epsilon(1e-12));

  std::ifstream in(tc.metrics_log_path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  CHECK(lines.size() == 2);  // header plus the single closed-form fit
}

TEST_CASE("ablation suite trains the full model and the three field ablations") {
  const auto train_rows = testutil::toy_separable_rows(16, 17);
  const auto val_rows = testutil::toy_separable_rows(8, 18);
  const auto test_rows = testutil::toy_separable_rows(8, 19);
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  tc.max_epochs = 2;
  tc.patience = 2;
  tc.seed = 20;
  const auto entries = ablation_suite(tc, toy_scorer_config(), train_rows, val_rows, test_rows);
  REQUIRE(entries.size() == 4);
  CHECK(entries[0].label == "full");
  CHECK(entries[0].mask.full());
  CHECK(entries[1].label == "-question");
  CHECK_FALSE(entries[1].mask.question);
  CHECK(entries[1].mask.answer);
  CHECK(entries[1].mask.article);
  CHECK(entries[2].label == "-article");
  CHECK_FALSE(entries[2].mask.article);
  CHECK(entries[3].label == "-answer");
  CHECK_FALSE(entries[3].mask.answer);
  for (const auto& e : entries) {
    CHECK(e.checkpoint.config().ablation.question == e.mask.question);
    CHECK(e.checkpoint.config().ablation.answer == e.mask.answer);
    CHECK(e.checkpoint.config().ablation.article == e.mask.article);
    CHECK(e.result.n == test_rows.size());
  }
}

TEST_CASE("the ablation table lists one row per variant") {
  std::vector<AblationEntry> entries(2);
  entries[0].label = "full";
  entries[0].result.mae_percent = 12.34;
  entries[0].result.pearson = PearsonResult{0.5, 0.01};
  entries[1].label = "-question";
  entries[1].result.mae_percent = 45.6;
  const auto table = render_ablation_table(entries);
  CHECK(table.find("Model") != std::string::npos);
  CHECK(table.find("MAE (%)") != std::string::npos);
  CHECK(table.find("Pearson r (%)") != std::string::npos);
  CHECK(table.find("DISTO ") != std::string::npos);
  CHECK(table.find("DISTO - Question") != std::string::npos);
  CHECK(table.find("12.34") != std::string::npos);
  CHECK(table.find("50.00") != std::string::npos);
  CHECK(table.find("45.60") != std::string::npos);
  CHECK(table.find("n/a") != std::string::npos);
}

TEST_SUITE_END();
