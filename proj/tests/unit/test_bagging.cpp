#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mixens/bagging.hpp"
#include "mixens/errors.hpp"

using namespace mixens;

namespace {

std::vector<double> weights_of(const VotingWeights& w) {
  std::vector<double> out;
  for (const auto& e : w.entries()) out.push_back(e.weight);
  return out;
}

}  // namespace

TEST_SUITE("bagging") {
  TEST_CASE("equal weights") {
    std::vector<PredictionMatrix> ms;
    for (int i = 0; i < 4; ++i) ms.push_back(fixtures::random_matrix("M" + std::to_string(i), 5, 3, i));
    CHECK(weights_of(tune_weights(ms, nullptr, EqualWeights{})) ==
          std::vector<double>{0.25, 0.25, 0.25, 0.25});
  }

  TEST_CASE("accuracy-proportional weights") {
    // M1 right on 9 of 10 samples, M2 on 6 of 10.
    std::vector<std::size_t> y(10, 0);
    std::vector<double> p1, p2;
    for (int i = 0; i < 10; ++i) {
      const bool r1 = i < 9;
      const bool r2 = i < 6;
      p1.insert(p1.end(), {r1 ? 0.8 : 0.2, r1 ? 0.2 : 0.8});
      p2.insert(p2.end(), {r2 ? 0.8 : 0.2, r2 ? 0.2 : 0.8});
    }
    const std::vector<PredictionMatrix> ms{fixtures::matrix("M1", 2, p1),
                                           fixtures::matrix("M2", 2, p2)};
    const auto labels = fixtures::labels(2, y);
    const auto w = weights_of(tune_weights(ms, &labels, AccuracyProportional{}));
    CHECK(w[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(tune_weights(ms, nullptr, AccuracyProportional{}), ConfigError);

    const auto wrong = fixtures::labels(2, std::vector<std::size_t>(10, 1));
    std::vector<double> all_wrong;
    for (int i = 0; i < 10; ++i) all_wrong.insert(all_wrong.end(), {0.9, 0.1});
    const std::vector<PredictionMatrix> zero{fixtures::matrix("M1", 2, all_wrong)};
    CHECK_THROWS_AS(tune_weights(zero, &wrong, AccuracyProportional{}), ConfigError);
  }

  TEST_CASE("explicit weights are normalized and validated") {
    std::vector<PredictionMatrix> ms{fixtures::random_matrix("M1", 3, 2, 1),
                                     fixtures::random_matrix("M2", 3, 2, 2)};
    CHECK(weights_of(tune_weights(ms, nullptr, ExplicitWeights{{2, 2}})) ==
          std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(tune_weights(ms, nullptr, ExplicitWeights{{0, 0}}), ConfigError);
    CHECK_THROWS_AS(tune_weights(ms, nullptr, ExplicitWeights{{-1, 2}}), ConfigError);
    CHECK_THROWS_AS(tune_weights(ms, nullptr, ExplicitWeights{{1}}), ConfigError);
  }

  TEST_CASE("bag_predict worked examples") {
    const auto m1 = fixtures::matrix("M1", 2, {0.6, 0.4});
    const auto m2 = fixtures::matrix("M2", 2, {0.2, 0.8});
    const std::vector<PredictionMatrix> ms{m1, m2};
    const auto avg = bag_predict(ms, tune_weights(ms, nullptr, EqualWeights{}));
    CHECK(avg.at(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(avg.at(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(avg.predictor().str() == "bag(M1,M2)");

    const std::vector<PredictionMatrix> onehots{fixtures::matrix("A", 2, {1, 0}),
                                                fixtures::matrix("B", 2, {0, 1})};
    const auto w = bag_predict(onehots, tune_weights(onehots, nullptr, ExplicitWeights{{0.75, 0.25}}));
    CHECK(w.at(0, 0) == 0.75);
    CHECK(w.at(0, 1) == 0.25);

    const std::vector<PredictionMatrix> single{m1};
    const auto same = bag_predict(single, tune_weights(single, nullptr, EqualWeights{}));
    CHECK(std::equal(same.probs().begin(), same.probs().end(), m1.probs().begin()));
  }

  TEST_CASE("predictor and weight sets must match") {
    const std::vector<PredictionMatrix> ms{fixtures::random_matrix("M1", 3, 2, 1)};
    const auto w = VotingWeights::normalized({{PredictorId("M9"), 1.0}});
    CHECK_THROWS_AS(bag_predict(ms, w), ConfigError);
    CHECK_THROWS_AS(VotingWeights::normalized({{PredictorId("A"), 1.0}, {PredictorId("A"), 1.0}}),
                    ConfigError);
  }

  TEST_CASE("equal-weight argmax equals argmax of the unweighted sum") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::vector<PredictionMatrix> ms;
      for (int i = 0; i < 5; ++i) {
        ms.push_back(fixtures::random_matrix("M" + std::to_string(i), 30, 4, seed * 10 + i));
      }
      const auto bag = bag_predict(ms, tune_weights(ms, nullptr, EqualWeights{}));
      const auto labels = argmax_labels(bag);
      for (std::size_t r = 0; r < 30; ++r) {
        std::vector<double> sum(4, 0.0);
        for (const auto& m : ms) {
          for (std::size_t k = 0; k < 4; ++k) sum[k] += m.at(r, k);
        }
        CHECK(labels[r] == argmax(sum));
      }
    }
  }
}
