#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "mixens/core_data.hpp"
#include "mixens/errors.hpp"

using namespace mixens;

TEST_SUITE("core_data") {
  TEST_CASE("task spec rejects fewer than two classes and empty ids") {
    CHECK_THROWS_AS(TaskSpec("t", 1), ValidationError);
    CHECK_THROWS_AS(TaskSpec("", 3), ValidationError);
    CHECK(TaskSpec("t", 2).class_count() == 2);
  }

  TEST_CASE("reading a valid file yields sorted rows") {
    std::istringstream in("sample_id,c0,c1\nb,0.25,0.75\na,0.5,0.5\nc,1,0\n");
    const auto m = read_predictions(in, TaskSpec("t", 2), PredictorId("M1"));
    REQUIRE(m.n_samples() == 3);
    CHECK(m.sample_ids() == std::vector<std::string>{"a", "b", "c"});
    CHECK(m.at(1, 1) == 0.75);
  }

  TEST_CASE("out-of-order rows give the same matrix as sorted input") {
    std::istringstream sorted("sample_id,c0,c1\na,0.5,0.5\nb,0.25,0.75\n");
    std::istringstream shuffled("sample_id,c0,c1\nb,0.25,0.75\na,0.5,0.5\n");
    const TaskSpec t("t", 2);
    const auto a = read_predictions(sorted, t, PredictorId("M"));
    const auto b = read_predictions(shuffled, t, PredictorId("M"));
    CHECK(a.sample_ids() == b.sample_ids());
    CHECK(std::equal(a.probs().begin(), a.probs().end(), b.probs().begin()));
  }

  TEST_CASE("row sum outside tolerance is a validation error naming the sample") {
    std::istringstream in("sample_id,c0,c1\ns1,0.7,0.4\n");
    try {
      read_predictions(in, TaskSpec("t", 2), PredictorId("M1"));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("s1") != std::string::npos);
    }
  }

  TEST_CASE("negative probability and malformed rows are rejected") {
    std::istringstream neg("sample_id,c0,c1\ns1,-0.1,1.1\n");
    CHECK_THROWS_AS(read_predictions(neg, TaskSpec("t", 2), PredictorId("M")), ValidationError);
    std::istringstream cols("sample_id,c0,c1\ns1,0.5\n");
    try {
      read_predictions(cols, TaskSpec("t", 2), PredictorId("M"), "file.csv");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("file.csv:2") != std::string::npos);
    }
    std::istringstream header("id,c0,c1\ns1,0.5,0.5\n");
    CHECK_THROWS_AS(read_predictions(header, TaskSpec("t", 2), PredictorId("M")), FormatError);
    std::istringstream dup("sample_id,c0,c1\ns1,0.5,0.5\ns1,0.5,0.5\n");
    CHECK_THROWS_AS(read_predictions(dup, TaskSpec("t", 2), PredictorId("M")), ValidationError);
  }

  TEST_CASE("save then load is the identity at nine significant digits") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto m = fixtures::random_matrix("M1", 20, 4, seed);
      std::ostringstream out;
      write_predictions(out, m);
      std::istringstream in(out.str());
      const auto back = read_predictions(in, m.task(), m.predictor());
      std::ostringstream again;
      write_predictions(again, back);
      CHECK(out.str() == again.str());
      for (std::size_t i = 0; i < m.probs().size(); ++i) {
        CHECK(std::abs(back.probs()[i] - m.probs()[i]) <= 5e-10);
      }
    }
  }

  TEST_CASE("labels round trip and range check") {
    const auto y = fixtures::labels(3, {0, 2, 1, 1});
    std::ostringstream out;
    write_labels(out, y);
    CHECK(out.str().rfind("sample_id,label\n", 0) == 0);
    std::istringstream in(out.str());
    CHECK(read_labels(in, y.task()).labels() == y.labels());
    std::istringstream bad("sample_id,label\ns0,3\n");
    CHECK_THROWS_AS(read_labels(bad, TaskSpec("t", 3)), ValidationError);
  }

  TEST_CASE("concat_features orders blocks by group") {
    const auto m1 = fixtures::matrix("M1", 2, {0.6, 0.4});
    const auto m2 = fixtures::matrix("M2", 2, {0.2, 0.8});
    const std::vector<PredictionMatrix> ms{m1, m2};
    const auto ab = concat_features(ms, to_predictor_ids({"M1", "M2"}));
    CHECK(std::vector<double>(ab.row(0).begin(), ab.row(0).end()) ==
          std::vector<double>{0.6, 0.4, 0.2, 0.8});
    const auto ba = concat_features(ms, to_predictor_ids({"M2", "M1"}));
    CHECK(std::vector<double>(ba.row(0).begin(), ba.row(0).end()) ==
          std::vector<double>{0.2, 0.8, 0.6, 0.4});
    CHECK(ba.column_origin()[0] == ColumnOrigin{PredictorId("M2"), 0});
    CHECK_THROWS_AS(concat_features(ms, to_predictor_ids({"M3"})), MissingPredictorError);
  }

  TEST_CASE("concat_features of a singleton group equals the predictor probs") {
    const auto m = fixtures::random_matrix("M1", 10, 3, 9);
    const std::vector<PredictionMatrix> ms{m};
    const auto f = concat_features(ms, to_predictor_ids({"M1"}));
    REQUIRE(f.n_features() == 3);
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t k = 0; k < 3; ++k) CHECK(f.at(i, k) == m.at(i, k));
    }
  }

  TEST_CASE("concat_features requires aligned sample ids") {
    const auto m1 = fixtures::matrix("M1", 2, {0.5, 0.5, 0.5, 0.5});
    const PredictionMatrix m2(PredictorId("M2"), TaskSpec("t", 2), {"x0", "x1"},
                              {0.5, 0.5, 0.5, 0.5});
    const std::vector<PredictionMatrix> ms{m1, m2};
    CHECK_THROWS_AS(concat_features(ms, to_predictor_ids({"M1", "M2"})), AlignmentError);
  }

  TEST_CASE("argmax ties go to the lowest class") {
    const double a[] = {0.1, 0.7, 0.2};
    const double b[] = {0.5, 0.5};
    const double c[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(argmax(a) == 1);
    CHECK(argmax(b) == 0);
    CHECK(argmax(c) == 0);
  }

  TEST_CASE("argmax is invariant under positive row scaling") {
    mixens::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> row(4);
      for (auto& v : row) v = static_cast<double>(rng.below(4));  // ties likely
      const double s = rng.uniform(0.1, 10.0);
      std::vector<double> scaled = row;
      for (auto& v : scaled) v *= s;
      CHECK(argmax(row) == argmax(scaled));
    }
  }

  TEST_CASE("select_samples picks rows by id") {
    const auto m = fixtures::random_matrix("M1", 6, 2, 4);
    const auto sub = select_samples(m, {"s1", "s4"});
    REQUIRE(sub.n_samples() == 2);
    CHECK(sub.at(1, 0) == m.at(4, 0));
    CHECK_THROWS_AS(select_samples(m, {"zz"}), AlignmentError);
  }
}
