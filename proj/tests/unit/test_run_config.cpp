#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mixens/commands.hpp"
#include "mixens/errors.hpp"
#include "mixens/rng.hpp"
#include "mixens/run_config.hpp"

using namespace mixens;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mixens_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

const char* kMinimal = R"({
  "tasks": [{"task_id": "t1", "class_count": 2}],
  "predictors": ["M1", {"id": "M2", "file": "{task}/other.csv"}],
  "mixture": {"bag_members": ["M1", "M2"],
              "groups": [{"name": "g", "members": ["M1", "M2"],
                          "booster": {"preset": "shallow_fast", "rounds": 3}}]},
  "splits": {"holdout_fraction": 0.25, "k": 2, "seed": 5}
})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing resolves paths, templates and presets") {
    const auto c = parse_run_config(kMinimal, "/data/base");
    CHECK(c.data_root == fs::path("/data/base/."));
    CHECK(c.predictor_path(c.predictors[0], c.tasks[0]) == fs::path("/data/base/./t1/M1.csv"));
    CHECK(c.predictor_path(c.predictors[1], c.tasks[0]) == fs::path("/data/base/./t1/other.csv"));
    REQUIRE(c.mixture.groups.size() == 1);
    CHECK(c.mixture.groups[0].booster_params.rounds == 3);
    CHECK(c.mixture.groups[0].booster_params.max_depth == 2);
    CHECK(c.seed() == 5);
    const auto strategies = c.resolved_strategies();
    REQUIRE(strategies.size() == 2);
    CHECK(strategies[0].groups.empty());
    CHECK(strategies[1].name == "full");
  }

  TEST_CASE("seed is mandatory") {
    auto c = parse_run_config(R"({"tasks": [{"task_id": "t", "class_count": 2}],
                                  "predictors": ["M1"], "mixture": {"bag_members": ["M1"]}})",
                              ".");
    CHECK_THROWS_AS(c.seed(), ConfigError);
  }

  TEST_CASE("validation names the missing file") {
    const auto dir = scratch("cfg_missing");
    write(dir / "config.json", kMinimal);
    write(dir / "t1" / "labels.csv", "sample_id,label\na,0\nb,1\nc,0\nd,1\n");
    write(dir / "t1" / "M1.csv", "sample_id,c0,c1\na,1,0\nb,0,1\nc,1,0\nd,0,1\n");
    try {
      make_context(dir / "config.json", std::nullopt, std::nullopt, 1);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("other.csv") != std::string::npos);
    }
    write(dir / "t1" / "other.csv", "sample_id,c0,c1\na,1,0\nb,0,1\nc,1,0\nd,0,1\n");
    const auto ctx = make_context(dir / "config.json", 9, dir / "out", 1);
    CHECK(ctx.seed == 9);
    CHECK(ctx.out == dir / "out");
    fs::remove_all(dir);
  }

  TEST_CASE("structural config errors") {
    CHECK_THROWS_AS(parse_run_config("{not json", "."), FormatError);
    auto c = parse_run_config(kMinimal, ".");
    c.mixture.bag_members = to_predictor_ids({"M7"});
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = parse_run_config(kMinimal, ".");
    c.strategies = {{"s", {"nope"}}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("config JSON round trip") {
    const auto c = parse_run_config(kMinimal, "/base");
    const auto again = parse_run_config(run_config_to_json(c), "/elsewhere");
    CHECK(again.mixture == c.mixture);
    CHECK(again.splits.seed == c.splits.seed);
    CHECK(again.predictors.size() == 2);
    CHECK(again.predictors[1].file_template == "{task}/other.csv");
  }

  TEST_CASE("commands on a tiny synthetic fixture") {
    const auto dir = scratch("cmds");
    SynthOptions so;
    so.spec.n_samples = 120;
    so.spec.predictor_accuracies = {0.9, 0.85, 0.8};
    so.spec.seed = 3;
    so.tasks = 2;
    so.out = dir / "fx";
    cmd_synth(so);
    const auto ctx = make_context(dir / "fx" / "config.json", std::nullopt, dir / "bag", 1);

    BagOptions single;
    single.members = {"M2"};
    const auto r = cmd_bag(ctx, single);
    const auto e = cmd_eval(make_context(dir / "fx" / "config.json", std::nullopt, dir / "ev", 1),
                            dir / "bag");
    CHECK(e.basic_precision == r.basic_precision);

    BoostOptions zero;
    zero.members = {"M1", "M2"};
    zero.rounds = 0;
    const auto boost_ctx = make_context(dir / "fx" / "config.json", std::nullopt, dir / "b0", 1);
    cmd_boost(boost_ctx, zero);
    std::ifstream cv(dir / "b0" / "cv.csv");
    CHECK(cv.good());

    BoostOptions too_many;
    too_many.members = {"M1"};
    auto big_k = make_context(dir / "fx" / "config.json", std::nullopt, dir / "bk", 1);
    big_k.config.splits.k = 1000;
    CHECK_THROWS_AS(cmd_boost(big_k, too_many), ConfigError);

    const auto d = cmd_diff(make_context(dir / "fx" / "config.json", std::nullopt, dir / "d", 1),
                            dir / "bag", dir / "bag");
    CHECK(d.mean == 0.0);
    fs::remove_all(dir);
  }

  TEST_CASE("rounds=0 booster accuracy equals the class-0 frequency") {
    const auto dir = scratch("round0");
    SynthOptions so;
    so.spec.n_samples = 300;
    so.spec.predictor_accuracies = {0.9, 0.85};
    so.spec.seed = 4;
    so.tasks = 1;
    so.out = dir / "fx";
    cmd_synth(so);
    const auto ctx = make_context(dir / "fx" / "config.json", std::nullopt, dir / "b", 1);
    BoostOptions zero;
    zero.members = {"M1"};
    zero.rounds = 0;
    const auto report = cmd_boost(ctx, zero);
    // Compare with class-0 frequency on the evaluation split.
    const auto labels = load_labels(ctx.config.labels_path(ctx.config.tasks[0]), ctx.config.tasks[0]);
    const auto split = holdout_split(labels, ctx.config.splits.holdout_fraction,
                                     derive_seed(ctx.seed, 0));
    const auto eval = select_samples(labels, split.train_ids);
    double zeros = 0;
    for (const auto y : eval.labels()) zeros += y == 0;
    CHECK(report.basic_precision == doctest::Approx(zeros / eval.size()).epsilon(1e-15));
    fs::remove_all(dir);
  }
}
