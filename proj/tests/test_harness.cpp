#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "dcsgd/harness.hpp"

using namespace dcsgd;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.experiment_id = "sc-e1";
  cfg.d = 2;
  cfg.n = 500;
  cfg.trials = 3;
  cfg.k = 10;
  cfg.noise = {NoiseFamily::LogNormal, 1.75};
  cfg.master_seed = 42;
  cfg.methods = {{"sgd", 0.00707, 500}};
  return cfg;
}

std::vector<double> excess_column(const std::vector<TrialRecord>& records) {
  std::vector<double> out;
  for (const TrialRecord& r : records) out.push_back(r.excess_risk);
  return out;
}

std::map<std::string, double> final_medians(const std::vector<TrialRecord>& records) {
  std::map<std::string, std::map<int, std::pair<long long, double>>> finals;
  for (const TrialRecord& r : records) {
    auto& slot = finals[r.method][r.trial];
    if (r.cost >= slot.first) slot = {r.cost, r.excess_risk};
  }
  std::map<std::string, double> medians;
  for (auto& [method, trials] : finals) {
    std::vector<double> vals;
    for (auto& [trial, cv] : trials) vals.push_back(cv.second);
    medians[method] = scalar_median(vals);
  }
  return medians;
}

}  // namespace

TEST_CASE("single sgd trial spends exactly one pass") {
  ExperimentConfig cfg = tiny_config();
  cfg.trials = 1;
  const auto records = run_experiment(cfg);
  REQUIRE(!records.empty());
  long long max_cost = 0;
  for (const auto& r : records) max_cost = std::max(max_cost, r.cost);
  CHECK(max_cost == 500);
}

TEST_CASE("identical configs reproduce identical excess-risk columns") {
  const ExperimentConfig cfg = tiny_config();
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  REQUIRE(a.size() == b.size());
  CHECK(excess_column(a) == excess_column(b));
  ExperimentConfig other = cfg;
  other.master_seed = 43;
  CHECK(excess_column(run_experiment(other)) != excess_column(a));
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig cfg = tiny_config();
  cfg.trials = 6;
  cfg.methods = {{"sgd", 0.00707, 400}, {"dc-sgd", 0.00707, 400}, {"rv-sgdave", 0.00707, 400}};
  const auto serial = run_experiment(cfg, 1);
  const auto parallel = run_experiment(cfg, 8);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(serial[i].method == parallel[i].method);
    REQUIRE(serial[i].trial == parallel[i].trial);
    REQUIRE(serial[i].cost == parallel[i].cost);
    REQUIRE(serial[i].excess_risk == parallel[i].excess_risk);
  }
}

TEST_CASE("costs are monotone and within budget for every method") {
  ExperimentConfig cfg = tiny_config();
  cfg.trials = 2;
  cfg.n = 200;
  const long long budget = 2000;
  cfg.methods.clear();
  for (const char* name : {"erm-gd", "sgd", "rgd-mom", "rgd-m", "rgd-lec", "dc-sgd", "rv-sgd",
                           "rv-sgdave", "rv-sgd-cv", "rv-sgdave-cv"}) {
    cfg.methods.push_back({name, 0.05, budget});
  }
  const auto records = run_experiment(cfg);
  std::map<std::pair<std::string, int>, long long> last_cost;
  for (const auto& r : records) {
    REQUIRE(r.excess_risk >= 0.0);
    REQUIRE(r.cost <= budget);
    auto key = std::make_pair(r.method, r.trial);
    auto it = last_cost.find(key);
    if (it != last_cost.end()) REQUIRE(r.cost > it->second);
    last_cost[key] = r.cost;
  }
  // every (method, trial) ends exactly at a full number of affordable steps
  for (const auto& [key, cost] : last_cost) REQUIRE(cost > 0);
}

TEST_CASE("method precondition failures become NaN rows, not aborts") {
  ExperimentConfig cfg = tiny_config();
  cfg.n = 30;  // validation half of 15 cannot support catoni at delta = 1e-4
  cfg.k = 10;
  cfg.trials = 2;
  cfg.validator.kind = ValidatorKind::Catoni;
  cfg.validator.delta = 1e-4;
  cfg.methods = {{"rv-sgdave", 0.01, 60}, {"sgd", 0.01, 60}};
  const auto records = run_experiment(cfg);
  int nan_rows = 0, sgd_rows = 0;
  for (const auto& r : records) {
    if (std::isnan(r.excess_risk)) {
      ++nan_rows;
      CHECK(r.method == "rv-sgdave");
    }
    if (r.method == "sgd") ++sgd_rows;
  }
  CHECK(nan_rows == 2);
  CHECK(sgd_rows > 0);
  const auto summary = summarize(records);
  int failure_groups = 0;
  for (const auto& row : summary) failure_groups += row.failures;
  CHECK(failure_groups == 2);
}

TEST_CASE("summarize computes the five statistics") {
  std::vector<TrialRecord> records;
  for (int t = 0; t < 3; ++t) {
    records.push_back({"sc-e1", "sgd", t, 100, 1.0 + t, 0.5});
  }
  const auto rows = summarize(records);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mean == doctest::Approx(2.0));
  CHECK(rows[0].median == doctest::Approx(2.0));
  CHECK(rows[0].sd == doctest::Approx(1.0));
  CHECK(rows[0].q1 <= rows[0].median);
  CHECK(rows[0].median <= rows[0].q3);
  CHECK(rows[0].count == 3);
  CHECK_FALSE(rows[0].sd_degenerate);

  const auto single = summarize({{"sc-e1", "sgd", 0, 100, 5.0, 0.1}});
  REQUIRE(single.size() == 1);
  CHECK(single[0].mean == 5.0);
  CHECK(single[0].median == 5.0);
  CHECK(single[0].sd == 0.0);
  CHECK(single[0].sd_degenerate);

  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("summarize is invariant to record order") {
  ExperimentConfig cfg = tiny_config();
  cfg.trials = 4;
  auto records = run_experiment(cfg);
  const auto rows = summarize(records);
  std::reverse(records.begin(), records.end());
  const auto reversed_rows = summarize(records);
  REQUIRE(rows.size() == reversed_rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].mean == reversed_rows[i].mean);
    REQUIRE(rows[i].median == reversed_rows[i].median);
  }
}

TEST_CASE("presets resolve the published protocol numbers") {
  const ExperimentConfig e1 = preset("sc-e1", "paper");
  CHECK(e1.d == 2);
  CHECK(e1.n == 500);
  CHECK(e1.trials == 100);
  CHECK(e1.k == 10);
  CHECK(e1.init_scale == 5.0);
  CHECK(e1.init_mode == InitMode::Raw);
  const long long budget = std::llround(40.0 * 500 * std::sqrt(2.0));
  for (const MethodSpec& m : e1.methods) {
    CHECK(m.budget == budget);
    const double coef = (m.name == "sgd" || m.name == "dc-sgd") ? 0.01 : 0.1;
    CHECK(m.alpha == doctest::Approx(coef / std::sqrt(2.0)));
  }

  const ExperimentConfig e2 = preset("sc-e2", "paper");
  CHECK(e2.d == 1024);
  CHECK(e2.n == 2500);
  CHECK(e2.trials == 250);
  CHECK(e2.init_mode == InitMode::ScaledBySqrtD);
  for (const MethodSpec& m : e2.methods) {
    CHECK(m.budget == (m.name == "dc-sgd" ? 2LL * 2500 : 100LL * 2500));
  }

  const ExperimentConfig e2_desk = preset("sc-e2", "desk");
  CHECK(e2_desk.d == 128);
  CHECK(e2_desk.trials == 25);

  const ExperimentConfig nc2 = preset("nc-e2", "paper");
  CHECK(nc2.curvature == Curvature::HalfFlat);
  bool has_rv = false;
  for (const MethodSpec& m : nc2.methods) {
    if (m.name == "rv-sgdave") {
      has_rv = true;
      CHECK(m.budget == 2LL * 2500);
    }
  }
  CHECK(has_rv);

  CHECK_THROWS_AS(preset("nope", "desk"), std::invalid_argument);
  CHECK_THROWS_AS(preset("sc-e1", "galactic"), std::invalid_argument);
}

TEST_CASE("config JSON round trip preserves the experiment") {
  ExperimentConfig cfg = preset("nc-e4", "desk");
  cfg.master_seed = 2718;
  cfg.merge.beta = 0.2;
  cfg.validator.k_blocks = 4;
  const std::string text = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(text);
  CHECK(back.experiment_id == cfg.experiment_id);
  CHECK(back.d == cfg.d);
  CHECK(back.n == cfg.n);
  CHECK(back.trials == cfg.trials);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.curvature == cfg.curvature);
  CHECK(back.noise.family == cfg.noise.family);
  CHECK(back.noise.b == cfg.noise.b);
  CHECK(back.merge.beta.has_value());
  CHECK(*back.merge.beta == 0.2);
  CHECK(back.validator.k_blocks.has_value());
  REQUIRE(back.methods.size() == cfg.methods.size());
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    CHECK(back.methods[i].name == cfg.methods[i].name);
    CHECK(back.methods[i].alpha == cfg.methods[i].alpha);
    CHECK(back.methods[i].budget == cfg.methods[i].budget);
  }
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(back);
  CHECK(excess_column(a) == excess_column(b));
}

TEST_CASE("config validation names the offending field") {
  ExperimentConfig cfg = tiny_config();
  cfg.methods[0].budget = 0;
  try {
    validate_config(cfg);
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("methods[0].budget") != std::string::npos);
  }
  cfg = tiny_config();
  cfg.methods[0].name = "warp-drive";
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg = tiny_config();
  cfg.k = 1000;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{not json"), std::invalid_argument);
}

TEST_CASE("records and summary CSV round trip") {
  ExperimentConfig cfg = tiny_config();
  cfg.trials = 2;
  const auto records = run_experiment(cfg);
  std::ostringstream rec_os;
  write_records_csv(rec_os, records);
  const std::string rec_text = rec_os.str();
  CHECK(rec_text.rfind("experiment,method,trial,cost,excess_risk,elapsed_s\n", 0) == 0);

  const auto summary = summarize(records);
  std::ostringstream sum_os;
  write_summary_csv(sum_os, summary);
  std::istringstream sum_is(sum_os.str());
  const auto parsed = read_summary_csv(sum_is);
  REQUIRE(parsed.size() == summary.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    REQUIRE(parsed[i].method == summary[i].method);
    REQUIRE(parsed[i].cost == summary[i].cost);
    REQUIRE(parsed[i].mean == summary[i].mean);  // %.17g survives the round trip
    REQUIRE(parsed[i].med_elapsed_s == summary[i].med_elapsed_s);
  }

  std::istringstream bad("wrong,header\n1,2\n");
  CHECK_THROWS_AS(read_summary_csv(bad), std::invalid_argument);
}

TEST_CASE("dc-sgd improves on sgd at desk scale (trajectory direction)") {
  ExperimentConfig cfg = preset("sc-e1", "desk");
  cfg.trials = 20;
  cfg.master_seed = 7;
  std::vector<MethodSpec> wanted;
  for (const MethodSpec& m : cfg.methods) {
    if (m.name == "sgd" || m.name == "dc-sgd") wanted.push_back(m);
  }
  cfg.methods = wanted;
  const auto records = run_experiment(cfg, 1);
  const auto medians = final_medians(records);
  CHECK(medians.at("dc-sgd") <= medians.at("sgd"));
}

TEST_CASE("epoch shuffling stays deterministic and changes trajectories") {
  ExperimentConfig cfg = tiny_config();
  cfg.trials = 2;
  cfg.methods = {{"sgd", 0.00707, 1500}, {"dc-sgd", 0.00707, 1500}};
  const auto plain = run_experiment(cfg);
  cfg.shuffle = true;
  const auto shuffled_a = run_experiment(cfg);
  const auto shuffled_b = run_experiment(cfg, 4);
  CHECK(excess_column(shuffled_a) == excess_column(shuffled_b));  // still seeded
  CHECK(excess_column(shuffled_a) != excess_column(plain));       // different orders
}

TEST_CASE("rv budget semantics: 2n spend with an initialization pass") {
  ExperimentConfig cfg;
  cfg.experiment_id = "nc-e2";
  cfg.d = 8;
  cfg.n = 400;
  cfg.curvature = Curvature::HalfFlat;
  cfg.noise = {NoiseFamily::LogNormal, 1.75};
  cfg.trials = 2;
  cfg.k = 10;
  cfg.init_mode = InitMode::ScaledBySqrtD;
  cfg.master_seed = 11;
  cfg.methods = {{"rv-sgdave", 0.0035, 800}};
  const auto records = run_experiment(cfg);
  long long max_cost = 0;
  for (const auto& r : records) max_cost = std::max(max_cost, r.cost);
  CHECK(max_cost == 800);  // init pass (200) + 3 continuation passes (3 x 200)
}
