#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dcsgd/merge.hpp"
#include "dcsgd/robust_scalar.hpp"
#include "dcsgd/synthetic.hpp"

namespace dcsgd {

// Method identifiers: erm-gd, sgd, rgd-mom, rgd-m, rgd-lec, dc-sgd, rv-sgd,
// rv-sgdave, rv-sgd-cv, rv-sgdave-cv.
struct MethodSpec {
  std::string name;
  double alpha = 0.0;      // resolved absolute step size
  long long budget = 0;    // resolved gradient-evaluation budget
};

enum class InitMode { Raw, ScaledBySqrtD };

struct ExperimentConfig {
  std::string experiment_id;
  int d = 2;
  int n = 500;
  Curvature curvature = Curvature::Identity;
  NoiseModel noise{};
  int trials = 25;
  int k = 10;
  double init_scale = 5.0;
  InitMode init_mode = InitMode::Raw;
  std::uint64_t master_seed = 1;
  bool shuffle = false;
  MergeRule merge{};
  Validator validator{};
  int checkpoints_per_decade = 20;
  std::vector<MethodSpec> methods;
};

// One (experiment, method, trial, checkpoint) measurement. Failed
// (method, trial) pairs are kept as rows with excess_risk = NaN.
struct TrialRecord {
  std::string experiment_id;
  std::string method;
  int trial = 0;
  long long cost = 0;
  double excess_risk = 0.0;
  double elapsed_s = 0.0;
};

struct SummaryRow {
  std::string experiment_id;
  std::string method;
  long long cost = 0;
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double med_elapsed_s = 0.0;
  int count = 0;
  int failures = 0;
  bool sd_degenerate = false;  // single observation; sd reported as 0
};

// Validates the config, throwing std::invalid_argument naming the first
// offending field.
void validate_config(const ExperimentConfig& cfg);

// Runs every configured method on every trial. Trials are independent tasks
// distributed over `workers` threads; output is identical for any worker
// count (elapsed times aside). Records come back sorted by
// (method, trial, cost).
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, int workers = 1);

// Five-number statistics over trials per (method, checkpoint); sd uses the
// n-1 denominator and degenerates to 0 for singleton groups.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

// Known experiment ids: sc-e1..sc-e5, nc-e1..nc-e4.
std::vector<std::string> preset_ids();
std::string preset_description(const std::string& id);

// Paper scale reproduces the published protocol sizes; desk scale caps
// trials at 25 and d at 128 (8 for the timing experiments) with all ratios
// (budget factors, k, step-size coefficients) intact.
ExperimentConfig preset(const std::string& id, const std::string& scale);

ExperimentConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& is);

}  // namespace dcsgd
