#include "dcsgd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "dcsgd/baselines.hpp"
#include "dcsgd/boosting.hpp"
#include "dcsgd/rng.hpp"

namespace dcsgd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Geometric cost grid, ~per_decade points per decade, ending at the budget.
std::vector<long long> checkpoint_grid(long long budget, int per_decade) {
  std::vector<long long> grid;
  long long last = 0;
  for (int i = 0;; ++i) {
    const double c = std::pow(10.0, static_cast<double>(i) / per_decade);
    const long long ci = std::llround(c);
    if (ci >= budget) break;
    if (ci > last) {
      grid.push_back(ci);
      last = ci;
    }
  }
  if (budget > 0) grid.push_back(budget);
  return grid;
}

struct TimedPoint {
  long long cost = 0;
  ParamVec w;
  double elapsed_s = 0.0;
};

// Tracks the next checkpoint to emit; at most one record per advancement.
class CheckpointCursor {
 public:
  CheckpointCursor(std::span<const long long> grid) : grid_(grid) {}
  bool due(long long cost) {
    if (next_ >= grid_.size() || cost < grid_[next_]) return false;
    while (next_ < grid_.size() && grid_[next_] <= cost) ++next_;
    return true;
  }

 private:
  std::span<const long long> grid_;
  std::size_t next_ = 0;
};

// One SGD sub-process advancing through its own subset, cycling across
// passes, with the running average of the iterates entering each step.
struct SubProcess {
  std::vector<std::size_t> order;
  ParamVec w;
  ParamVec iterate_sum;
  std::size_t steps = 0;
  std::size_t pos = 0;
  Rng rng{0};
  bool shuffle = false;

  void reshuffle() {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
      std::swap(order[i], order[j]);
    }
  }

  void advance(const GradOracle& oracle, double alpha, const FeasibleSet& set) {
    add_inplace(iterate_sum, w);
    const ParamVec g = oracle.grad(w, order[pos]);
    w = project(axpy(w, -alpha, g), set);
    ++steps;
    if (++pos == order.size()) {
      pos = 0;
      if (shuffle) reshuffle();
    }
  }

  ParamVec average() const {
    if (steps == 0) return w;
    ParamVec avg = iterate_sum;
    scale_inplace(avg, 1.0 / static_cast<double>(steps));
    return avg;
  }
};

std::vector<SubProcess> make_subprocesses(const Partition& parts, const ParamVec& start,
                                          bool shuffle, std::uint64_t trial_seed) {
  std::vector<SubProcess> subs(parts.size());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    subs[j].order = parts[j];
    subs[j].w = start;
    subs[j].iterate_sum.assign(start.size(), 0.0);
    subs[j].shuffle = shuffle;
    subs[j].rng = Rng(mix_seed(trial_seed, j + 1));
    if (shuffle) subs[j].reshuffle();
  }
  return subs;
}

// DC-SGD with continuation across passes: the k sub-processes advance in
// lockstep (one round costs k gradients) and the merged point is re-computed
// at every checkpoint. Integration output is reported, never fed back.
std::vector<TimedPoint> run_dc_method(const QuadraticProblem& problem, const ParamVec& w0,
                                      const ExperimentConfig& cfg, const MethodSpec& spec,
                                      const FeasibleSet& set, std::span<const long long> grid,
                                      std::uint64_t trial_seed) {
  const auto t0 = Clock::now();
  std::vector<TimedPoint> out;
  out.push_back({0, w0, 0.0});
  const Partition parts = partition_indices(problem.size(), cfg.k);
  std::vector<SubProcess> subs = make_subprocesses(parts, w0, cfg.shuffle, trial_seed);
  CheckpointCursor cursor(grid);
  const long long round_cost = cfg.k;
  long long cost = 0;
  auto integrate = [&]() {
    CandidateSet cands;
    cands.reserve(subs.size());
    for (const SubProcess& s : subs) cands.push_back(s.w);
    return merge(cfg.merge, cands);
  };
  while (cost + round_cost <= spec.budget) {
    for (SubProcess& s : subs) s.advance(problem, spec.alpha, set);
    cost += round_cost;
    if (cursor.due(cost)) out.push_back({cost, integrate(), seconds_since(t0)});
  }
  if (out.back().cost < cost) out.push_back({cost, integrate(), seconds_since(t0)});
  return out;
}

// RV family. The training pool is the first half of the sample (the whole
// sample for the CV variants, which have no held-out half). One
// single-process SGD pass over the pool produces the common sub-process
// start -- its trajectory average, the same estimator convention the
// candidates use; the last iterate would hand every sub-process the same
// un-decayed heavy-tail kicks, which no selection step can undo. The k
// sub-processes then continue across passes with re-validation at every
// checkpoint.
std::vector<TimedPoint> run_rv_method(const QuadraticProblem& problem, const ParamVec& w0,
                                      const ExperimentConfig& cfg, const MethodSpec& spec,
                                      const FeasibleSet& set, std::span<const long long> grid,
                                      std::uint64_t trial_seed, bool average, bool cv) {
  const auto t0 = Clock::now();
  std::vector<TimedPoint> out;
  out.push_back({0, w0, 0.0});
  const std::size_t n = problem.size();
  const std::size_t pool_size = cv ? n : n / 2;
  if (pool_size == 0) throw std::invalid_argument("rv method: empty training pool");

  CheckpointCursor cursor(grid);
  long long cost = 0;

  // Initialization pass.
  ParamVec w = w0;
  ParamVec init_sum(w0.size(), 0.0);
  std::size_t init_steps = 0;
  ParamVec init_avg = w0;
  for (std::size_t i = 0; i < pool_size && cost + 1 <= spec.budget; ++i) {
    add_inplace(init_sum, w);
    ++init_steps;
    const ParamVec g = problem.grad(w, i);
    w = project(axpy(w, -spec.alpha, g), set);
    ++cost;
    if (cursor.due(cost)) {
      init_avg = init_sum;
      scale_inplace(init_avg, 1.0 / static_cast<double>(init_steps));
      out.push_back({cost, init_avg, seconds_since(t0)});
    }
  }
  if (init_steps > 0) {
    init_avg = init_sum;
    scale_inplace(init_avg, 1.0 / static_cast<double>(init_steps));
  }

  const Partition parts = partition_indices(pool_size, cfg.k);
  std::vector<SubProcess> subs = make_subprocesses(parts, init_avg, cfg.shuffle, trial_seed);

  auto candidate = [&](std::size_t j) { return average ? subs[j].average() : subs[j].w; };
  auto select = [&]() {
    CandidateSet cands;
    cands.reserve(subs.size());
    for (std::size_t j = 0; j < subs.size(); ++j) cands.push_back(candidate(j));
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      std::vector<double> losses;
      if (cv) {
        const std::size_t lo = parts[j].front();
        const std::size_t hi = parts[j].back() + 1;
        losses.reserve(n - parts[j].size());
        for (std::size_t i = 0; i < lo; ++i) losses.push_back(problem.loss(cands[j], i));
        for (std::size_t i = hi; i < n; ++i) losses.push_back(problem.loss(cands[j], i));
      } else {
        losses.reserve(n - pool_size);
        for (std::size_t i = pool_size; i < n; ++i) losses.push_back(problem.loss(cands[j], i));
      }
      const double score = validate(cfg.validator, losses);
      if (j == 0 || score < best_score) {
        best_score = score;
        best = j;
      }
    }
    return cands[best];
  };

  const long long round_cost = cfg.k;
  while (cost + round_cost <= spec.budget) {
    for (SubProcess& s : subs) s.advance(problem, spec.alpha, set);
    cost += round_cost;
    if (cursor.due(cost)) out.push_back({cost, select(), seconds_since(t0)});
  }
  if (out.back().cost < cost) out.push_back({cost, select(), seconds_since(t0)});
  return out;
}

std::vector<TimedPoint> run_baseline_method(const QuadraticProblem& problem, const ParamVec& w0,
                                            const ExperimentConfig& cfg, const MethodSpec& spec,
                                            const FeasibleSet& set, std::span<const long long> grid,
                                            std::uint64_t trial_seed) {
  BaselineConfig bc;
  bc.k = cfg.k;
  bc.alpha = spec.alpha;
  bc.delta = cfg.validator.delta;
  bc.merge_tol = cfg.merge.tol;
  if (spec.name == "erm-gd") {
    bc.method = BaselineMethod::ErmGd;
  } else if (spec.name == "sgd") {
    bc.method = BaselineMethod::Sgd;
    bc.shuffle = cfg.shuffle;
    bc.shuffle_seed = mix_seed(trial_seed, hash_string("sgd-shuffle"));
  } else if (spec.name == "rgd-mom") {
    bc.method = BaselineMethod::RgdMoM;
  } else if (spec.name == "rgd-m") {
    bc.method = BaselineMethod::RgdM;
  } else if (spec.name == "rgd-lec") {
    bc.method = BaselineMethod::MomByGd;
  } else {
    throw std::invalid_argument("unknown method: " + spec.name);
  }
  std::vector<CheckpointedPoint> pts = run_baseline(bc, problem, w0, spec.budget, set, grid);
  std::vector<TimedPoint> out;
  out.reserve(pts.size());
  for (CheckpointedPoint& p : pts) {
    out.push_back({p.cost, std::move(p.w), p.elapsed_s});
  }
  return out;
}

std::vector<TimedPoint> run_method(const QuadraticProblem& problem, const ParamVec& w0,
                                   const ExperimentConfig& cfg, const MethodSpec& spec,
                                   const FeasibleSet& set, std::span<const long long> grid,
                                   std::uint64_t trial_seed) {
  if (spec.name == "dc-sgd") return run_dc_method(problem, w0, cfg, spec, set, grid, trial_seed);
  if (spec.name == "rv-sgd") return run_rv_method(problem, w0, cfg, spec, set, grid, trial_seed, false, false);
  if (spec.name == "rv-sgdave") return run_rv_method(problem, w0, cfg, spec, set, grid, trial_seed, true, false);
  if (spec.name == "rv-sgd-cv") return run_rv_method(problem, w0, cfg, spec, set, grid, trial_seed, false, true);
  if (spec.name == "rv-sgdave-cv") return run_rv_method(problem, w0, cfg, spec, set, grid, trial_seed, true, true);
  return run_baseline_method(problem, w0, cfg, spec, set, grid, trial_seed);
}

long long min_step_cost(const std::string& method, int n, int k) {
  if (method == "sgd") return 1;
  if (method == "dc-sgd" || method == "rv-sgd" || method == "rv-sgdave" || method == "rv-sgd-cv" ||
      method == "rv-sgdave-cv") {
    return k;
  }
  if (method == "rgd-lec") return (n + k - 1) / k;
  return n;  // full-batch methods
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m = {"erm-gd", "sgd",       "rgd-mom",   "rgd-m",
                                             "rgd-lec", "dc-sgd",   "rv-sgd",    "rv-sgdave",
                                             "rv-sgd-cv", "rv-sgdave-cv"};
  return m;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.experiment_id.empty()) throw std::invalid_argument("config error: experiment must be non-empty");
  if (cfg.d < 1) throw std::invalid_argument("config error: d must be >= 1");
  if (cfg.n < 1) throw std::invalid_argument("config error: n must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("config error: trials must be >= 1");
  if (cfg.k < 1) throw std::invalid_argument("config error: k must be >= 1");
  if (cfg.k > cfg.n) throw std::invalid_argument("config error: k must not exceed n");
  if (!(cfg.noise.b > 0.0)) throw std::invalid_argument("config error: noise.b must be positive");
  if (!(cfg.init_scale > 0.0)) throw std::invalid_argument("config error: init.scale must be positive");
  if (cfg.checkpoints_per_decade < 1) {
    throw std::invalid_argument("config error: checkpoints_per_decade must be >= 1");
  }
  if (!(cfg.validator.delta > 0.0 && cfg.validator.delta < 1.0)) {
    throw std::invalid_argument("config error: validator.delta must lie in (0,1)");
  }
  if (cfg.merge.tol <= 0.0 || cfg.merge.max_iter < 1) {
    throw std::invalid_argument("config error: merge.tol/max_iter must be positive");
  }
  if (cfg.merge.beta && !(*cfg.merge.beta > 0.0 && *cfg.merge.beta < 0.5)) {
    throw std::invalid_argument("config error: merge.beta must lie in (0,1/2)");
  }
  if (cfg.methods.empty()) throw std::invalid_argument("config error: methods must be non-empty");
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    const MethodSpec& m = cfg.methods[i];
    const std::string at = "methods[" + std::to_string(i) + "]";
    if (std::find(known_methods().begin(), known_methods().end(), m.name) == known_methods().end()) {
      throw std::invalid_argument("config error: " + at + ".name unknown: " + m.name);
    }
    if (!(m.alpha > 0.0)) throw std::invalid_argument("config error: " + at + ".alpha must be positive");
    if (m.budget < min_step_cost(m.name, cfg.n, cfg.k)) {
      throw std::invalid_argument("config error: " + at + ".budget below one step of " + m.name);
    }
  }
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, int workers) {
  validate_config(cfg);
  if (workers < 1) workers = 1;

  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.trials));
  const std::uint64_t exp_seed = mix_seed(cfg.master_seed, hash_string(cfg.experiment_id));

  auto run_trial = [&](int trial) {
    const std::uint64_t trial_seed = mix_seed(exp_seed, static_cast<std::uint64_t>(trial));
    const QuadraticProblem problem =
        make_problem(cfg.d, cfg.n, cfg.curvature, cfg.noise,
                     mix_seed(trial_seed, hash_string("problem")));
    Rng init_rng(mix_seed(trial_seed, hash_string("init")));
    const double span = cfg.init_mode == InitMode::ScaledBySqrtD
                            ? cfg.init_scale / std::sqrt(static_cast<double>(cfg.d))
                            : cfg.init_scale;
    ParamVec w0(problem.dim());
    for (std::size_t j = 0; j < w0.size(); ++j) {
      w0[j] = problem.w_star()[j] + init_rng.uniform(-span, span);
    }
    const FeasibleSet set = default_feasible_set(problem.dim());

    std::vector<TrialRecord>& rows = per_trial[static_cast<std::size_t>(trial)];
    for (const MethodSpec& spec : cfg.methods) {
      const std::vector<long long> grid = checkpoint_grid(spec.budget, cfg.checkpoints_per_decade);
      try {
        const std::vector<TimedPoint> pts =
            run_method(problem, w0, cfg, spec, set, grid, trial_seed);
        for (const TimedPoint& p : pts) {
          rows.push_back({cfg.experiment_id, spec.name, trial, p.cost,
                          problem.excess_risk(p.w), p.elapsed_s});
        }
      } catch (const std::exception&) {
        rows.push_back({cfg.experiment_id, spec.name, trial, 0,
                        std::numeric_limits<double>::quiet_NaN(), 0.0});
      }
    }
  };

  if (workers == 1 || cfg.trials == 1) {
    for (int t = 0; t < cfg.trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= cfg.trials) return;
        run_trial(t);
      }
    };
    std::vector<std::thread> pool;
    const int count = std::min(workers, cfg.trials);
    pool.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  std::vector<TrialRecord> records;
  for (const auto& rows : per_trial) records.insert(records.end(), rows.begin(), rows.end());
  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.trial != b.trial) return a.trial < b.trial;
    return a.cost < b.cost;
  });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::map<std::tuple<std::string, std::string, long long>,
           std::pair<std::vector<double>, std::vector<double>>>
      groups;  // (excess values, elapsed values)
  std::map<std::tuple<std::string, std::string, long long>, int> failures;
  for (const TrialRecord& r : records) {
    const auto key = std::make_tuple(r.experiment_id, r.method, r.cost);
    if (std::isnan(r.excess_risk)) {
      ++failures[key];
      groups[key];
      continue;
    }
    auto& [xs, ts] = groups[key];
    xs.push_back(r.excess_risk);
    ts.push_back(r.elapsed_s);
  }
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& [key, data] : groups) {
    auto& [xs, ts] = data;
    // Sorted accumulation keeps the statistics bit-identical under record
    // reordering.
    std::sort(xs.begin(), xs.end());
    std::sort(ts.begin(), ts.end());
    SummaryRow row;
    row.experiment_id = std::get<0>(key);
    row.method = std::get<1>(key);
    row.cost = std::get<2>(key);
    row.count = static_cast<int>(xs.size());
    auto fit = failures.find(key);
    row.failures = fit == failures.end() ? 0 : fit->second;
    if (!xs.empty()) {
      row.mean = empirical_mean(xs);
      if (xs.size() > 1) {
        row.sd = std::sqrt(sample_variance(xs));
      } else {
        row.sd = 0.0;
        row.sd_degenerate = true;
      }
      row.median = scalar_median(xs);
      row.q1 = quantile(xs, 0.25);
      row.q3 = quantile(xs, 0.75);
      row.med_elapsed_s = scalar_median(ts);
    } else {
      row.mean = row.sd = row.median = row.q1 = row.q3 = row.med_elapsed_s =
          std::numeric_limits<double>::quiet_NaN();
      row.sd_degenerate = true;
    }
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

struct DeskCaps {
  int max_trials = 25;
  int max_d = 128;
};

MethodSpec batch_method(const std::string& name, int d, long long budget) {
  return {name, 0.1 / std::sqrt(static_cast<double>(d)), budget};
}

MethodSpec seq_method(const std::string& name, int d, long long budget) {
  return {name, 0.01 / std::sqrt(static_cast<double>(d)), budget};
}

long long trajectory_budget(int n, int d, double factor = 40.0) {
  return std::llround(factor * static_cast<double>(n) * std::sqrt(static_cast<double>(d)));
}

}  // namespace

std::vector<std::string> preset_ids() {
  return {"sc-e1", "sc-e2", "sc-e3", "sc-e4", "sc-e5", "nc-e1", "nc-e2", "nc-e3", "nc-e4"};
}

std::string preset_description(const std::string& id) {
  if (id == "sc-e1") return "error trajectories, low dimension, strongly convex";
  if (id == "sc-e2") return "statistical error vs dimension, batch 100n vs dc-sgd 2n";
  if (id == "sc-e3") return "computation-time comparison (n = 4000 d)";
  if (id == "sc-e4") return "impact of initialization error on trajectories";
  if (id == "sc-e5") return "impact of noise level on trajectories";
  if (id == "nc-e1") return "robust validation of stochastic baselines";
  if (id == "nc-e2") return "weakly convex high-dimension comparison, rv-sgdave 2n";
  if (id == "nc-e3") return "computation-time comparison, weakly convex";
  if (id == "nc-e4") return "robust validation vs cross-validation heuristic";
  throw std::invalid_argument("unknown preset: " + id);
}

ExperimentConfig preset(const std::string& id, const std::string& scale) {
  const bool paper = scale == "paper";
  if (!paper && scale != "desk") {
    throw std::invalid_argument("unknown scale: " + scale + " (use desk or paper)");
  }
  const DeskCaps caps;
  auto cap_trials = [&](int t) { return paper ? t : std::min(t, caps.max_trials); };
  auto cap_d = [&](int d, int limit) { return paper ? d : std::min(d, limit); };

  ExperimentConfig cfg;
  cfg.experiment_id = id;
  cfg.validator = Validator{ValidatorKind::Catoni, 0.05, std::nullopt, std::nullopt};
  cfg.merge = MergeRule{};

  if (id == "sc-e1" || id == "sc-e4" || id == "sc-e5") {
    cfg.d = 2;
    cfg.n = 500;
    cfg.trials = cap_trials(100);
    const long long budget = trajectory_budget(cfg.n, cfg.d);
    if (id == "sc-e4") {
      cfg.init_scale = 10.0;
      cfg.methods = {batch_method("erm-gd", cfg.d, budget), batch_method("rgd-m", cfg.d, budget),
                     seq_method("sgd", cfg.d, budget), seq_method("dc-sgd", cfg.d, budget)};
    } else if (id == "sc-e5") {
      cfg.noise = NoiseModel{NoiseFamily::LogNormal, 1.90};
      cfg.methods = {batch_method("erm-gd", cfg.d, budget), batch_method("rgd-m", cfg.d, budget),
                     seq_method("sgd", cfg.d, budget), seq_method("dc-sgd", cfg.d, budget)};
    } else {
      cfg.methods = {batch_method("erm-gd", cfg.d, budget), batch_method("rgd-mom", cfg.d, budget),
                     batch_method("rgd-m", cfg.d, budget), batch_method("rgd-lec", cfg.d, budget),
                     seq_method("sgd", cfg.d, budget), seq_method("dc-sgd", cfg.d, budget)};
    }
    return cfg;
  }
  if (id == "sc-e2") {
    cfg.d = cap_d(1024, caps.max_d);
    cfg.n = 2500;
    cfg.trials = cap_trials(250);
    cfg.init_mode = InitMode::ScaledBySqrtD;
    const long long batch_budget = 100LL * cfg.n;
    cfg.methods = {batch_method("erm-gd", cfg.d, batch_budget),
                   batch_method("rgd-mom", cfg.d, batch_budget),
                   batch_method("rgd-m", cfg.d, batch_budget),
                   batch_method("rgd-lec", cfg.d, batch_budget),
                   seq_method("dc-sgd", cfg.d, 2LL * cfg.n)};
    return cfg;
  }
  if (id == "sc-e3" || id == "nc-e3") {
    cfg.d = cap_d(64, 8);
    cfg.n = 4000 * cfg.d;
    cfg.trials = cap_trials(250);
    cfg.curvature = id == "nc-e3" ? Curvature::HalfFlat : Curvature::Identity;
    cfg.init_mode = InitMode::ScaledBySqrtD;
    const long long batch_budget = 100LL * cfg.n;
    cfg.methods = {batch_method("erm-gd", cfg.d, batch_budget),
                   batch_method("rgd-mom", cfg.d, batch_budget),
                   batch_method("rgd-m", cfg.d, batch_budget),
                   batch_method("rgd-lec", cfg.d, batch_budget)};
    cfg.methods.push_back(seq_method(id == "nc-e3" ? "rv-sgdave" : "dc-sgd", cfg.d, 2LL * cfg.n));
    return cfg;
  }
  if (id == "nc-e1") {
    cfg.d = 2;
    cfg.n = 500;
    cfg.trials = cap_trials(100);
    const long long budget = trajectory_budget(cfg.n, cfg.d);
    cfg.methods = {seq_method("sgd", cfg.d, budget), seq_method("rv-sgd", cfg.d, budget),
                   seq_method("rv-sgdave", cfg.d, budget)};
    return cfg;
  }
  if (id == "nc-e2") {
    cfg.d = cap_d(1024, caps.max_d);
    cfg.n = 2500;
    cfg.trials = cap_trials(250);
    cfg.curvature = Curvature::HalfFlat;
    cfg.init_mode = InitMode::ScaledBySqrtD;
    const long long batch_budget = 100LL * cfg.n;
    cfg.methods = {batch_method("erm-gd", cfg.d, batch_budget),
                   batch_method("rgd-mom", cfg.d, batch_budget),
                   batch_method("rgd-m", cfg.d, batch_budget),
                   batch_method("rgd-lec", cfg.d, batch_budget),
                   seq_method("rv-sgdave", cfg.d, 2LL * cfg.n)};
    return cfg;
  }
  if (id == "nc-e4") {
    cfg.d = 2;
    cfg.n = 500;
    cfg.trials = cap_trials(100);
    const long long budget = trajectory_budget(cfg.n, cfg.d);
    cfg.methods = {seq_method("rv-sgd", cfg.d, budget), seq_method("rv-sgdave", cfg.d, budget),
                   seq_method("rv-sgd-cv", cfg.d, budget), seq_method("rv-sgdave-cv", cfg.d, budget)};
    return cfg;
  }
  throw std::invalid_argument("unknown preset: " + id);
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

using nlohmann::json;

std::string curvature_name(Curvature c) {
  return c == Curvature::Identity ? "identity" : "half-flat";
}
Curvature curvature_from(const std::string& s) {
  if (s == "identity") return Curvature::Identity;
  if (s == "half-flat") return Curvature::HalfFlat;
  throw std::invalid_argument("config error: curvature must be identity or half-flat");
}

std::string family_name(NoiseFamily f) {
  return f == NoiseFamily::Normal ? "normal" : "log-normal";
}
NoiseFamily family_from(const std::string& s) {
  if (s == "normal") return NoiseFamily::Normal;
  if (s == "log-normal") return NoiseFamily::LogNormal;
  throw std::invalid_argument("config error: noise.family must be normal or log-normal");
}

std::string merge_name(MergeKind k) {
  switch (k) {
    case MergeKind::GeoMed: return "geomed";
    case MergeKind::SmBall: return "smball";
    case MergeKind::CoordMedian: return "median";
  }
  return "geomed";
}
MergeKind merge_from(const std::string& s) {
  if (s == "geomed") return MergeKind::GeoMed;
  if (s == "smball") return MergeKind::SmBall;
  if (s == "median") return MergeKind::CoordMedian;
  throw std::invalid_argument("config error: merge.rule must be geomed, smball or median");
}

std::string validator_name(ValidatorKind k) {
  switch (k) {
    case ValidatorKind::MoM: return "mom";
    case ValidatorKind::Catoni: return "catoni";
    case ValidatorKind::Truncated: return "trunc";
    case ValidatorKind::EmpiricalMean: return "mean";
  }
  return "catoni";
}
ValidatorKind validator_from(const std::string& s) {
  if (s == "mom") return ValidatorKind::MoM;
  if (s == "catoni") return ValidatorKind::Catoni;
  if (s == "trunc") return ValidatorKind::Truncated;
  if (s == "mean") return ValidatorKind::EmpiricalMean;
  throw std::invalid_argument("config error: validator.kind must be mom, catoni, trunc or mean");
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config error: invalid JSON: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    cfg.experiment_id = j.at("experiment").get<std::string>();
    cfg.d = j.at("d").get<int>();
    cfg.n = j.at("n").get<int>();
    cfg.trials = j.at("trials").get<int>();
    cfg.k = j.value("k", 10);
    cfg.curvature = curvature_from(j.value("curvature", "identity"));
    if (j.contains("noise")) {
      cfg.noise.family = family_from(j["noise"].value("family", "log-normal"));
      cfg.noise.b = j["noise"].value("b", 1.75);
    }
    if (j.contains("init")) {
      cfg.init_scale = j["init"].value("scale", 5.0);
      const std::string mode = j["init"].value("mode", "raw");
      if (mode == "raw") {
        cfg.init_mode = InitMode::Raw;
      } else if (mode == "sqrt-d") {
        cfg.init_mode = InitMode::ScaledBySqrtD;
      } else {
        throw std::invalid_argument("config error: init.mode must be raw or sqrt-d");
      }
    }
    cfg.master_seed = j.value("seed", std::uint64_t{1});
    cfg.shuffle = j.value("shuffle", false);
    if (j.contains("merge")) {
      cfg.merge.kind = merge_from(j["merge"].value("rule", "geomed"));
      if (j["merge"].contains("beta")) cfg.merge.beta = j["merge"]["beta"].get<double>();
      cfg.merge.tol = j["merge"].value("tol", 1e-10);
      cfg.merge.max_iter = j["merge"].value("max_iter", 1000);
    }
    if (j.contains("validator")) {
      cfg.validator.kind = validator_from(j["validator"].value("kind", "catoni"));
      cfg.validator.delta = j["validator"].value("delta", 0.05);
      if (j["validator"].contains("k_blocks")) {
        cfg.validator.k_blocks = j["validator"]["k_blocks"].get<int>();
      }
      if (j["validator"].contains("sigma_hint")) {
        cfg.validator.sigma_hint = j["validator"]["sigma_hint"].get<double>();
      }
    }
    cfg.checkpoints_per_decade = j.value("checkpoints_per_decade", 20);
    if (!j.contains("methods") || !j["methods"].is_array() || j["methods"].empty()) {
      throw std::invalid_argument("config error: methods must be a non-empty array");
    }
    for (const auto& jm : j["methods"]) {
      MethodSpec m;
      m.name = jm.at("name").get<std::string>();
      m.alpha = jm.at("alpha").get<double>();
      m.budget = jm.at("budget").get<long long>();
      cfg.methods.push_back(std::move(m));
    }
    validate_config(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment_id;
  j["d"] = cfg.d;
  j["n"] = cfg.n;
  j["trials"] = cfg.trials;
  j["k"] = cfg.k;
  j["curvature"] = curvature_name(cfg.curvature);
  j["noise"] = {{"family", family_name(cfg.noise.family)}, {"b", cfg.noise.b}};
  j["init"] = {{"scale", cfg.init_scale},
               {"mode", cfg.init_mode == InitMode::Raw ? "raw" : "sqrt-d"}};
  j["seed"] = cfg.master_seed;
  j["shuffle"] = cfg.shuffle;
  json jm = {{"rule", merge_name(cfg.merge.kind)}, {"tol", cfg.merge.tol},
             {"max_iter", cfg.merge.max_iter}};
  if (cfg.merge.beta) jm["beta"] = *cfg.merge.beta;
  j["merge"] = jm;
  json jv = {{"kind", validator_name(cfg.validator.kind)}, {"delta", cfg.validator.delta}};
  if (cfg.validator.k_blocks) jv["k_blocks"] = *cfg.validator.k_blocks;
  if (cfg.validator.sigma_hint) jv["sigma_hint"] = *cfg.validator.sigma_hint;
  j["validator"] = jv;
  j["checkpoints_per_decade"] = cfg.checkpoints_per_decade;
  j["methods"] = json::array();
  for (const MethodSpec& m : cfg.methods) {
    j["methods"].push_back({{"name", m.name}, {"alpha", m.alpha}, {"budget", m.budget}});
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "experiment,method,trial,cost,excess_risk,elapsed_s\n";
  for (const TrialRecord& r : records) {
    os << r.experiment_id << ',' << r.method << ',' << r.trial << ',' << r.cost << ','
       << fmt_double(r.excess_risk) << ',' << fmt_double(r.elapsed_s) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "experiment,method,cost,mean,sd,median,q1,q3,med_elapsed_s\n";
  for (const SummaryRow& r : rows) {
    os << r.experiment_id << ',' << r.method << ',' << r.cost << ',' << fmt_double(r.mean) << ','
       << fmt_double(r.sd) << ',' << fmt_double(r.median) << ',' << fmt_double(r.q1) << ','
       << fmt_double(r.q3) << ',' << fmt_double(r.med_elapsed_s) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("summary csv: empty file");
  const std::vector<std::string> header = split_csv_line(line);
  const std::vector<std::string> expected = {"experiment", "method", "cost",      "mean", "sd",
                                             "median",     "q1",     "q3", "med_elapsed_s"};
  if (header != expected) {
    throw std::invalid_argument("summary csv: missing or misordered columns");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != expected.size()) throw std::invalid_argument("summary csv: malformed row");
    SummaryRow r;
    r.experiment_id = f[0];
    r.method = f[1];
    r.cost = std::stoll(f[2]);
    r.mean = std::stod(f[3]);
    r.sd = std::stod(f[4]);
    r.median = std::stod(f[5]);
    r.q1 = std::stod(f[6]);
    r.q3 = std::stod(f[7]);
    r.med_elapsed_s = std::stod(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dcsgd
