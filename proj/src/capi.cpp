#include "dcsgd.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <span>
#include <sstream>
#include <string>

#include "dcsgd/harness.hpp"
#include "dcsgd/merge.hpp"
#include "dcsgd/robust_scalar.hpp"
#include "dcsgd/svg_plot.hpp"
#include "dcsgd/theory.hpp"

struct dcsgd_config {
  dcsgd::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

dcsgd_status fail(dcsgd_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
dcsgd_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(DCSGD_EINVAL, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(DCSGD_EIO, e.what());
  } catch (const std::exception& e) {
    return fail(DCSGD_EFAIL, e.what());
  } catch (...) {
    return fail(DCSGD_EFAIL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* dcsgd_version(void) { return "0.1.0"; }

const char* dcsgd_last_error(void) { return g_last_error.c_str(); }

void dcsgd_string_free(char* s) { delete[] s; }

dcsgd_status dcsgd_config_from_json(const char* json_text, dcsgd_config** out) {
  if (!json_text || !out) return fail(DCSGD_EINVAL, "null argument");
  return guarded([&]() {
    auto cfg = dcsgd::config_from_json(json_text);
    *out = new dcsgd_config{std::move(cfg)};
    return DCSGD_OK;
  });
}

dcsgd_status dcsgd_config_from_preset(const char* id, const char* scale, dcsgd_config** out) {
  if (!id || !out) return fail(DCSGD_EINVAL, "null argument");
  return guarded([&]() {
    auto cfg = dcsgd::preset(id, scale ? scale : "desk");
    *out = new dcsgd_config{std::move(cfg)};
    return DCSGD_OK;
  });
}

dcsgd_status dcsgd_config_set_seed(dcsgd_config* cfg, uint64_t seed) {
  if (!cfg) return fail(DCSGD_EINVAL, "null config");
  cfg->cfg.master_seed = seed;
  return DCSGD_OK;
}

dcsgd_status dcsgd_config_to_json(const dcsgd_config* cfg, char** out_json) {
  if (!cfg || !out_json) return fail(DCSGD_EINVAL, "null argument");
  return guarded([&]() {
    *out_json = dup_string(dcsgd::config_to_json(cfg->cfg));
    return *out_json ? DCSGD_OK : fail(DCSGD_EFAIL, "allocation failure");
  });
}

void dcsgd_config_free(dcsgd_config* cfg) { delete cfg; }

dcsgd_status dcsgd_preset_list(char** out_text) {
  if (!out_text) return fail(DCSGD_EINVAL, "null argument");
  return guarded([&]() {
    std::ostringstream os;
    for (const std::string& id : dcsgd::preset_ids()) {
      os << id << ": " << dcsgd::preset_description(id) << '\n';
    }
    *out_text = dup_string(os.str());
    return *out_text ? DCSGD_OK : fail(DCSGD_EFAIL, "allocation failure");
  });
}

dcsgd_status dcsgd_run(const dcsgd_config* cfg, const char* out_dir, int workers) {
  if (!cfg || !out_dir) return fail(DCSGD_EINVAL, "null argument");
  return guarded([&]() {
    dcsgd::validate_config(cfg->cfg);
    const auto records = dcsgd::run_experiment(cfg->cfg, workers);
    const auto summary = dcsgd::summarize(records);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(out_dir), ec);
    if (ec) return fail(DCSGD_EIO, "cannot create output directory: " + std::string(out_dir));

    auto write_file = [&](const char* name, auto&& writer) -> dcsgd_status {
      const fs::path path = fs::path(out_dir) / name;
      std::ofstream os(path);
      if (!os) return fail(DCSGD_EIO, "cannot open for writing: " + path.string());
      writer(os);
      os.flush();
      if (!os) return fail(DCSGD_EIO, "write failure: " + path.string());
      return DCSGD_OK;
    };
    dcsgd_status rc = write_file("records.csv", [&](std::ostream& os) {
      dcsgd::write_records_csv(os, records);
    });
    if (rc != DCSGD_OK) return rc;
    rc = write_file("summary.csv", [&](std::ostream& os) { dcsgd::write_summary_csv(os, summary); });
    if (rc != DCSGD_OK) return rc;
    rc = write_file("config.resolved.json",
                    [&](std::ostream& os) { os << dcsgd::config_to_json(cfg->cfg); });
    if (rc != DCSGD_OK) return rc;

    int failed_rows = 0;
    for (const auto& row : summary) failed_rows += row.failures;
    if (failed_rows > 0) {
      std::cerr << "warning: " << failed_rows << " (method, trial) failure rows recorded\n";
    }
    return DCSGD_OK;
  });
}

dcsgd_status dcsgd_estimate(const char* method, const double* xs, size_t n, double delta,
                            int k_blocks, double sigma, double* out) {
  if (!method || !xs || !out || n == 0) return fail(DCSGD_EINVAL, "null or empty input");
  return guarded([&]() {
    const std::string m = method;
    dcsgd::Validator v;
    v.delta = delta;
    if (m == "mean") {
      v.kind = dcsgd::ValidatorKind::EmpiricalMean;
    } else if (m == "mom") {
      v.kind = dcsgd::ValidatorKind::MoM;
      if (k_blocks > 0) v.k_blocks = k_blocks;
    } else if (m == "catoni") {
      v.kind = dcsgd::ValidatorKind::Catoni;
      if (sigma > 0.0) v.sigma_hint = sigma * sigma;
    } else if (m == "trunc") {
      v.kind = dcsgd::ValidatorKind::Truncated;
    } else {
      return fail(DCSGD_EINVAL, "unknown estimator: " + m);
    }
    *out = dcsgd::validate(v, std::span<const double>(xs, n));
    return DCSGD_OK;
  });
}

dcsgd_status dcsgd_merge(const char* rule, const double* cands, size_t k, size_t d, double beta,
                         double* out) {
  if (!rule || !cands || !out || k == 0 || d == 0) return fail(DCSGD_EINVAL, "null or empty input");
  return guarded([&]() {
    dcsgd::MergeRule r;
    const std::string name = rule;
    if (name == "geomed") {
      r.kind = dcsgd::MergeKind::GeoMed;
    } else if (name == "smball") {
      r.kind = dcsgd::MergeKind::SmBall;
    } else if (name == "median") {
      r.kind = dcsgd::MergeKind::CoordMedian;
    } else {
      return fail(DCSGD_EINVAL, "unknown merge rule: " + name);
    }
    if (beta > 0.0) r.beta = beta;
    dcsgd::CandidateSet set;
    set.reserve(k);
    for (size_t j = 0; j < k; ++j) {
      set.emplace_back(cands + j * d, cands + (j + 1) * d);
    }
    const dcsgd::ParamVec merged = dcsgd::merge(r, set);
    std::memcpy(out, merged.data(), d * sizeof(double));
    return DCSGD_OK;
  });
}

dcsgd_status dcsgd_plot(const char* summary_csv_path, const char* metric,
                        const char* out_svg_path) {
  if (!summary_csv_path || !out_svg_path) return fail(DCSGD_EINVAL, "null argument");
  return guarded([&]() {
    std::ifstream is(summary_csv_path);
    if (!is) return fail(DCSGD_EIO, "cannot open summary: " + std::string(summary_csv_path));
    const auto rows = dcsgd::read_summary_csv(is);
    const std::string svg = dcsgd::render_summary_svg(rows, metric ? metric : "excess_risk");
    std::ofstream os(out_svg_path);
    if (!os) return fail(DCSGD_EIO, "cannot open for writing: " + std::string(out_svg_path));
    os << svg;
    os.flush();
    if (!os) return fail(DCSGD_EIO, "write failure: " + std::string(out_svg_path));
    return DCSGD_OK;
  });
}

dcsgd_status dcsgd_verify(uint64_t seed, int verbose, int* failures) {
  return guarded([&]() {
    const int f = dcsgd::run_verification_battery(seed, verbose ? &std::cout : nullptr);
    if (failures) *failures = f;
    return DCSGD_OK;
  });
}

}  // extern "C"
