// Command-line front end for the dcsgd shared library. Every subcommand is a
// thin wrapper over the C API in dcsgd.h; exit codes are 0 on success, 2 on
// validation/parse failures, 3 on I/O failures.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcsgd.h"

namespace {

int status_to_exit(dcsgd_status rc) {
  switch (rc) {
    case DCSGD_OK:
      return 0;
    case DCSGD_EINVAL:
      return 2;
    case DCSGD_EIO:
      return 3;
    case DCSGD_EFAIL:
      return 3;
  }
  return 3;
}

int report_failure(dcsgd_status rc) {
  std::cerr << "error: " << dcsgd_last_error() << '\n';
  return status_to_exit(rc);
}

std::vector<double> read_numbers(std::istream& is) {
  std::vector<double> xs;
  double v = 0.0;
  while (is >> v) xs.push_back(v);
  return xs;
}

std::string read_all(std::istream& is) {
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

struct RunOptions {
  std::string config_path;
  std::string preset;
  std::string scale = "desk";
  std::string out_dir = "out";
  int workers = 1;
  std::int64_t seed = -1;
};

int cmd_run(const RunOptions& opt) {
  dcsgd_config* cfg = nullptr;
  dcsgd_status rc = DCSGD_OK;
  if (!opt.preset.empty()) {
    rc = dcsgd_config_from_preset(opt.preset.c_str(), opt.scale.c_str(), &cfg);
  } else if (!opt.config_path.empty()) {
    std::ifstream is(opt.config_path);
    if (!is) {
      std::cerr << "error: cannot open config: " << opt.config_path << '\n';
      return 3;
    }
    const std::string text = read_all(is);
    rc = dcsgd_config_from_json(text.c_str(), &cfg);
  } else {
    std::cerr << "error: pass a config file or --preset\n";
    return 2;
  }
  if (rc != DCSGD_OK) return report_failure(rc);
  if (opt.seed >= 0) dcsgd_config_set_seed(cfg, static_cast<std::uint64_t>(opt.seed));
  rc = dcsgd_run(cfg, opt.out_dir.c_str(), opt.workers);
  dcsgd_config_free(cfg);
  if (rc != DCSGD_OK) return report_failure(rc);
  std::cout << "wrote " << opt.out_dir << "/records.csv, summary.csv, config.resolved.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust divide-and-conquer SGD benchmark harness"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file or preset");
  run->add_option("config", run_opt.config_path, "experiment config JSON path");
  run->add_option("--preset", run_opt.preset, "preset experiment id (see preset-list)");
  run->add_option("--scale", run_opt.scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--out", run_opt.out_dir, "output directory");
  run->add_option("--workers", run_opt.workers, "worker threads for trials")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", run_opt.seed, "master seed override");

  CLI::App* preset_list = app.add_subcommand("preset-list", "list known experiment presets");

  std::string est_method = "mean";
  double est_delta = 0.05;
  int est_k = 0;
  double est_sigma = 0.0;
  CLI::App* estimate = app.add_subcommand("estimate", "robust scalar mean of numbers on stdin");
  estimate->add_option("--method", est_method, "mean, mom, catoni or trunc")
      ->check(CLI::IsMember({"mean", "mom", "catoni", "trunc"}));
  estimate->add_option("--delta", est_delta, "confidence level in (0,1)");
  estimate->add_option("--k", est_k, "MoM block count (default ceil(log(1/delta)))");
  estimate->add_option("--sigma", est_sigma, "Catoni standard-deviation hint");

  std::string merge_rule = "geomed";
  double merge_beta = 0.0;
  CLI::App* merge_demo =
      app.add_subcommand("merge-demo", "merge a k x d whitespace matrix of candidates from stdin");
  merge_demo->add_option("--rule", merge_rule, "geomed, smball or median")
      ->check(CLI::IsMember({"geomed", "smball", "median"}));
  merge_demo->add_option("--beta", merge_beta, "smball majority margin in (0,1/2)");

  std::string plot_summary;
  std::string plot_metric = "excess_risk";
  std::string plot_out = "plot.svg";
  CLI::App* plot = app.add_subcommand("plot", "render summary.csv trajectories as SVG");
  plot->add_option("summary", plot_summary, "summary.csv path")->required();
  plot->add_option("--metric", plot_metric, "metric column (excess_risk)");
  plot->add_option("--out", plot_out, "output SVG path");

  std::uint64_t verify_seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "run the property-check battery");
  verify->add_option("--seed", verify_seed, "battery seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  if (run->parsed()) return cmd_run(run_opt);

  if (preset_list->parsed()) {
    char* text = nullptr;
    const dcsgd_status rc = dcsgd_preset_list(&text);
    if (rc != DCSGD_OK) return report_failure(rc);
    std::cout << text;
    dcsgd_string_free(text);
    return 0;
  }

  if (estimate->parsed()) {
    const std::vector<double> xs = read_numbers(std::cin);
    if (xs.empty()) {
      std::cerr << "error: no numbers on stdin\n";
      return 2;
    }
    double value = 0.0;
    const dcsgd_status rc =
        dcsgd_estimate(est_method.c_str(), xs.data(), xs.size(), est_delta, est_k, est_sigma, &value);
    if (rc != DCSGD_OK) return report_failure(rc);
    std::printf("%.12g\n", value);
    return 0;
  }

  if (merge_demo->parsed()) {
    // Whitespace-separated text matrix: one candidate per row.
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(std::cin, line)) {
      std::istringstream ls(line);
      std::vector<double> row = read_numbers(ls);
      if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) {
      std::cerr << "error: no candidate rows on stdin\n";
      return 2;
    }
    const std::size_t d = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& row : rows) {
      if (row.size() != d) {
        std::cerr << "error: ragged candidate matrix\n";
        return 2;
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
    std::vector<double> merged(d);
    const dcsgd_status rc =
        dcsgd_merge(merge_rule.c_str(), flat.data(), rows.size(), d, merge_beta, merged.data());
    if (rc != DCSGD_OK) return report_failure(rc);
    for (std::size_t j = 0; j < d; ++j) std::printf(j + 1 == d ? "%.12g\n" : "%.12g ", merged[j]);
    return 0;
  }

  if (plot->parsed()) {
    const dcsgd_status rc = dcsgd_plot(plot_summary.c_str(), plot_metric.c_str(), plot_out.c_str());
    if (rc != DCSGD_OK) return report_failure(rc);
    std::cout << "wrote " << plot_out << '\n';
    return 0;
  }

  if (verify->parsed()) {
    int failures = 0;
    const dcsgd_status rc = dcsgd_verify(verify_seed, 1, &failures);
    if (rc != DCSGD_OK) return report_failure(rc);
    if (failures > 0) {
      std::cerr << "verification failures: " << failures << '\n';
      return 1;
    }
    std::cout << "all properties hold\n";
    return 0;
  }

  return 2;
}
