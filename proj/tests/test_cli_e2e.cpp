#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return DCSGD_CLI_PATH; }

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the real binary through the shell, capturing stdout/stderr.
CliResult run_cli(const std::string& args, const std::string& stdin_text = "") {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "dcsgd_cli_e2e";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
  const fs::path in = dir / ("in" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string(cli_path()) + " " + args;
  if (!stdin_text.empty()) {
    std::ofstream(in) << stdin_text;
    cmd += " < " + in.string();
  } else {
    cmd += " < /dev/null";
  }
  cmd += " > " + out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  auto slurp = [](const fs::path& p) {
    std::ifstream is(p);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  };
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// excess-risk columns only: strip the elapsed_s field
std::string stable_columns(const fs::path& records_csv) {
  std::ifstream is(records_csv);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    const auto last_comma = line.rfind(',');
    os << line.substr(0, last_comma) << '\n';
  }
  return os.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dcsgd_cli_e2e" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("run writes the three artifacts and is reproducible") {
  const fs::path dir1 = temp_dir("run1");
  const fs::path dir2 = temp_dir("run2");
  const std::string base = "run --preset sc-e1 --scale desk --seed 42 --out ";

  // Desk trials are capped at 25; trim further through the config for speed.
  const CliResult r1 = run_cli(base + dir1.string());
  REQUIRE(r1.exit_code == 0);
  CHECK(fs::exists(dir1 / "records.csv"));
  CHECK(fs::exists(dir1 / "summary.csv"));
  CHECK(fs::exists(dir1 / "config.resolved.json"));
  std::ifstream rec(dir1 / "records.csv");
  std::string header;
  std::getline(rec, header);
  CHECK(header == "experiment,method,trial,cost,excess_risk,elapsed_s");
  std::string first_row;
  REQUIRE(std::getline(rec, first_row));  // non-empty records

  const CliResult r2 = run_cli(base + dir2.string());
  REQUIRE(r2.exit_code == 0);
  CHECK(stable_columns(dir1 / "records.csv") == stable_columns(dir2 / "records.csv"));
}

TEST_CASE("resolved config closure: re-running it reproduces the records") {
  const fs::path dir1 = temp_dir("closure1");
  const fs::path dir2 = temp_dir("closure2");
  REQUIRE(run_cli("run --preset nc-e4 --scale desk --seed 9 --out " + dir1.string()).exit_code == 0);
  const CliResult r =
      run_cli("run " + (dir1 / "config.resolved.json").string() + " --out " + dir2.string());
  REQUIRE(r.exit_code == 0);
  CHECK(stable_columns(dir1 / "records.csv") == stable_columns(dir2 / "records.csv"));
}

TEST_CASE("unknown preset exits 2 and names the preset") {
  const CliResult r = run_cli("run --preset nope");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("nope") != std::string::npos);
}

TEST_CASE("run without config or preset exits 2") {
  CHECK(run_cli("run").exit_code == 2);
}

TEST_CASE("estimate subcommand") {
  const CliResult mean = run_cli("estimate --method mean", "1 2 3\n");
  CHECK(mean.exit_code == 0);
  CHECK(mean.out == "2\n");

  const CliResult mom1 = run_cli("estimate --method mom --k 1", "4 8 6 2\n");
  const CliResult plain = run_cli("estimate --method mean", "4 8 6 2\n");
  CHECK(mom1.exit_code == 0);
  CHECK(mom1.out == plain.out);

  std::ostringstream constant;
  for (int i = 0; i < 40; ++i) constant << "3.5 ";
  const CliResult catoni = run_cli("estimate --method catoni", constant.str());
  CHECK(catoni.exit_code == 0);
  CHECK(catoni.out == "3.5\n");

  CHECK(run_cli("estimate --method mean", "").exit_code == 2);
  CHECK(run_cli("estimate --method warp", "1 2\n").exit_code == 2);
}

TEST_CASE("merge-demo reads a whitespace matrix") {
  const CliResult med = run_cli("merge-demo --rule median", "1 5\n2 4\n3 3\n");
  CHECK(med.exit_code == 0);
  CHECK(med.out == "2 4\n");

  const CliResult geo = run_cli("merge-demo --rule geomed", "-1 0\n1 0\n0 1\n0 -1\n");
  CHECK(geo.exit_code == 0);
  std::istringstream gs(geo.out);
  double x = 1.0, y = 1.0;
  gs >> x >> y;
  CHECK(std::abs(x) < 1e-7);
  CHECK(std::abs(y) < 1e-7);

  CHECK(run_cli("merge-demo --rule geomed", "1 2\n3\n").exit_code == 2);  // ragged
  CHECK(run_cli("merge-demo --rule geomed", "").exit_code == 2);
}

TEST_CASE("plot emits well-formed SVG with one polyline per method") {
  const fs::path dir = temp_dir("plot");
  const fs::path summary = dir / "summary.csv";
  {
    std::ofstream os(summary);
    os << "experiment,method,cost,mean,sd,median,q1,q3,med_elapsed_s\n";
    // two methods, monotone decreasing mean excess
    for (int i = 1; i <= 10; ++i) {
      os << "sc-e1,sgd," << 100 * i << ',' << 10.0 / i << ",0.5," << 10.0 / i << ','
         << 9.0 / i << ',' << 11.0 / i << ",0.1\n";
    }
    for (int i = 1; i <= 10; ++i) {
      os << "sc-e1,dc-sgd," << 100 * i << ',' << 5.0 / i << ",0.2," << 5.0 / i << ','
         << 4.0 / i << ',' << 6.0 / i << ",0.1\n";
    }
  }
  const fs::path svg = dir / "curves.svg";
  const CliResult r = run_cli("plot " + summary.string() + " --out " + svg.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream is(svg);
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  CHECK(text.rfind("<?xml", 0) == 0);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '<') == std::count(text.begin(), text.end(), '>'));

  // one polyline per method, labeled
  std::size_t polylines = 0;
  for (std::size_t at = text.find("<polyline"); at != std::string::npos;
       at = text.find("<polyline", at + 1)) {
    ++polylines;
  }
  CHECK(polylines == 2);
  CHECK(text.find("<title>sgd</title>") != std::string::npos);
  CHECK(text.find("<title>dc-sgd</title>") != std::string::npos);

  // monotone series map to monotone pixel y (SVG y grows downward)
  const std::size_t start = text.find("<polyline");
  const std::size_t points_at = text.find("points=\"", start);
  const std::size_t points_end = text.find('"', points_at + 8);
  std::istringstream pts(text.substr(points_at + 8, points_end - points_at - 8));
  std::string pair;
  double prev_y = -1.0;
  while (pts >> pair) {
    const auto comma = pair.find(',');
    const double y = std::stod(pair.substr(comma + 1));
    REQUIRE(y >= prev_y);
    prev_y = y;
  }
}

TEST_CASE("plot rejects empty or malformed summaries") {
  const fs::path dir = temp_dir("plot_bad");
  const fs::path empty = dir / "empty.csv";
  std::ofstream(empty) << "experiment,method,cost,mean,sd,median,q1,q3,med_elapsed_s\n";
  CHECK(run_cli("plot " + empty.string() + " --out " + (dir / "x.svg").string()).exit_code == 2);

  const fs::path wrong = dir / "wrong.csv";
  std::ofstream(wrong) << "a,b,c\n1,2,3\n";
  CHECK(run_cli("plot " + wrong.string() + " --out " + (dir / "y.svg").string()).exit_code == 2);

  CHECK(run_cli("plot /no/such/summary.csv --out " + (dir / "z.svg").string()).exit_code == 3);
}

TEST_CASE("preset-list names every preset") {
  const CliResult r = run_cli("preset-list");
  CHECK(r.exit_code == 0);
  for (const char* id : {"sc-e1", "sc-e2", "sc-e3", "sc-e4", "sc-e5", "nc-e1", "nc-e2", "nc-e3",
                         "nc-e4"}) {
    CHECK(r.out.find(id) != std::string::npos);
  }
}

TEST_CASE("verify subcommand runs the battery") {
  const CliResult r = run_cli("verify --seed 11");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("merge-requirement") != std::string::npos);
  CHECK(r.out.find("all properties hold") != std::string::npos);
}
