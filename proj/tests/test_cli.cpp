#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef FBLRATE_CLI_PATH
#error "FBLRATE_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(FBLRATE_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

double parse_value(const std::string& output, const std::string& key) {
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find(" = ");
    if (pos == std::string::npos) continue;
    if (line.substr(0, pos) == key) return std::stod(line.substr(pos + 3));
  }
  FAIL("key not found in CLI output: " << key << "\n" << output);
  return 0.0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

// leading row values per CSV line, header skipped
std::vector<std::vector<double>> parse_csv(const std::string& body) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(body);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    if (!row.empty()) rows.push_back(row);
  }
  return rows;
}

std::string tmp_path(const std::string& name) {
  return std::string("cli_test_") + name;
}

}  // namespace

TEST_CASE("rate at the reference operating points", "[cli]") {
  auto run = run_cli("rate --snr-db 0 --m 1000 --theta 0.01 --eps 0.0061");
  REQUIRE(run.exit_code == 0);
  CHECK(parse_value(run.output, "R_E_bits_per_cu") == Catch::Approx(0.2246).margin(2e-3));
  CHECK(parse_value(run.output, "snr_linear") == Catch::Approx(1.0).epsilon(1e-12));

  auto zero = run_cli("rate --snr-db 0 --m 1000 --theta 0 --eps 0.0171");
  REQUIRE(zero.exit_code == 0);
  CHECK(parse_value(zero.output, "R_E_bits_per_cu") == Catch::Approx(0.7750).margin(2e-3));
}

TEST_CASE("rate rejects out-of-domain eps", "[cli]") {
  CHECK(run_cli("rate --snr-db 0 --m 1000 --theta 0.01 --eps 1.0").exit_code == 2);
  CHECK(run_cli("rate --snr-db 0 --m 1000 --theta 0.01 --eps -0.5").exit_code == 2);
}

TEST_CASE("rate reports the per-block rate when z is given", "[cli]") {
  auto run = run_cli("rate --snr 1 --m 1000 --theta 0.01 --eps 0.5 --z 1");
  REQUIRE(run.exit_code == 0);
  CHECK(parse_value(run.output, "block_rate_bits_per_cu") == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dB conversion round trip", "[cli]") {
  auto run = run_cli("rate --snr-db 7.3 --m 1000 --theta 0.01 --eps 0.01");
  REQUIRE(run.exit_code == 0);
  CHECK(parse_value(run.output, "snr_linear") ==
        Catch::Approx(std::pow(10.0, 0.73)).epsilon(1e-12));
  CHECK(parse_value(run.output, "snr_db") == Catch::Approx(7.3).margin(1e-12));
}

TEST_CASE("optimize matches the reference optima", "[cli]") {
  auto run = run_cli("optimize --snr-db 0 --m 1000 --theta 0.001 --strategy variable");
  REQUIRE(run.exit_code == 0);
  CHECK(parse_value(run.output, "eps_star") == Catch::Approx(0.0127).margin(5e-4));
  CHECK(parse_value(run.output, "R_E_star_bits_per_cu") ==
        Catch::Approx(0.6256).margin(2e-3));

  auto strict = run_cli("optimize --snr-db 0 --m 1000 --theta 0.1 --strategy variable");
  REQUIRE(strict.exit_code == 0);
  CHECK(parse_value(strict.output, "eps_star") == Catch::Approx(0.0084).margin(5e-4));
  CHECK(parse_value(strict.output, "R_E_star_bits_per_cu") ==
        Catch::Approx(0.0329).margin(2e-3));
}

TEST_CASE("json output carries the same numbers", "[cli]") {
  auto run = run_cli("optimize --snr-db 0 --m 1000 --theta 0 --strategy variable "
                     "--format json");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("\"eps_star\"") != std::string::npos);
  CHECK(run.output.find("\"R_E_star_bits_per_cu\"") != std::string::npos);
}

TEST_CASE("figure 1 dataset pins the argmin column", "[cli]") {
  const std::string path = tmp_path("fig1.csv");
  auto run = run_cli("figure --id 1 --out " + path);
  REQUIRE(run.exit_code == 0);
  auto rows = parse_csv(slurp(path));
  REQUIRE(!rows.empty());
  bool saw_theta_001 = false;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 4);
    if (std::abs(row[0] - 0.01) < 1e-12) {
      saw_theta_001 = true;
      CHECK(row[3] == Catch::Approx(0.0061).margin(5e-4));
    }
  }
  CHECK(saw_theta_001);
  std::remove(path.c_str());
}

TEST_CASE("figure 3 dataset is monotone non-increasing in theta", "[cli]") {
  const std::string path = tmp_path("fig3.csv");
  auto run = run_cli("figure --id 3 --out " + path);
  REQUIRE(run.exit_code == 0);
  auto rows = parse_csv(slurp(path));
  REQUIRE(rows.size() >= 10);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i][0] > rows[i - 1][0]);
    CHECK(rows[i][2] <= rows[i - 1][2] + 1e-9);
  }
  std::remove(path.c_str());
}

TEST_CASE("figure 5 carries both series with a shrinking gap", "[cli]") {
  const std::string path = tmp_path("fig5.csv");
  auto run = run_cli("figure --id 5 --out " + path);
  REQUIRE(run.exit_code == 0);
  auto rows = parse_csv(slurp(path));
  double first_gap = -1.0, last_gap = -1.0;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 5);
    if (std::abs(row[1] - 0.001) < 1e-12) {
      const double gap = row[4] - row[2];  // ideal minus finite-blocklength
      CHECK(gap > -1e-9);
      if (first_gap < 0.0) first_gap = gap;
      last_gap = gap;
    }
  }
  REQUIRE(first_gap >= 0.0);
  CHECK(last_gap < first_gap);
  std::remove(path.c_str());
}

TEST_CASE("unknown figure id is a usage error", "[cli]") {
  CHECK(run_cli("figure --id 14").exit_code == 2);
  CHECK(run_cli("figure --id 0").exit_code == 2);
}

TEST_CASE("simulate is deterministic per seed", "[cli]") {
  const std::string path_a = tmp_path("trace_a.csv");
  const std::string path_b = tmp_path("trace_b.csv");
  const std::string base =
      "simulate --snr-db 0 --m 1000 --strategy variable --eps 0.0061 --arrival 200 "
      "--blocks 150000 --warmup 2000 --seed 7 --out ";
  auto a = run_cli(base + path_a);
  auto b = run_cli(base + path_b);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.output.find(path_a) != std::string::npos);
  const std::string body_a = slurp(path_a);
  CHECK(body_a == slurp(path_b));
  CHECK(body_a.rfind("q_bits,blocks_q_ge,prob_q_ge\n", 0) == 0);
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("simulate reports an empty tail at zero arrival", "[cli]") {
  auto run = run_cli(
      "simulate --snr-db 0 --m 1000 --strategy variable --eps 0.01 --arrival 0 "
      "--blocks 100000 --warmup 1000 --seed 3");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("empty tail") != std::string::npos);
}

TEST_CASE("simulate flags instability with exit code 4 and writes the trace", "[cli]") {
  const std::string path = tmp_path("unstable.csv");
  auto run = run_cli(
      "simulate --snr-db 0 --m 1000 --strategy variable --eps 0.01 --arrival 5000 "
      "--blocks 120000 --warmup 1000 --seed 5 --out " + path);
  CHECK(run.exit_code == 4);
  CHECK(run.output.find("stable = no") != std::string::npos);
  CHECK(!slurp(path).empty());
  std::remove(path.c_str());
}

TEST_CASE("config file supplies defaults and flags override", "[cli]") {
  const std::string cfg = tmp_path("config.ini");
  {
    std::ofstream out(cfg);
    out << "[optimize]\n"
        << "snr-db=0\n"
        << "m=1000\n"
        << "theta=0.001\n"
        << "strategy=variable\n";
  }
  auto from_file = run_cli("optimize --config " + cfg);
  REQUIRE(from_file.exit_code == 0);
  CHECK(parse_value(from_file.output, "eps_star") == Catch::Approx(0.0127).margin(5e-4));

  // the command line wins over the file
  auto overridden = run_cli("optimize --config " + cfg + " --theta 0.01");
  REQUIRE(overridden.exit_code == 0);
  CHECK(parse_value(overridden.output, "eps_star") == Catch::Approx(0.0061).margin(5e-4));
  std::remove(cfg.c_str());
}

TEST_CASE("sweep writes one row per grid point", "[cli]") {
  const std::string path = tmp_path("sweep.csv");
  auto run = run_cli(
      "sweep --axis theta --grid-min 0.001 --grid-max 0.1 --grid-points 5 --grid-log "
      "--snr-db 0 --m 1000 --strategy variable --out " + path);
  REQUIRE(run.exit_code == 0);
  auto rows = parse_csv(slurp(path));
  REQUIRE(rows.size() == 5);
  CHECK(rows.front()[0] == Catch::Approx(0.001).epsilon(1e-9));
  CHECK(rows.back()[0] == Catch::Approx(0.1).epsilon(1e-9));
  std::remove(path.c_str());
}

TEST_CASE("identical invocations produce byte-identical stdout", "[cli]") {
  const std::string cmd = "optimize --snr-db 0 --m 1000 --theta 0.01 --strategy variable";
  auto a = run_cli(cmd);
  auto b = run_cli(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);
}
