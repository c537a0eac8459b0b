#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spintherm/io.hpp"
#include "spintherm/presets.hpp"
#include "test_util.hpp"

using namespace spintherm;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "spintherm_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(SPINTHERM_CLI_PATH) + " " + args + " >" +
                          out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<double> row_values(const std::string& csv_row, int begin, int count) {
  std::vector<double> vals;
  std::istringstream in(csv_row);
  std::string cell;
  int idx = 0;
  while (std::getline(in, cell, ',')) {
    if (idx >= begin && idx < begin + count) vals.push_back(std::stod(cell));
    ++idx;
  }
  REQUIRE(static_cast<int>(vals.size()) == count);
  return vals;
}

}  // namespace

TEST_CASE("subcommand is required and --help succeeds") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("steady --help").exit_code == 0);
}

TEST_CASE("exactly one configuration source must be given") {
  CHECK(run_cli("steady").exit_code == 2);
  const fs::path cfg = work_dir() / "both.json";
  write_config(cfg.string(), make_preset("fig3a"));
  const RunResult both = run_cli("steady --preset fig3a --config " + cfg.string());
  CHECK(both.exit_code == 2);
}

TEST_CASE("unknown preset names are rejected with the list of known ones") {
  const RunResult r = run_cli("steady --preset nope");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("nope") != std::string::npos);
  CHECK(r.err.find("fig3a") != std::string::npos);
}

TEST_CASE("spectrum lists eight ascending energies") {
  const RunResult r = run_cli("spectrum --preset fig3a");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "index,energy,dominant_bare");
  double prev = -1e300;
  for (int i = 1; i <= 8; ++i) {
    const std::vector<double> vals = row_values(lines[i], 0, 3);
    CHECK(vals[0] == i - 1);
    CHECK(vals[1] >= prev);
    prev = vals[1];
  }
}

TEST_CASE("steady output at equilibrium shows vanishing currents") {
  const RunResult r = run_cli("steady --preset equilibrium");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "sweep_value,Q_L,Q_M,Q_R,components,flag");
  const std::vector<double> q = row_values(lines[1], 1, 3);
  for (double v : q) CHECK(std::abs(v) < 1e-12 * 1e-3);

  bool pops = false, weights = false;
  for (const std::string& line : lines) {
    if (line.rfind("# populations", 0) == 0) pops = true;
    if (line.rfind("# weights", 0) == 0) weights = true;
  }
  CHECK(pops);
  CHECK(weights);
}

TEST_CASE("JSON config round-trips through file and CLI") {
  std::mt19937_64 rng(51);
  SystemConfig c = testutil::generic_config(rng);
  c.initial = BareIndexInitial{2};
  c.tolerances.eps_conn = 1e-12;

  const fs::path cfg = work_dir() / "roundtrip.json";
  write_config(cfg.string(), c);
  const SystemConfig back = load_config(cfg.string());
  CHECK(back.fields.B_L == c.fields.B_L);
  CHECK(back.fields.theta == c.fields.theta);
  CHECK(back.coupling.J_MR == c.coupling.J_MR);
  CHECK(back.reservoirs.kappa_M == c.reservoirs.kappa_M);
  REQUIRE(std::holds_alternative<BareIndexInitial>(back.initial));
  CHECK(std::get<BareIndexInitial>(back.initial).index == 2);
  REQUIRE(back.tolerances.eps_conn.has_value());
  CHECK(*back.tolerances.eps_conn == 1e-12);

  const RunResult r = run_cli("steady --config " + cfg.string());
  CHECK(r.exit_code == 0);
}

TEST_CASE("malformed configs are validation errors") {
  const fs::path bad = work_dir() / "bad.json";
  {
    std::ofstream out(bad);
    out << "{ \"fields\": { \"B_L\": 1.0 } }\n";  // missing required keys
  }
  CHECK(run_cli("steady --config " + bad.string()).exit_code == 2);
  {
    std::ofstream out(bad);
    out << "{ not json\n";
  }
  CHECK(run_cli("steady --config " + bad.string()).exit_code == 2);
  CHECK(run_cli("steady --config " + (work_dir() / "missing.json").string()).exit_code ==
        2);
}

TEST_CASE("degenerate stationary structure maps to the numerical-error exit code") {
  // Resonant chain with every bath frozen at T = 0: several states become
  // absorbing inside one connected component, so no unique steady state.
  SystemConfig c;
  c.fields = {1.0, 1.0, 1.0, 0.0};
  c.coupling.J_LM = 1.0;
  c.coupling.J_MR = 1.0;
  c.reservoirs = {0.0, 0.0, 0.0, 1e-3, 1e-3, 1e-3};
  const fs::path cfg = work_dir() / "degenerate.json";
  write_config(cfg.string(), c);
  const RunResult r = run_cli("steady --config " + cfg.string());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("numerical error") != std::string::npos);
}

TEST_CASE("subspace listing for the dead-channel preset") {
  const RunResult r = run_cli("subspaces --preset tf-xx");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "8");
  CHECK(lines[1] == "component 0: 0");
  CHECK(lines[8] == "component 7: 7");
}

TEST_CASE("angle sweep endpoints carry no current for the blocked modulator") {
  const RunResult r = run_cli("sweep-theta --preset fig3a --grid 9");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 10);
  // theta = 0, pi, 2*pi rows: indices 1, 5, 9 on a 9-point grid over [0, 2*pi].
  for (int idx : {1, 5, 9}) {
    const std::vector<double> q = row_values(lines[idx], 1, 3);
    for (double v : q) CHECK(std::abs(v) < 1e-12 * 1e-3 * 0.09);
  }
  const std::vector<double> mid = row_values(lines[3], 1, 3);  // theta = pi/2
  CHECK(std::abs(mid[0]) > 1e-5);
}

TEST_CASE("sweeps are deterministic byte for byte") {
  const fs::path a = work_dir() / "sweep_a.csv";
  const fs::path b = work_dir() / "sweep_b.csv";
  REQUIRE(run_cli("sweep-theta --preset fig3b --grid 41 --out " + a.string()).exit_code ==
          0);
  REQUIRE(run_cli("sweep-theta --preset fig3b --grid 41 --out " + b.string()).exit_code ==
          0);
  const std::string text_a = slurp(a);
  CHECK(!text_a.empty());
  CHECK(text_a == slurp(b));
}

TEST_CASE("plot script generation requires a CSV path") {
  const fs::path plot = work_dir() / "plot.gp";
  CHECK(run_cli("sweep-theta --preset fig3a --grid 9 --plot-script " + plot.string())
            .exit_code == 2);
  const fs::path csv = work_dir() / "for_plot.csv";
  REQUIRE(run_cli("sweep-theta --preset fig3a --grid 9 --out " + csv.string() +
                  " --plot-script " + plot.string())
              .exit_code == 0);
  const std::string script = slurp(plot);
  CHECK(script.find(csv.string()) != std::string::npos);
  CHECK(script.find("Q_M") != std::string::npos);
}

TEST_CASE("temperature sweep reports the critical point in the file and on stdout") {
  const fs::path csv = work_dir() / "tm.csv";
  const RunResult r =
      run_cli("sweep-tm --preset fig6 --grid 60 --out " + csv.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("critical_T_M") != std::string::npos);
  const std::string text = slurp(csv);
  CHECK(text.find("# critical_T_M,") != std::string::npos);
  CHECK(text.find("QM-sign-change") != std::string::npos);
}

TEST_CASE("transistor table reports gains with the conservation identity") {
  const RunResult r = run_cli("transistor --preset fig5ab --grid 5");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "sweep_value,alpha_L,alpha_R,dQM_dTM,components,flag");
  for (int i = 1; i <= 5; ++i) {
    const std::vector<double> vals = row_values(lines[i], 1, 2);
    CHECK(std::abs(vals[0] + vals[1] + 1.0) < 1e-6);
  }
}

TEST_CASE("diode summary for the asymmetric chain under a cold terminal") {
  const RunResult r = run_cli("diode --preset fig7a --t-r 0.001");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "sweep_value,Q_forward,Q_reverse,R,components,flag");
  const std::vector<double> vals = row_values(lines[1], 1, 3);
  CHECK(vals[2] > 0.95);
  CHECK(vals[2] <= 1.0);
}

TEST_CASE("middle-coupled diode runs are flagged") {
  const RunResult r = run_cli("diode --preset fig7a --kappa-m 1e-4");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("middle-coupled") != std::string::npos);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("override flags reject out-of-range values") {
  CHECK(run_cli("steady --preset fig3a --t-l -1").exit_code == 2);
  CHECK(run_cli("steady --preset fig3a --kappa-m -1e-3").exit_code == 2);
  CHECK(run_cli("steady --preset fig4a --p 1.5").exit_code == 2);
  CHECK(run_cli("sweep-theta --preset fig3a --grid 1").exit_code == 2);
  CHECK(run_cli("sweep-tm --preset fig3b --tm-min 0.5 --tm-max 0.1").exit_code == 2);
  CHECK(run_cli("sweep-theta --preset fig3a --policy sideways").exit_code == 2);
}

TEST_CASE("evolve produces a time series starting at t = 0") {
  const RunResult r = run_cli("evolve --preset fig4a --tmax 20 --dt 2");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 12);  // header + t = 0..20 step 2
  const std::vector<double> first = row_values(lines[1], 0, 4);
  CHECK(first[0] == 0.0);
  CHECK(first[2] == 0.0);  // middle reservoir silent in this preset
  const std::vector<double> last = row_values(lines[11], 0, 1);
  CHECK(last[0] == 20.0);
  CHECK(run_cli("evolve --preset fig4a --tmax -5").exit_code == 2);
}

TEST_CASE("the dead-channel preset evolves nowhere and says why") {
  const RunResult r = run_cli("evolve --preset tf-xx");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--tmax") != std::string::npos);
}
