#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "helpers.hpp"
#include "tnspec/mps.hpp"
#include "tnspec/state_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
  if (const char* p = std::getenv("TNSPEC_CLI_BIN")) return p;
  return TNSPEC_CLI_BIN;
}

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = cli() + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file;
  cmd += " 2> cli_stderr.txt";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("usage errors exit with code 1, help with 0") {
  CHECK(run("") == 1);
  CHECK(run("--help", "cli_help.txt") == 0);
  CHECK(run("no-such-command") == 1);
  CHECK(run("random") == 1);  // --out required
  CHECK(run("logneg --sites-a 0 --sites-b 1") == 1);  // no state source
  fs::remove("cli_help.txt");
  fs::remove("cli_stderr.txt");
}

TEST_CASE("random sweep writes the expected CSV and manifest") {
  CHECK(run("random --L 8 --lab-min 2 --lab-max 4 --realizations 2 "
            "--tol 0.05 --seed 3 --out cli_rand.csv") == 0);
  std::string csv = slurp("cli_rand.csv");
  CHECK(csv.rfind("L,L_AB,realization,E,E_err,E_analytic,n_samples\n", 0) == 0);
  CHECK(line_count(csv) == 1 + 2 * 2);  // header + 2 labs x 2 realizations
  nlohmann::json man = nlohmann::json::parse(slurp("cli_rand.csv.manifest.json"));
  CHECK(man["command"] == "random");
  CHECK(man["seed"] == 3);
  CHECK(man.contains("wall_ms"));
  fs::remove("cli_rand.csv");
  fs::remove("cli_rand.csv.manifest.json");
}

TEST_CASE("reruns with the same seed are byte-identical") {
  std::string args = "random --L 8 --lab-min 2 --lab-max 4 --realizations 2 "
                     "--tol 0.05 --seed 11 --out ";
  CHECK(run(args + "cli_a.csv") == 0);
  CHECK(run(args + "cli_b.csv") == 0);
  CHECK(slurp("cli_a.csv") == slurp("cli_b.csv"));
  // thread count must not change results either
  CHECK(run("--threads 2 " + args + "cli_c.csv") == 0);
  CHECK(slurp("cli_a.csv") == slurp("cli_c.csv"));
  for (auto* f : {"cli_a.csv", "cli_b.csv", "cli_c.csv"}) {
    fs::remove(f);
    fs::remove(std::string(f) + ".manifest.json");
  }
}

TEST_CASE("quench grid has (t_max/dt + 1) x |lab-list| rows") {
  CHECK(run("quench --L 4 --t-max 0.5 --dt 0.25 --lab-list 2,4 "
            "--tol 0.05 --seed 7 --out cli_q.csv") == 0);
  std::string csv = slurp("cli_q.csv");
  CHECK(csv.rfind("Jt,L_AB,E,E_err\n", 0) == 0);
  CHECK(line_count(csv) == 1 + 3 * 2);
  fs::remove("cli_q.csv");
  fs::remove("cli_q.csv.manifest.json");
}

TEST_CASE("logneg on a stored dense state validates against --exact") {
  tnspec::PureState psi = tnspec::random_pure_state(8, 123);
  tnspec::save_state(psi, "cli_state_dir");
  CHECK(run("logneg --state-file cli_state_dir --sites-a 0,1,2 "
            "--sites-b 3,4,5 --tol 0.01 --seed 5 --exact",
            "cli_ln.json") == 0);
  nlohmann::json res = nlohmann::json::parse(slurp("cli_ln.json"));
  CHECK(res["method"] == "pts");
  double dev = res["deviation"];
  double err = res["E_err"];
  CHECK(std::abs(dev) < 3.0 * err + 0.02);
  fs::remove_all("cli_state_dir");
  fs::remove("cli_ln.json");
}

TEST_CASE("logneg on a stored MPS validates against --exact") {
  tnspec::PureState psi = tnspec::random_pure_state(8, 321);
  tnspec::Mps m = tnspec::mps_from_dense(psi, 16, 0.0);
  tnspec::save_mps(m, "cli_mps_dir");
  CHECK(run("logneg --mps-dir cli_mps_dir --sites-a 2,3 --sites-b 5,6 "
            "--tol 0.01 --seed 9 --exact",
            "cli_ln2.json") == 0);
  nlohmann::json res = nlohmann::json::parse(slurp("cli_ln2.json"));
  CHECK(res["method"] == "mps");
  double dev = res["deviation"];
  double err = res["E_err"];
  CHECK(std::abs(dev) < 3.0 * err + 0.02);
  // non-contiguous blocks are rejected on the MPS path
  CHECK(run("logneg --mps-dir cli_mps_dir --sites-a 0,2 --sites-b 4,5") == 1);
  fs::remove_all("cli_mps_dir");
  fs::remove("cli_ln2.json");
  fs::remove("cli_stderr.txt");
}

TEST_CASE("heis-gs emits the scaling CSV and fit sidecar") {
  CHECK(run("heis-gs --L 12 --chi-max 24 --lab-max 6 --tol 0.05 --seed 2 "
            "--out cli_gs.csv --save-mps cli_gs_mps") == 0);
  std::string csv = slurp("cli_gs.csv");
  CHECK(csv.rfind("L_AB,E,E_err\n", 0) == 0);
  CHECK(line_count(csv) == 1 + 2);  // L_AB = 4, 6
  nlohmann::json fit = nlohmann::json::parse(slurp("cli_gs.csv.fit.json"));
  CHECK(fit["dmrg_converged"] == true);
  double e = fit["energy"];
  CHECK(e < -15.0);  // well below the Neel energy -11 at L=12
  tnspec::Mps m = tnspec::load_mps("cli_gs_mps");
  CHECK(m.length() == 12);
  fs::remove("cli_gs.csv");
  fs::remove("cli_gs.csv.fit.json");
  fs::remove("cli_gs.csv.manifest.json");
  fs::remove_all("cli_gs_mps");
}
