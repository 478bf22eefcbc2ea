// End-to-end checks of the command-line tool: exit codes, file contracts and
// determinism. Spawns the binary named by the UNICON_BIN environment variable.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int tests_failed = 0;
int tests_passed = 0;

#define CHECK_MSG(cond, msg)                                     \
  do {                                                           \
    if (cond) {                                                  \
      ++tests_passed;                                            \
    } else {                                                     \
      ++tests_failed;                                            \
      std::cout << "    [FAIL] " << msg << " (line " << __LINE__ << ")\n"; \
    }                                                            \
  } while (0)

std::string g_bin;
std::string g_dir;

int run(const std::string& args, const std::string& log_name = "out.txt") {
  const std::string cmd = g_bin + " " + args + " >" + g_dir + "/" + log_name + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

void test_design() {
  const std::string out = g_dir + "/cb.json";
  const int rc = run("design --K 3 --lu 0 --lphi 0,2,2 --seed 7 --restarts 6 --out " + out);
  CHECK_MSG(rc == 0, "design exits 0");
  CHECK_MSG(exists(out), "design writes the codebook");
  const std::string log = slurp(g_dir + "/out.txt");
  CHECK_MSG(log.find("achieved_mcd") != std::string::npos, "design prints the achieved MCD");
  CHECK_MSG(log.find("mcd_upper_bound") != std::string::npos, "design prints the bound");

  // achieved MCD lands in the known window for this allocation
  const std::string cb = slurp(out);
  const auto pos = cb.find("achieved_mcd\": ");
  const double mcd = std::stod(cb.substr(pos + 15));
  CHECK_MSG(mcd > 0.6 && mcd <= 0.70711, "achieved MCD in (0.6, sin(pi/4)]");

  // determinism: identical flags give identical bytes
  const std::string out2 = g_dir + "/cb_repeat.json";
  run("design --K 3 --lu 0 --lphi 0,2,2 --seed 7 --restarts 6 --out " + out2);
  CHECK_MSG(slurp(out) == slurp(out2), "repeated design is byte-identical");
}

void test_design_invalid() {
  const std::string out = g_dir + "/bad.json";
  CHECK_MSG(run("design --K 3 --lphi 0,2,1 --out " + out) == 2, "non-monotone orders exit 2");
  CHECK_MSG(!exists(out), "no partial file on failure");
  CHECK_MSG(run("design --K 3 --out " + out) == 2, "missing allocation flags exit 2");
  CHECK_MSG(run("design --K 3 --lphi 0,2,2") == 2, "missing --out exits 2");
}

void test_search() {
  CHECK_MSG(run("search-alloc --K 3 --lv 2 --restarts 4 --seed 3", "search.txt") == 0,
            "search-alloc exits 0");
  const std::string log = slurp(g_dir + "/search.txt");
  const auto header = log.find("rank");
  const auto line1 = log.find('\n', header);
  const auto line2 = log.find('\n', line1 + 1);
  const std::string top = log.substr(line1 + 1, line2 - line1 - 1);
  CHECK_MSG(top.find("0,1,1") != std::string::npos, "top allocation for K=3 lv=2 is 0,(0,1,1)");
  CHECK_MSG(run("search-alloc --K 2 --lv 0") == 2, "lv=0 exits 2");
}

void test_analyze() {
  const std::string cb = g_dir + "/cb.json";
  CHECK_MSG(run("analyze --codebook " + cb, "analyze.txt") == 0, "analyze exits 0");
  const std::string log = slurp(g_dir + "/analyze.txt");
  CHECK_MSG(log.find("mcd_closed_form") != std::string::npos, "analyze reports the MCD");
  CHECK_MSG(log.find("mcd_bruteforce") != std::string::npos, "analyze reports the brute force");
  CHECK_MSG(log.find("pilot_psk_mcd") != std::string::npos, "analyze reports the pilot reference");
  CHECK_MSG(run("analyze --codebook " + g_dir + "/missing.json") == 2, "missing file exits 2");

  const std::string broken = g_dir + "/broken.json";
  std::ofstream(broken) << "{ not json";
  CHECK_MSG(run("analyze --codebook " + broken) == 2, "malformed file exits 2");

  // flat two-symbol reference: the pilot-style MCD is exactly 1
  const std::string cb2 = g_dir + "/cb_k2.json";
  CHECK_MSG(run("design --K 2 --lu 0 --lphi 0,1 --seed 1 --restarts 4 --out " + cb2) == 0,
            "K=2 design exits 0");
  run("analyze --codebook " + cb2, "analyze_k2.txt");
  CHECK_MSG(slurp(g_dir + "/analyze_k2.txt").find("pilot_psk_mcd 1.000000000") !=
                std::string::npos,
            "pilot reference hits 1 for the flat two-symbol block");
}

void test_design_by_budget() {
  const std::string out = g_dir + "/cb_lv.json";
  CHECK_MSG(run("design --K 2 --lv 1 --seed 2 --restarts 4 --out " + out) == 0,
            "design --lv exits 0");
  const std::string cb = slurp(out);
  CHECK_MSG(cb.find("\"l_phi\": [\n    0,\n    1\n  ]") != std::string::npos,
            "budget design picked the single-phase-bit allocation");
}

void test_simulate() {
  const std::string cb = g_dir + "/cb.json";
  const std::string csv = g_dir + "/res.csv";
  const int rc = run("simulate --codebook " + cb +
                     " --detector ml --snr-start 60 --snr-stop 60 --antennas 2 --seed 1"
                     " --min-errors 1 --max-trials 500 --out " + csv);
  CHECK_MSG(rc == 0, "simulate exits 0");
  const std::string body = slurp(csv);
  CHECK_MSG(body.find("snr_db,detector,trials") == 0, "results start with the header");
  CHECK_MSG(body.find("60,ml,500,0,0,0,0,0,") != std::string::npos, "noiseless point has zero BLER");

  CHECK_MSG(run("simulate --codebook " + cb + " --detector nope --snr-start 0 --snr-stop 0"
                " --out " + g_dir + "/x.csv") == 2,
            "unknown detector exits 2");
  CHECK_MSG(!exists(g_dir + "/x.csv"), "no partial results file on failure");
}

void test_thread_determinism() {
  const std::string cb = g_dir + "/cb.json";
  for (int threads : {1, 2, 8}) {
    const std::string csv = g_dir + "/res_t" + std::to_string(threads) + ".csv";
    const int rc = run("simulate --codebook " + cb +
                       " --detector iuap-improved-pr --snr-start 4 --snr-stop 6 --snr-step 1"
                       " --antennas 4 --seed 9 --min-errors 40 --max-trials 20000"
                       " --threads " + std::to_string(threads) + " --out " + csv);
    CHECK_MSG(rc == 0, "simulate with threads exits 0");
  }
  const std::string t1 = slurp(g_dir + "/res_t1.csv");
  CHECK_MSG(t1 == slurp(g_dir + "/res_t2.csv"), "1 vs 2 workers byte-identical");
  CHECK_MSG(t1 == slurp(g_dir + "/res_t8.csv"), "1 vs 8 workers byte-identical");

  for (int threads : {1, 2, 8}) {
    const std::string out = g_dir + "/cb_t" + std::to_string(threads) + ".json";
    run("design --K 3 --lu 1 --lphi 0,2,2 --seed 5 --restarts 8 --threads " +
        std::to_string(threads) + " --out " + out);
  }
  const std::string d1 = slurp(g_dir + "/cb_t1.json");
  CHECK_MSG(!d1.empty(), "threaded design produced output");
  CHECK_MSG(d1 == slurp(g_dir + "/cb_t2.json"), "design 1 vs 2 workers byte-identical");
  CHECK_MSG(d1 == slurp(g_dir + "/cb_t8.json"), "design 1 vs 8 workers byte-identical");
}

}  // namespace

int main() {
  const char* bin = std::getenv("UNICON_BIN");
  if (!bin) {
    std::cerr << "UNICON_BIN not set\n";
    return 1;
  }
  g_bin = bin;
  char tmpl[] = "/tmp/unicon_cli_XXXXXX";
  if (!mkdtemp(tmpl)) {
    std::cerr << "mkdtemp failed\n";
    return 1;
  }
  g_dir = tmpl;

  test_design();
  test_design_invalid();
  test_design_by_budget();
  test_search();
  test_analyze();
  test_simulate();
  test_thread_determinism();

  std::cout << "cli tests: " << tests_passed << " passed, " << tests_failed << " failed\n";
  return tests_failed == 0 ? 0 : 1;
}
