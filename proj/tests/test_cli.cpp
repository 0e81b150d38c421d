#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = ROTORID_CLI_PATH;
const std::string kDefaultConfig = ROTORID_DEFAULT_CONFIG;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rotorid_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = kCli + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

/// Every data file except the run manifest and the summary.
std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name == "manifest.txt" || name == "summary.txt" || name == "log.txt") continue;
    out[name] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("pipeline on the shipped config succeeds and reports round-trip errors") {
  auto dir = scratch("pipeline");
  REQUIRE(run("--config " + kDefaultConfig + " --out " + dir.string(), dir / "log.txt") == 0);
  const auto summary = slurp(dir / "summary.txt");
  CHECK(summary.find("relative_error") != std::string::npos);
  CHECK(summary.find("F11") != std::string::npos);
  CHECK(fs::exists(dir / "manifest.txt"));
  for (const char* f : {"sweep_input.csv", "autospectrum.csv", "frf_mag.csv", "frf_phase.csv", "coherence.csv",
                        "fit_report.txt", "fit_params.csv", "verify_report.csv"})
    CHECK(fs::exists(dir / f));
  fs::remove_all(dir);
}

TEST_CASE("stage-wise run equals the pipeline and composite re-runs byte-identically") {
  auto whole = scratch("whole"), staged = scratch("staged");
  REQUIRE(run("--config " + kDefaultConfig + " --out " + whole.string(), whole / "log.txt") == 0);
  for (const char* s : {"simulate", "sweep", "frespid", "misosa", "composite", "derivid", "verify"})
    REQUIRE(run("--config " + kDefaultConfig + " --out " + staged.string() + " --stage " + s, staged / "log.txt") == 0);
  CHECK(data_files(whole) == data_files(staged));

  const auto before = data_files(staged);
  REQUIRE(run("--config " + kDefaultConfig + " --out " + staged.string() + " --stage composite", staged / "log.txt") == 0);
  CHECK(data_files(staged) == before);
  fs::remove_all(whole);
  fs::remove_all(staged);
}

TEST_CASE("seed on the command line overrides the config") {
  auto a = scratch("seed_a"), b = scratch("seed_b");
  REQUIRE(run("--out " + a.string() + " --stage sweep --seed 5", a / "log.txt") == 0);
  REQUIRE(run("--out " + b.string() + " --stage sweep --seed 6", b / "log.txt") == 0);
  CHECK(slurp(a / "hover_lateral_sweep.th") != slurp(b / "hover_lateral_sweep.th"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("frespid on a truncated log fails with the line number") {
  auto dir = scratch("truncated");
  REQUIRE(run("--out " + dir.string() + " --stage sweep", dir / "log.txt") == 0);
  const auto path = dir / "hover_lateral_sweep.th";
  auto text = slurp(path);
  // cut mid-row
  auto cut = text.find('\n', text.size() / 2);
  text = text.substr(0, cut + 8);
  write(path, text);
  const auto line = std::to_string(std::count(text.begin(), text.end(), '\n') + 1);
  CHECK(run("--out " + dir.string() + " --stage frespid", dir / "log.txt") == 3);
  const auto msg = slurp(dir / "log.txt");
  CHECK(msg.find("line " + line) != std::string::npos);
  bool partial = false;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().rfind("frespid_", 0) == 0) partial = true;
  CHECK_FALSE(partial);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  auto dir = scratch("codes");
  write(dir / "bad.cfg", "sweep.omega_max = 0.1\n");
  CHECK(run("--config " + (dir / "bad.cfg").string() + " --out " + dir.string(), dir / "log.txt") == 2);
  CHECK(slurp(dir / "log.txt").find("line 1") != std::string::npos);
  CHECK(run("--stage nonsense --out " + dir.string(), dir / "log.txt") == 2);
  CHECK(run("--config " + (dir / "missing.cfg").string(), dir / "log.txt") == 2);

  CHECK(run("--out " + dir.string() + " --stage frespid", dir / "log.txt") == 3);

  write(dir / "unsafe.cfg", "safety.phi_max = 0.001\nsafety.recovery_timeout = 3.5\n");
  CHECK(run("--config " + (dir / "unsafe.cfg").string() + " --out " + dir.string() + " --stage sweep",
            dir / "log.txt") == 5);
  fs::remove_all(dir);
}
