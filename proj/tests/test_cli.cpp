#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "eitmem_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(EITMEM_CLI_PATH) + " " + args + " > " +
                          (kWork / "stdout.txt").string() + " 2> " +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Workdir {
  Workdir() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Workdir, "presets lists the catalog") {
  CHECK(run("presets") == 0);
  const auto out = slurp(kWork / "stdout.txt");
  CHECK(out.find("fig3a") != std::string::npos);
  CHECK(out.find("fig9c") != std::string::npos);
  CHECK(out.find("ideal") != std::string::npos);
}

TEST_CASE_FIXTURE(Workdir, "usage and parse errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("simulate") == 2);
  CHECK(run("simulate --preset fig3a --config x.cfg") == 2);
  CHECK(run("simulate --preset nope") == 2);
  CHECK(run("simulate --preset fig3a --grid-points 300") == 2);
  CHECK(run("simulate --preset fig3a --dt abc") == 2);
  CHECK(run("limits") == 2);

  write(kWork / "empty.cfg", "");
  CHECK(run("simulate --config " + (kWork / "empty.cfg").string()) == 2);
  CHECK(slurp(kWork / "stderr.txt").find("line 1") != std::string::npos);

  write(kWork / "neg.cfg", "gamma_bc = -1\n");
  CHECK(run("limits --config " + (kWork / "neg.cfg").string()) == 2);
  CHECK(slurp(kWork / "stderr.txt").find("gamma_bc >= 0") != std::string::npos);
}

TEST_CASE_FIXTURE(Workdir, "limits prints the detuning limits") {
  write(kWork / "a.cfg", "preset = fig3a\n");
  CHECK(run("limits --config " + (kWork / "a.cfg").string()) == 0);
  const auto out = slurp(kWork / "stdout.txt");
  CHECK(out.find("delta_p_max = 351.") != std::string::npos);
  CHECK(out.find("delta_max = 351") != std::string::npos);
  CHECK(run("limits --preset fig4c") == 0);
}

TEST_CASE_FIXTURE(Workdir, "simulate writes outputs and signals destruction") {
  const auto out = kWork / "run";
  CHECK(run("simulate --preset fig3a --out-dir " + out.string() +
            " --snapshot-every 5e-6 --grid-points 8192") == 0);
  CHECK(fs::exists(out / "snapshot_0033.csv"));
  CHECK(fs::exists(out / "summary.txt"));
  CHECK_FALSE(fs::exists(out / "reference_0000.csv"));
  const auto summary = slurp(out / "summary.txt");
  CHECK(summary.find("grid_points = 8192") != std::string::npos);
  CHECK(summary.find("snapshot_every = 5.0000000000000004e-06 s") != std::string::npos);

  // The echoed config drives an identical rerun in a separate process.
  const auto again = kWork / "again";
  CHECK(run("simulate --config " + (out / "summary.txt").string() + " --out-dir " +
            again.string()) == 0);
  for (const char* f : {"snapshot_0000.csv", "snapshot_0020.csv", "timeseries.csv"}) {
    CHECK(slurp(out / f) == slurp(again / f));
  }

  CHECK(run("simulate --preset fig9c --out-dir " + (kWork / "fig9c").string()) == 3);
  CHECK(slurp(kWork / "stderr.txt").find("WraparoundDetected") != std::string::npos);
  CHECK(fs::exists(kWork / "fig9c" / "summary.txt"));
}
