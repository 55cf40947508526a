#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string binary() {
  const char* b = std::getenv("EALIGN_BIN");
  return b ? b : "./ealign";
}

fs::path source_dir() {
  const char* s = std::getenv("EALIGN_SOURCE_DIR");
  return s ? s : ".";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ealign_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + binary() + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

fs::path write_config(const fs::path& dir, const std::string& extra_time = "t_end = 0.5\noutput_times = 0.25, 0.5\n",
                      const std::string& extra = "") {
  const fs::path p = dir / "run.ini";
  std::ofstream(p) << "[grid]\nn = 256\nhalf_width = 8\n"
                      "[model]\nalpha = 0.5\nepsilon = auto\n"
                      "[time]\nflux_scheme = upwind\n"
                   << extra_time
                   << "[initial]\nshape = gaussian\ncenter = 0\nwidth = 0.5\nmass = 1\nmode = proportional\n"
                      "coef = 1\na = 1\nb = 1\n"
                   << extra;
  return p;
}

// Column `name` of summary.csv.
std::vector<double> summary_column(const fs::path& dir, const std::string& name) {
  std::ifstream in(dir / "summary.csv");
  std::string header;
  std::getline(in, header);
  header = header.substr(2);
  std::size_t col = 0, i = 0;
  std::stringstream hs(header);
  for (std::string h; std::getline(hs, h, ','); ++i)
    if (h == name) col = i;
  std::vector<double> out;
  for (std::string line; std::getline(in, line);) {
    std::stringstream ls(line);
    std::string cell;
    for (std::size_t k = 0; k <= col; ++k) std::getline(ls, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

TEST_CASE("selftest passes and catches an injected Hilbert sign error") {
  const fs::path out = fresh_dir("selftest");
  CHECK(run("--out '" + out.string() + "' selftest") == 0);
  CHECK(manifest(out)["status"] == "pass");
  CHECK(fs::exists(out / "selftest.json"));

  const fs::path bad = fresh_dir("selftest_bad");
  CHECK(run("--out '" + bad.string() + "' selftest --inject-hilbert-sign-error") == 1);
  const json m = manifest(bad);
  CHECK(m["status"] == "check_failure");
  bool some_false = false;
  for (const auto& [k, v] : m["checks"].items()) some_false = some_false || !v.get<bool>();
  CHECK(some_false);
}

TEST_CASE("bad input exits 2 and still writes a manifest") {
  const fs::path out = fresh_dir("bad");
  CHECK(run("--out '" + out.string() + "' --config /nonexistent/run.ini simulate") == 2);
  CHECK(manifest(out)["exit_code"] == 2);

  const fs::path cfg = write_config(out, "t_end = 0.5\n", "bogus_key = 1\n");
  fs::remove(out / "manifest.json");
  CHECK(run("--out '" + out.string() + "' --config '" + cfg.string() + "' simulate") == 2);
  CHECK(manifest(out)["status"] == "bad_input");

  fs::remove(out / "manifest.json");
  CHECK(run("--out '" + out.string() + "' nosuchcommand") == 2);
  CHECK(fs::exists(out / "manifest.json"));

  CHECK(run("--out '" + out.string() + "' verify --dir '" + out.string() + "' --checks mass,nonsense") == 2);
}

TEST_CASE("t_end = 0 writes only the initial state") {
  const fs::path out = fresh_dir("tzero");
  const fs::path cfg = write_config(out, "t_end = 0\n");
  CHECK(run("--out '" + out.string() + "/run' --config '" + cfg.string() + "' simulate") == 0);
  CHECK(fs::exists(out / "run" / "state_0000.csv"));
  CHECK_FALSE(fs::exists(out / "run" / "state_0001.csv"));
  CHECK(summary_column(out / "run", "t").size() == 1);
}

TEST_CASE("EULER_ALIGN_OUT overrides --out") {
  const fs::path base = fresh_dir("env");
  const fs::path cfg = write_config(base);
  CHECK(run("--out '" + (base / "flag").string() + "' --config '" + cfg.string() + "' simulate",
            "EULER_ALIGN_OUT='" + (base / "env").string() + "'") == 0);
  CHECK(fs::exists(base / "env" / "manifest.json"));
  CHECK_FALSE(fs::exists(base / "flag"));
}

TEST_CASE("simulate is deterministic and its output verifies") {
  const fs::path base = fresh_dir("determinism");
  const fs::path cfg = write_config(base);
  REQUIRE(run("--out '" + (base / "a").string() + "' --config '" + cfg.string() + "' simulate") == 0);
  REQUIRE(run("--out '" + (base / "b").string() + "' --config '" + cfg.string() + "' simulate") == 0);
  const json m = manifest(base / "a");
  REQUIRE(m["outputs"].size() >= 4);
  for (const auto& f : m["outputs"]) {
    const std::string name = f.get<std::string>();
    CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
  }
  CHECK(m["checks"]["mass"] == true);

  const fs::path v = base / "verify";
  CHECK(run("--out '" + v.string() + "' verify --dir '" + (base / "a").string() + "' --checks mass,maxprinciple") == 0);
  CHECK(fs::exists(v / "verify.json"));
}

TEST_CASE("shipped upwind config gives a non-increasing L2 norm") {
  const fs::path out = fresh_dir("shipped");
  const fs::path cfg = source_dir() / "configs" / "sandwich_upwind.ini";
  REQUIRE(fs::exists(cfg));
  REQUIRE(run("--out '" + out.string() + "' --config '" + cfg.string() + "' simulate") == 0);
  const auto l2 = summary_column(out, "rho_L2");
  REQUIRE(l2.size() >= 2);
  for (std::size_t i = 1; i < l2.size(); ++i) CHECK(l2[i] <= l2[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("profiles writes Phi, its fractional Laplacian and U") {
  const fs::path out = fresh_dir("profiles");
  CHECK(run("--out '" + out.string() + "' profiles --alpha 0.5") == 0);
  const std::string csv = slurp(out / "profiles.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1201);
  CHECK(run("--out '" + out.string() + "' profiles --alpha 1.5") == 2);
}
