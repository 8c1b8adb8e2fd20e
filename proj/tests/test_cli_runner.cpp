#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/config.hpp"
#include "marcuslab/errors.hpp"
#include "marcuslab/experiments.hpp"
#include "marcuslab/stats.hpp"

using namespace marcuslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("marcuslab_test_" + name);
  fs::remove_all(p);
  return p;
}

// Small, fast settings shared by the experiment tests.
Config small(const fs::path& out) {
  Config c = Config::defaults();
  c.set("out", out.string());
  c.set("observable.calibration", "100000");
  c.set("stats.h_orbit", "1000000");
  c.set("run.n", "500");
  c.set("run.replicas", "3");
  c.set("levy.source", "config");
  return c;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const fs::path log = fs::temp_directory_path() / "marcuslab_cli_log.txt";
  const std::string cmd = std::string(MARCUSLAB_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) *output = slurp(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = Config::parse("# comment\n a = 1 \n\nb.c=two words\nlist = 1, 2.5 ,3\nflag = true\n");
  CHECK(c.get_int("a") == 1);
  CHECK(c.get_string("b.c") == "two words");
  CHECK(c.get_doubles("list") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(c.get_bool("flag"));
  CHECK(c.canonical() == "a = 1\nb.c = two words\nflag = true\nlist = 1, 2.5 ,3\n");
  CHECK_THROWS_AS(Config::parse("no equals sign"), ConfigError);
  CHECK_THROWS_AS(c.get_string("missing"), ConfigError);
  CHECK_THROWS_AS(c.get_double("b.c"), ConfigError);
  CHECK_THROWS_AS(c.get_int("list"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigError);

  Config d = Config::defaults();
  d.merge(Config::parse("map.alpha = 1.7"));
  d.set("seed=42");
  CHECK(d.get_double("map.alpha") == 1.7);
  CHECK(d.get_u64("seed") == 42);
  CHECK_THROWS_AS(d.set("novalue"), ConfigError);
  CHECK(parse_u64("18446744073709551615") == 18446744073709551615ULL);
  CHECK_THROWS_AS(parse_u64("-1"), ConfigError);
  CHECK_THROWS_AS(parse_u64("12x"), ConfigError);
}

TEST_CASE("experiments are deterministic and manifests are complete") {
  for (const std::string kind : {"map-orbit", "returns", "driver", "fastslow", "levy", "rde"}) {
    const fs::path a = scratch(kind + "_a"), b = scratch(kind + "_b");
    const RunManifest ma = run(kind, small(a));
    const RunManifest mb = run(kind, small(b));
    REQUIRE(!ma.files.empty());
    CHECK(ma.experiment == kind);
    CHECK(ma.version == kArtifactVersion);
    CHECK(ma.config_digest == mb.config_digest);
    CHECK(fs::exists(a / "manifest.json"));
    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(manifest["files"].size() == ma.files.size());
    CHECK(manifest.contains("wall_clock_seconds"));
    for (std::size_t i = 0; i < ma.files.size(); ++i) {
      const std::string bytes = slurp(a / ma.files[i].file);
      CHECK_MESSAGE(bytes == slurp(b / ma.files[i].file), kind << ": " << ma.files[i].file);
      CHECK(sha256_hex(bytes) == ma.files[i].sha256);
      CHECK(ma.files[i].sha256 == mb.files[i].sha256);
    }
  }
  Config other = small(scratch("orbit_seed"));
  other.set("seed", "2");
  const RunManifest m2 = run("map-orbit", other);
  const RunManifest m1 = run("map-orbit", small(scratch("map-orbit_a")));
  CHECK(m1.files[0].sha256 != m2.files[0].sha256);
}

TEST_CASE("fastslow emits W_n and X_n") {
  const fs::path out = scratch("fastslow_paths");
  const RunManifest m = run("fastslow", small(out));
  const CadlagPath wn = read_csv_file((out / "wn.csv").string());
  const CadlagPath xn = read_csv_file((out / "xn.csv").string());
  CHECK(wn.size() == 501);
  CHECK(xn.size() == 501);
  CHECK(wn.dimension() == 2);
  CHECK(xn.dimension() == 2);
  CHECK(xn.value(0)(0) == 1.0);
  CHECK(xn.values().allFinite());
  const auto summary = nlohmann::json::parse(slurp(out / "fastslow.json"));
  CHECK(summary.dump().find("forward") != std::string::npos);
}

TEST_CASE("config errors") {
  Config c = small(scratch("errors"));
  CHECK_THROWS_AS(run("nonsense", c), ConfigError);
  c.set("validate.suite", "no-such-suite");
  CHECK_THROWS_AS(run("validate", c), UnknownSuite);
  CHECK_THROWS_AS(run_suite("no-such-suite", c), UnknownSuite);
  Config bad = small(scratch("errors2"));
  bad.set("map.kind", "XYZ");
  CHECK_THROWS_AS(run("map-orbit", bad), ConfigError);
  Config zero = small(scratch("errors3"));
  zero.set("run.n", "0");
  CHECK_THROWS_AS(run("driver", zero), ConfigError);
}

TEST_CASE("suite reports") {
  Config c = small(scratch("suites"));
  for (const std::string suite : {"branch-points", "pvar-oracle", "circle"}) {
    const auto r = run_suite(suite, c);
    CHECK(r["suite"] == suite);
    CHECK(r["seed"] == 1);
    REQUIRE(!r["criteria"].empty());
    for (const auto& crit : r["criteria"]) {
      CHECK(crit.contains("numbers"));
      CHECK(crit.contains("threshold"));
      CHECK_MESSAGE(crit["pass"].get<bool>(), crit["id"].get<std::string>());
    }
    CHECK(r["pass"].get<bool>());
  }
  CHECK(suite_names().size() == 8);
}

TEST_CASE("command line") {
  std::string out;
  const fs::path dir = scratch("cli");
  CHECK(run_cli("validate pvar-oracle --out " + dir.string(), &out) == 0);
  CHECK(out.find("A8 PASS") != std::string::npos);
  CHECK(fs::exists(dir / "pvar-oracle.json"));
  CHECK(fs::exists(dir / "manifest.json"));

  CHECK(run_cli("validate nonexistent --out " + dir.string(), &out) == 2);
  CHECK(run_cli("map-orbit --set map.alpha=3 --out " + dir.string(), &out) == 2);
  CHECK(run_cli("map-orbit --seed notanumber --out " + dir.string(), &out) == 2);
  CHECK(run_cli("", &out) != 0);

  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "map.orbit_length = 25\nseed = 9\n";
  CHECK(run_cli("map-orbit --config " + cfg.string() + " --out " + (dir / "o1").string(), &out) == 0);
  CHECK(run_cli("map-orbit --config " + cfg.string() + " --seed 9 --out " + (dir / "o2").string(), &out) == 0);
  const std::string a = slurp(dir / "o1" / "orbit.csv");
  CHECK(a == slurp(dir / "o2" / "orbit.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 26);
}
