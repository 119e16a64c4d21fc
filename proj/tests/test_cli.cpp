#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "torsionlab/io.hpp"

using namespace torsionlab;
namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("TORSIONLAB_BIN");
  return b ? b : "./torsionlab";
}

fs::path workdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("torsionlab-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& dir) {
  const std::string cmd = bin() + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

} // namespace

TEST_CASE("version flag") {
  const fs::path d = workdir("version");
  CHECK(run("--version", d) == 0);
  CHECK(io::read_text(d / "stdout.txt").find(kVersionString) != std::string::npos);
}

TEST_CASE("fr on a JSON complex") {
  const fs::path d = workdir("fr");
  io::write_text(d / "c.json", R"({"degrees": [2, 2], "differentials": [[[1,0],[0,0],[0,0],[1,0]]]})");
  REQUIRE(run("fr --input " + (d / "c.json").string() + " --out " + (d / "out").string(), d) == 0);
  const io::json r = io::read_json(d / "out" / "fr.json");
  CHECK(r["log_abs_torsion"].get<double>() == 0.0);
  CHECK(r["schema"] == kSchemaVersion);
  CHECK(r["version"] == kVersionString);

  io::write_text(d / "t.json", R"({"degrees": [1, 1], "differentials": [[[4,0]]]})");
  REQUIRE(run("fr --input " + (d / "t.json").string() + " --out " + (d / "out").string(), d) == 0);
  CHECK_THAT(io::read_json(d / "out" / "fr.json")["log_abs_torsion"].get<double>(),
             Catch::Matchers::WithinAbs(1.3862943611198906, 1e-14));
}

TEST_CASE("circle-bundle report fields") {
  const fs::path d = workdir("circle");
  REQUIRE(run("circle-bundle --euler 3 --root 1/3 --resolution 16 --out " + (d / "out").string(), d) == 0);
  const io::json r = io::read_json(d / "out" / "circle-bundle.json");
  CHECK(r["euler"] == 3);
  CHECK(r["root"] == "1/3");
  CHECK(r["degree"] == 2);
  CHECK_THAT(r["n_im_dilog"].get<double>(), Catch::Matchers::WithinAbs(3 * 0.67662773760643575, 1e-12));
  CHECK(r.contains("integral"));
  CHECK(r["normalization"].contains("kappa"));
}

TEST_CASE("front writes a CSV and plots only on request") {
  const fs::path d = workdir("front");
  REQUIRE(run("front --preset cubic-fold --resolution 21 --out " + (d / "a").string(), d) == 0);
  CHECK(fs::exists(d / "a" / "front.json"));
  CHECK(fs::exists(d / "a" / "front.csv"));
  CHECK_FALSE(fs::exists(d / "a" / "front-cerf.svg"));
  REQUIRE(run("front --preset cubic-fold --resolution 21 --emit-plots --out " + (d / "b").string(), d) == 0);
  CHECK(fs::exists(d / "b" / "front-cerf.svg"));
  const io::json r = io::read_json(d / "b" / "front.json");
  CHECK(r["sheets"] == 2);
  CHECK(r["cusps"].size() == 1);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path d = workdir("determinism");
  const std::string args = "family-torsion --preset sphere2-probe --resolution 12 --threads 1 --out ";
  REQUIRE(run(args + (d / "a").string(), d) == 0);
  REQUIRE(run(args + (d / "b").string(), d) == 0);
  CHECK(io::read_text(d / "a" / "family-torsion.json") == io::read_text(d / "b" / "family-torsion.json"));
}

TEST_CASE("exit codes by error class") {
  const fs::path d = workdir("errors");
  CHECK(run("circle-bundle --root 2/4 --resolution 16 --out " + (d / "out").string(), d) == 2);
  const io::json e = io::read_json(d / "out" / "circle-bundle.error.json");
  CHECK(e["error"]["code"] == "InvalidRoot");
  CHECK(io::read_text(d / "stderr.txt").find("InvalidRoot") != std::string::npos);

  CHECK(run("fr --input " + (d / "missing.json").string() + " --out " + (d / "out").string(), d) == 4);
  CHECK(run("front --preset nope --out " + (d / "out").string(), d) == 2);
  CHECK(run("tube --bogus-flag", d) == 2);
  CHECK(run("", d) == 2);
}

TEST_CASE("config files fill unset flags") {
  const fs::path d = workdir("config");
  io::write_text(d / "cfg.json", R"({"preset": "cubic-fold", "resolution": 31, "action": "classify"})");
  REQUIRE(run("front --config " + (d / "cfg.json").string() + " --resolution 11 --out " + (d / "out").string(), d) == 0);
  const io::json r = io::read_json(d / "out" / "front.json");
  CHECK(r["action"] == "classify");
  CHECK(r["samples"].get<int>() <= 2 * 11);
}

TEST_CASE("charclass reports the Bott integral") {
  const fs::path d = workdir("charclass");
  REQUIRE(run("charclass --preset bott --resolution 48 --out " + (d / "out").string(), d) == 0);
  const io::json r = io::read_json(d / "out" / "charclass.json");
  CHECK(r["ch_degree"] == 2);
  CHECK_THAT(std::abs(r["ch_integral"].get<double>()), Catch::Matchers::WithinAbs(1.0, 2e-3));
  CHECK_THAT(r["zeta3"].get<double>(), Catch::Matchers::WithinAbs(1.2020569031595943, 1e-13));
}
