#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "epath/cli.hpp"
#include "epath/io.hpp"

using namespace epath::cli;
namespace fs = std::filesystem;

namespace {

bool has(const std::vector<Diagnostic>& d, const std::string& key, const std::string& text) {
  return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) {
    return x.key == key && x.message.find(text) != std::string::npos;
  });
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("epath_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("defaults are complete and valid") {
  RunConfig c;
  CHECK(validate(c).empty());
  CHECK(c.get("experiment") == "carrier");
  CHECK(c.get_int("lattice.n") == 10);
  CHECK(c.get_int("construction.M") == 20);
  CHECK(c.threads() == 1);
  CHECK(c.get_real_list("propagate.rays").size() == 11);
}

TEST_CASE("text config, comments and overrides") {
  RunConfig c;
  c.load_text("# lattice\nlattice.n = 50\nexperiment=propagate  # inline\n\n");
  c.apply_override("lattice.n=20");
  CHECK(c.get_int("lattice.n") == 20);
  CHECK(c.experiment() == Experiment::Propagate);
  c.apply_override("threads=auto");
  CHECK(c.threads() == 0);
  CHECK_THROWS_AS(c.apply_override("no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(c.load_text("lattice.n\n"), ConfigError);
  CHECK(c.to_text().find("lattice.n = 20\n") != std::string::npos);
}

TEST_CASE("lists and ranges") {
  RunConfig c;
  c.set("chessboard.eps_m", "0.05, 0.1,0.3");
  CHECK(c.get_real_list("chessboard.eps_m") == std::vector<double>{0.05, 0.1, 0.3});
  c.set("propagate.rays", "-0.1:0.1:0.1");
  const auto r = c.get_real_list("propagate.rays");
  REQUIRE(r.size() == 3);
  CHECK(r[1] == doctest::Approx(0.0));
}

TEST_CASE("validate names every violation") {
  RunConfig c;
  c.set("lattice.n", "0");
  c.set("lattice.mass_scale", "-1");
  c.set("experiment", "propagate");
  c.set("propagate.rays", "0.2,1.5");
  const auto d = validate(c);
  CHECK(has(d, "lattice.n", "n must be positive"));
  CHECK(has(d, "lattice.mass_scale", "mass must be positive"));
  CHECK(has(d, "propagate.rays", "superluminal drift"));

  RunConfig typed;
  typed.set("bogus.key", "1");
  typed.set("lattice.n", "ten");
  typed.set("experiment", "nope");
  const auto t = validate(typed);
  CHECK(has(t, "bogus.key", "unknown key"));
  CHECK(has(t, "lattice.n", "integer"));
  CHECK(has(t, "experiment", "unknown value"));

  RunConfig ring;
  ring.set("experiment", "ring");
  ring.set("ring.speed_factor", "3");
  CHECK(has(validate(ring), "ring.v", "superluminal drift"));
  ring.set("ring.speed_factor", "1");
  ring.set("ring.circumference", "1");
  CHECK(has(validate(ring), "ring.v", "relativistic eigen speed"));

  RunConfig board;
  board.set("experiment", "chessboard");
  board.set("chessboard.n_steps", "30");
  CHECK(has(validate(board), "chessboard.n_steps", "enumeration too large"));
}

TEST_CASE("run refuses an invalid config with exit code 2") {
  RunConfig c;
  c.set("lattice.n", "-3");
  c.set("output_dir", scratch("invalid").string());
  std::ostringstream log;
  CHECK(run(c, log) == 2);
  CHECK(log.str().find("n must be positive") != std::string::npos);
  CHECK_FALSE(fs::exists(c.get("output_dir")));
}

TEST_CASE("a run writes its artifacts and a checksummed manifest") {
  const fs::path out = scratch("carrier");
  RunConfig c;
  c.set("output_dir", out.string());
  std::ostringstream log;
  REQUIRE(run(c, log) == 0);
  for (const auto& name : artifact_names(Experiment::Carrier)) CHECK(fs::exists(out / name));
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["experiment"] == "carrier");
  CHECK(manifest["config"]["lattice.n"] == "10");
  REQUIRE(manifest["artifacts"].size() == artifact_names(Experiment::Carrier).size());
  for (const auto& a : manifest["artifacts"]) {
    CHECK(epath::io::sha256_file(out / a["file"].get<std::string>()) == a["sha256"]);
  }

  // Replaying the manifest reproduces every checksum.
  const fs::path again = scratch("carrier_replay");
  RunConfig replay;
  replay.load_file(out / "manifest.json");
  replay.set("output_dir", again.string());
  REQUIRE(run(replay, log) == 0);
  for (const auto& a : manifest["artifacts"]) {
    CHECK(epath::io::sha256_file(again / a["file"].get<std::string>()) == a["sha256"]);
  }
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST_CASE("chessboard table agrees across methods") {
  const fs::path out = scratch("chessboard");
  RunConfig c;
  c.set("experiment", "chessboard");
  c.set("chessboard.n_steps", "8");
  c.set("output_dir", out.string());
  std::ostringstream log;
  REQUIRE(run(c, log) == 0);
  const std::string summary = slurp(out / "summary.txt");
  CHECK(summary.find("exact_all_agree = true") != std::string::npos);
  const std::string table = slurp(out / "kernel_table.csv");
  CHECK(table.rfind("eps_m,n_steps,displacement,initial,final,paths,", 0) == 0);
  CHECK(table.find(",false\n") == std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("sha256 of a known string") {
  CHECK(epath::io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(epath::io::format_real(0.1) == "0.1");
  CHECK(epath::io::format_real(-2.0) == "-2");
}
