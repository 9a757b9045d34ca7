#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "biharm/cli.hpp"

using namespace biharm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

config::RunConfig tiny_cfg(const std::string& out) {
  auto cfg = config::RunConfig::from_text(R"(
    operator.N = 9
    grid.n = 401
    family.n_combos = 3
    mc.points = 2000
    spectrum.l_max = 1
    spectrum.modes = 5
    spectrum.refine = false
  )");
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing: values, auto, comments") {
  const auto cfg = config::RunConfig::from_text(R"(
    # comment line
    operator.N = 11
    operator.alpha = 0.5   # trailing comment
    operator.lambda = auto
    grid.r_min = 1e-2
    family.seed = 7
    evolve.scheme = crank-nicolson
    spectrum.dense_oracle = true
  )");
  CHECK(cfg.N == 11);
  CHECK(cfg.alpha == doctest::Approx(0.5));
  CHECK(!cfg.lambda.has_value());
  CHECK(cfg.grid_r_min == doctest::Approx(1e-2));
  CHECK(cfg.seed == 7);
  CHECK(cfg.evolve_scheme == "crank-nicolson");
  CHECK(cfg.spectrum_dense_oracle);
  CHECK_NOTHROW(cfg.validate());

  const auto cfg2 = config::RunConfig::from_text("reverse_holder.q_extra = 3.0, 6.5\n");
  REQUIRE(cfg2.reverse_holder_q_extra.size() == 2);
  CHECK(cfg2.reverse_holder_q_extra[0] == doctest::Approx(3.0));
  CHECK(cfg2.reverse_holder_q_extra[1] == doctest::Approx(6.5));

  const auto cfg3 = config::RunConfig::from_text(
      "family.gauss_p = 4,6\nfamily.gauss_sigma = 0.5,1\nfamily.rational_p = 4\n"
      "family.rational_q_count = 1\n");
  CHECK(cfg3.gauss_p == std::vector<int>{4, 6});
  CHECK(cfg3.gauss_sigma == std::vector<double>{0.5, 1.0});
  CHECK(cfg3.rational_p == std::vector<int>{4});
  CHECK(cfg3.rational_q_count == 1);
  CHECK_THROWS(config::RunConfig::from_text("family.gauss_p = 2\n").validate());
}

TEST_CASE("config parsing: malformed inputs rejected") {
  CHECK_THROWS_AS(config::RunConfig::from_text("operator.N 9\n"), std::invalid_argument);
  CHECK_THROWS_AS(config::RunConfig::from_text("no.such.key = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(config::RunConfig::from_text("operator.alpha = abc\n"), std::invalid_argument);
  CHECK_THROWS_AS(config::RunConfig::from_file("/nonexistent/x.conf"), std::invalid_argument);

  auto cfg = config::RunConfig{};
  cfg.N = 4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = config::RunConfig{};
  cfg.evolve_scheme = "leapfrog";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config: environment overrides") {
  setenv("BIHARMLAB_GRID_N", "777", 1);
  setenv("BIHARMLAB_OPERATOR_BETA", "3.5", 1);
  config::RunConfig cfg;
  cfg.apply_env_overrides();
  CHECK(cfg.grid_n == 777);
  CHECK(cfg.beta == doctest::Approx(3.5));
  unsetenv("BIHARMLAB_GRID_N");
  unsetenv("BIHARMLAB_OPERATOR_BETA");
}

TEST_CASE("config: canonical dump and hash") {
  config::RunConfig a, b;
  CHECK(a.canonical_dump() == b.canonical_dump());
  CHECK(a.config_hash() == b.config_hash());
  b.grid_n = 999;
  CHECK(a.config_hash() != b.config_hash());
}

TEST_CASE("cmd_constants: JSON and CSV numbers byte-consistent") {
  const std::string out = "cli_test_out/constants";
  fs::remove_all(out);
  auto cfg = tiny_cfg(out);
  CHECK(cli::cmd_constants(cfg) == 0);

  const auto js = report::ordered_json::parse(slurp(fs::path(out) / "constants.json"));
  const auto csv = slurp(fs::path(out) / "constants.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "name,value,direction,family_size,grid_fingerprint,stability_delta");
  std::size_t idx = 0;
  std::string line;
  while (std::getline(lines, line)) {
    REQUIRE(idx < js["constants"].size());
    const auto& e = js["constants"][idx];
    const std::string name = e["name"].get<std::string>();
    const std::string value_repr = report::number_repr(e["value"].get<double>());
    CHECK(line.rfind(name + ",", 0) == 0);
    CHECK(line.find("," + value_repr + ",") != std::string::npos);
    ++idx;
  }
  CHECK(idx == js["constants"].size());

  // manifest lists both artifacts with checksums matching the bytes
  const auto manifest = report::ordered_json::parse(slurp(fs::path(out) / "manifest.json"));
  CHECK(manifest["artifacts"].size() == 2);
  for (const auto& a : manifest["artifacts"]) {
    const auto content = slurp(fs::path(out) / a["name"].get<std::string>());
    CHECK(a["checksum"].get<std::string>() == config::hex64(config::fnv1a(content)));
    CHECK(a["bytes"].get<std::size_t>() == content.size());
  }
}

TEST_CASE("cmd_spectrum: artifacts and schema") {
  const std::string out = "cli_test_out/spectrum";
  fs::remove_all(out);
  auto cfg = tiny_cfg(out);
  cfg.spectrum_dense_oracle = true;
  CHECK(cli::cmd_spectrum(cfg) == 0);

  const auto csv = slurp(fs::path(out) / "spectrum.csv");
  CHECK(csv.rfind("l,k,mu,residual,multiplicity\n", 0) == 0);
  const auto js = report::ordered_json::parse(slurp(fs::path(out) / "spectrum.json"));
  CHECK(js["modes"].size() == 10);  // l_max=1, modes=5
  for (const auto& m : js["modes"]) {
    CHECK(m["mu"].get<double>() > 0.0);
    CHECK(m["lambda_generator"].get<double>() == -m["mu"].get<double>());
  }
  CHECK(js["refinement"].contains("dense_oracle_rel_delta"));
  CHECK(js["refinement"]["dense_oracle_rel_delta"].get<double>() <= 1e-8);

  // N=4 rejected as a configuration error
  auto bad = tiny_cfg("cli_test_out/never");
  bad.N = 4;
  CHECK_THROWS_AS(std::ignore = cli::cmd_spectrum(bad), std::invalid_argument);
}

TEST_CASE("cmd_evolve: trajectory artifact, zero data, lambda fallback") {
  const std::string out = "cli_test_out/evolve";
  fs::remove_all(out);
  auto cfg = tiny_cfg(out);  // lambda unset: falls back to computed lambda0
  CHECK(cli::cmd_evolve(cfg) == 0);
  const auto csv = slurp(fs::path(out) / "trajectory.csv");
  CHECK(csv.rfind("t,norm,energy\n", 0) == 0);
  const auto js = report::ordered_json::parse(slurp(fs::path(out) / "evolve_report.json"));
  CHECK(js["lambda"].get<double>() > 0.0);  // computed lambda0
  CHECK(js["trajectories"][0]["contraction_pass"].get<bool>());

  auto zero = tiny_cfg(out + "_zero");
  zero.evolve_initial = "zero";
  CHECK(cli::cmd_evolve(zero) == 0);
}

TEST_CASE("run_cli: exit codes for usage and config errors") {
  {
    const char* argv[] = {"biharmlab"};
    CHECK(cli::run_cli(1, const_cast<char**>(argv)) == 2);  // missing subcommand
  }
  {
    const char* argv[] = {"biharmlab", "verify", "--config", "/nonexistent/x.conf"};
    CHECK(cli::run_cli(4, const_cast<char**>(argv)) == 2);
  }
  {
    const char* argv[] = {"biharmlab", "frobnicate"};
    CHECK(cli::run_cli(2, const_cast<char**>(argv)) == 2);
  }
}

TEST_CASE("run_cli: --seed override changes the recorded run id") {
  const std::string out1 = "cli_test_out/seed_a", out2 = "cli_test_out/seed_b";
  fs::remove_all(out1);
  fs::remove_all(out2);
  // constants is the cheapest artifact-producing subcommand
  std::ofstream("cli_test_out_seed.conf") << "grid.n = 401\nfamily.n_combos = 2\nmc.points = "
                                             "2000\nspectrum.refine = false\n";
  auto run = [&](const std::string& out, const char* seed) {
    const char* argv[] = {"biharmlab", "constants",        "--config", "cli_test_out_seed.conf",
                          "--out",     out.c_str(),        "--seed",   seed};
    return cli::run_cli(8, const_cast<char**>(argv));
  };
  CHECK(run(out1, "1") == 0);
  CHECK(run(out2, "2") == 0);
  const auto m1 = report::ordered_json::parse(slurp(fs::path(out1) / "manifest.json"));
  const auto m2 = report::ordered_json::parse(slurp(fs::path(out2) / "manifest.json"));
  CHECK(m1["run_id"].get<std::string>() != m2["run_id"].get<std::string>());
}

TEST_CASE("cmd_form_check and determinism of verify JSON across thread counts") {
  auto cfg = tiny_cfg("cli_test_out/form");
  fs::remove_all(cfg.out_dir);
  CHECK(cli::cmd_form_check(cfg) == 0);

  auto a = tiny_cfg("cli_test_out/det_a");
  auto b = tiny_cfg("cli_test_out/det_b");
  fs::remove_all(a.out_dir);
  fs::remove_all(b.out_dir);
  b.threads = 3;  // fixed-slot parallel map keeps results bit-identical
  CHECK(cli::cmd_form_check(a) == 0);
  CHECK(cli::cmd_form_check(b) == 0);
  CHECK(slurp(fs::path(a.out_dir) / "form_report.json") ==
        slurp(fs::path(b.out_dir) / "form_report.json"));
}
