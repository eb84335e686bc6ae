#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "wavelab/experiments.hpp"
#include "wavelab/grids.hpp"
#include "wavelab/io.hpp"
#include "wavelab/kernel_operator.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/resolvent.hpp"

using namespace wavelab;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("toml subset parser") {
  const auto t = io::parse_toml(
      "# comment\n"
      "top = 1.5\n"
      "[potential]\n"
      "kind = \"ball-well\"  # trailing\n"
      "depth = -0.4\n"
      "flag = true\n"
      "lams = [1.0, 2.5, 4]\n");
  CHECK(io::get_number(t, "top", 0.0) == 1.5);
  CHECK(io::get_string(t, "potential.kind", "") == "ball-well");
  CHECK(io::get_number(t, "potential.depth", 0.0) == -0.4);
  CHECK(std::get<bool>(t.at("potential.flag")));
  CHECK(io::get_array(t, "potential.lams", {}) == std::vector<double>{1.0, 2.5, 4.0});
  CHECK_THROWS(io::parse_toml("no equals sign here"));
}

TEST_CASE("canonical config hashing is order independent and value sensitive") {
  io::TomlTable a{{"b.x", 1.0}, {"a.y", std::string("s")}};
  io::TomlTable b{{"a.y", std::string("s")}, {"b.x", 1.0}};
  CHECK(io::hash_hex(io::canonical_config(a)) == io::hash_hex(io::canonical_config(b)));
  b["b.x"] = 2.0;
  CHECK(io::hash_hex(io::canonical_config(a)) != io::hash_hex(io::canonical_config(b)));
}

TEST_CASE("csv formatting is fixed width scientific") {
  io::CsvWriter csv({"a", "b"});
  csv.add_row({1.0, -0.5});
  CHECK(csv.str() == "a,b\n1.000000000000e+00,-5.000000000000e-01\n");
}

TEST_CASE("operator dump round trip") {
  const auto grid = make_radial_grid(2.0, 40);
  const auto op = resolvent::assemble_R0(grid, SpectralPoint{1.5, 0.1, +1});
  const std::string base = (std::filesystem::temp_directory_path() / "wavelab_op").string();
  op.save(base);
  const auto back = KernelOperator::load(base);
  CHECK((back.entries() - op.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.spectral_point().lambda == op.spectral_point().lambda);
  CHECK(back.norm_tag() == op.norm_tag());
  CHECK(back.weights() == op.weights());
}

TEST_CASE("parallel_for is deterministic across worker counts") {
  std::vector<double> one(100), four(100);
  parallel_for(100, 1, [&](std::size_t i) { one[i] = std::sqrt(static_cast<double>(i)); });
  parallel_for(100, 4, [&](std::size_t i) { four[i] = std::sqrt(static_cast<double>(i)); });
  CHECK(one == four);
}

TEST_CASE("experiment runner") {
  io::TomlTable config{
      {"potential.kind", std::string("ball-well")}, {"potential.radius", 1.0},
      {"potential.depth", -0.4},                    {"potential.split_radius", 2.0},
      {"grid.r_max", 8.0},                          {"grid.nodes", 120.0},
  };
  const auto tmp = std::filesystem::temp_directory_path();

  SUBCASE("unknown subcommand is refused") {
    const auto res = experiments::run("frobnicate", config, (tmp / "wx").string());
    CHECK(res.exit_code == 2);
  }

  SUBCASE("hypotheses run writes artifacts and a manifest") {
    const auto dir = (tmp / "wavelab_h1").string();
    const auto res = experiments::run("hypotheses", config, dir);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.artifacts.size() == 1);
    CHECK(std::filesystem::exists(dir + "/hypotheses.json"));
    CHECK(std::filesystem::exists(dir + "/manifest.json"));
    const std::string body = slurp(dir + "/hypotheses.json");
    CHECK(body.find(res.config_hash) != std::string::npos);
  }

  SUBCASE("reruns reproduce bytes and hashes exactly") {
    const auto d1 = (tmp / "wavelab_d1").string();
    const auto d2 = (tmp / "wavelab_d2").string();
    const auto r1 = experiments::run("resonance-scan", config, d1);
    const auto r2 = experiments::run("resonance-scan", config, d2);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(r1.config_hash == r2.config_hash);
    CHECK(r1.content_hash == r2.content_hash);
    CHECK(slurp(d1 + "/resonance_scan.csv") == slurp(d2 + "/resonance_scan.csv"));
  }

  SUBCASE("jobs do not change the artifact bytes") {
    io::TomlTable c = config;
    c["scan.lambdas"] = std::vector<double>{1.0, 2.0, 4.0};
    const auto d1 = (tmp / "wavelab_j1").string();
    const auto d2 = (tmp / "wavelab_j2").string();
    const auto r1 = experiments::run("spectral-measure", c, d1, 1);
    const auto r2 = experiments::run("spectral-measure", c, d2, 3);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(r1.content_hash == r2.content_hash);
  }

  SUBCASE("malformed potential kind fails with a message") {
    io::TomlTable bad = config;
    bad["potential.kind"] = std::string("cube-well");
    const auto res = experiments::run("kato-norm", bad, (tmp / "wavelab_b").string());
    CHECK(res.exit_code == 1);
    CHECK(!res.message.empty());
  }
}

TEST_CASE("json config loading") {
  const auto tmp = std::filesystem::temp_directory_path() / "wavelab_cfg.json";
  {
    std::ofstream f(tmp);
    f << R"({"potential": {"kind": "gaussian", "width": 1.0, "amplitude": -0.2},
             "grid": {"r_max": 8.0, "nodes": 100}})";
  }
  const auto cfg = io::load_config(tmp.string());
  CHECK(io::get_string(cfg, "potential.kind", "") == "gaussian");
  CHECK(io::get_number(cfg, "grid.nodes", 0.0) == 100.0);
}

TEST_CASE("cli-level trivial runs") {
  const auto tmp = std::filesystem::temp_directory_path();

  SUBCASE("zero potential passes every hypothesis margin") {
    io::TomlTable cfg{{"potential.kind", std::string("zero")},
                      {"grid.r_max", 6.0},
                      {"grid.nodes", 80.0}};
    const auto dir = (tmp / "wavelab_zero").string();
    const auto res = experiments::run("hypotheses", cfg, dir);
    REQUIRE(res.exit_code == 0);
    std::ifstream f(dir + "/hypotheses.json");
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string body = ss.str();
    CHECK(body.find("\"ok\": true") != std::string::npos);
    CHECK(body.find("\"ok\": false") == std::string::npos);
  }

  SUBCASE("near-critical well produces a dip artifact with exit 0") {
    io::TomlTable cfg{{"potential.kind", std::string("ball-well")},
                      {"potential.radius", 1.0},
                      {"potential.depth", -M_PI * M_PI / 4.0},
                      {"grid.r_max", 1.5},
                      {"grid.nodes", 150.0},
                      {"scan.lambdas", std::vector<double>{0.0, 0.5, 1.0, 2.0}}};
    const auto dir = (tmp / "wavelab_dip").string();
    const auto res = experiments::run("resonance-scan", cfg, dir);
    REQUIRE(res.exit_code == 0);
    std::ifstream f(dir + "/resonance_dips.json");
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str().find("\"lambda\"") != std::string::npos);  // at least one dip entry
  }
}

TEST_CASE("cartesian grid geometry invariants") {
  const auto g = make_cartesian_grid(2.0, 11);
  CHECK(g.h * static_cast<double>(g.count_per_axis - 1) == doctest::Approx(4.0));
  // nodes come in +/- pairs: the sum over all coordinates vanishes
  double sx = 0, sy = 0, sz = 0;
  for (const auto& p : g.nodes) {
    sx += p[0];
    sy += p[1];
    sz += p[2];
  }
  CHECK(std::abs(sx) < 1e-9);
  CHECK(std::abs(sy) < 1e-9);
  CHECK(std::abs(sz) < 1e-9);
  CHECK_THROWS(make_cartesian_grid(2.0, 10));  // even counts break the symmetry
}
