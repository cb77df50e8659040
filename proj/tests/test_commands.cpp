#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coagflux/commands.hpp"
#include "coagflux/config.hpp"

using namespace coagflux;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("coagflux_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  for (std::string l; std::getline(s, l);) out.push_back(l);
  return out;
}

std::vector<double> row(const std::string& line) {
  std::vector<double> v;
  std::stringstream s(line);
  for (std::string cell; std::getline(s, cell, ',');) v.push_back(std::stod(cell));
  return v;
}

const char* kSmall =
    "[grid]\nx_min = 1e-3\nx_max = 1e3\nbins_per_decade = 6\n"
    "[source]\nepsilon = 1e-3\nsnap_to_pivot = true\n"
    "[control]\nhorizon = 0.5\n";

ScenarioConfig small() { return parse_config(kSmall).config; }

}  // namespace

TEST_CASE("zero horizon writes single-sample files") {
  ScenarioConfig c = small();
  c.horizon = 0.0;
  const fs::path out = scratch("t0");
  CHECK(cmd_run(c, out) == 0);
  const auto m = lines(read(out / "moments.csv"));
  REQUIRE(m.size() == 2);
  CHECK(m[0] == "t,M0,M1,Mgl,Mml,leaked,injected");
  CHECK(fs::exists(out / "spectrum_0.csv"));
  CHECK_FALSE(fs::exists(out / "spectrum_1.csv"));
  CHECK(lines(read(out / "flux.csv"))[0] == "t,z,J,Jint,J1,J2,J3");
  fs::remove_all(out);
}

TEST_CASE("moments file replays the mass budget") {
  const fs::path out = scratch("budget");
  REQUIRE(cmd_run(small(), out) == 0);
  const auto m = lines(read(out / "moments.csv"));
  REQUIRE(m.size() == 202);
  for (std::size_t k = 1; k < m.size(); ++k) {
    const auto r = row(m[k]);
    // t, M0, M1, Mgl, Mml, leaked, injected
    CHECK(r[2] + r[5] == doctest::Approx(r[6]).epsilon(1e-8));
    CHECK(r[6] == doctest::Approx(r[0]).epsilon(1e-12));
  }
  // 17 significant digits.
  CHECK(m[201].find("0.5,") == 0);
  fs::remove_all(out);
}

TEST_CASE("identical configs give byte-identical outputs") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  cmd_run(small(), a);
  cmd_run(small(), b);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    CHECK(read(entry.path()) == read(b / entry.path().filename()));
  }
  CHECK(files > 4);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("verify writes a report and returns its status") {
  const fs::path out = scratch("verify");
  std::ostringstream log;
  CHECK(cmd_verify(small(), out, log) == 0);
  const std::string report = read(out / "verify.json");
  CHECK(report.find("\"name\"") != std::string::npos);
  CHECK(report.find("\"pass\": false") == std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("oracle comparison") {
  ScenarioConfig c = small();
  c.kernel = KernelSpec::power_pair(0.5, -0.25, 1, 1);
  CHECK_THROWS_AS(oracle_compare(c), std::invalid_argument);

  c = small();
  const auto cmp = oracle_compare(c);
  CHECK(cmp.worst_transform < 2e-2);
  CHECK_FALSE(cmp.records.empty());
}

TEST_CASE("sweep axes") {
  const auto axis = parse_sweep_axis("kernel.gamma=0,0.25");
  CHECK(axis.key == "kernel.gamma");
  CHECK(axis.values == std::vector<std::string>{"0", "0.25"});
  CHECK_THROWS(parse_sweep_axis("kernel.gamma"));
  CHECK_THROWS(parse_sweep_axis("kernel.gamma="));
  const auto points = sweep_points({axis, parse_sweep_axis("control.safety=0.1,0.2,0.3")});
  REQUIRE(points.size() == 6);
  CHECK(points[1][1].second == "0.2");
  CHECK(points[3][0].second == "0.25");
}

TEST_CASE("sweep output does not depend on the thread count") {
  const std::string text = std::string(kSmall) + "[kernel]\nkind = power_pair\n";
  const std::vector<SweepAxis> axes = {parse_sweep_axis("kernel.lambda=0,0.25"),
                                       parse_sweep_axis("control.horizon=0.1,0.2")};
  const fs::path one = scratch("sweep1"), three = scratch("sweep3");
  std::ostringstream log;
  CHECK(cmd_sweep(text, axes, one, 1, false, log) == 0);
  CHECK(cmd_sweep(text, axes, three, 3, false, log) == 0);
  const std::string index = read(one / "index.csv");
  CHECK(index == read(three / "index.csv"));
  CHECK(lines(index).size() == 5);
  CHECK(lines(index)[0] == "index,directory,kernel.lambda,control.horizon,status");
  for (int k = 0; k < 4; ++k) {
    const std::string dir = "point_000" + std::to_string(k);
    CHECK(read(one / dir / "moments.csv") == read(three / dir / "moments.csv"));
    CHECK(read(one / dir / "verify.json") == read(three / dir / "verify.json"));
  }
  // A bad point is reported, the rest still run.
  const fs::path bad = scratch("sweep_bad");
  CHECK(cmd_sweep(text, {parse_sweep_axis("kernel.lambda=0,1.5")}, bad, 2, false, log) == 1);
  CHECK(lines(read(bad / "index.csv"))[2].find("error") != std::string::npos);
  fs::remove_all(one);
  fs::remove_all(three);
  fs::remove_all(bad);
}
