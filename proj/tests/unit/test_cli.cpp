#include "toeplitz/cli.hpp"
#include "toeplitz/holewords.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace toeplitz;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "toeplitz_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("gen prints x on the range") {
  const auto r = call({"gen", "--word", "a?b?c", "--range=-10:10"});
  REQUIRE(r.code == cli::kOk);
  const std::string line = r.out.substr(0, r.out.find('\n'));
  REQUIRE(line.size() == 20);
  const ConstantWordSystem sys(HoleWord::parse("a?b?c"), 8);
  for (std::int64_t i = -10; i < 10; ++i) CHECK(line[static_cast<std::size_t>(i + 10)] == sys.evaluate(i));

  const auto j = call({"gen", "--word", "a?b?c", "--range=-3:3", "--json"});
  REQUIRE(j.code == cli::kOk);
  const auto doc = json::parse(j.out);
  CHECK(doc["symbols"] == line.substr(7, 6));
  CHECK(doc["start"] == -3);
}

TEST_CASE("usage errors and help") {
  CHECK(call({}).code == cli::kUsage);
  CHECK(call({"bogus"}).code == cli::kUsage);
  CHECK(call({"gen", "--word", "a?b", "--range", "5"}).code == cli::kUsage);
  CHECK(call({"phi"}).code == cli::kUsage);
  const auto bad = call({"gen", "--word", "???"});
  CHECK(bad.code == cli::kUsage);
  CHECK_FALSE(bad.err.empty());
  const auto help = call({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("verify-all") != std::string::npos);
}

TEST_CASE("complexity csv is monotone") {
  const auto r = call({"complexity", "--word", "a?b?c", "--nmax", "60", "--csv", "-"});
  REQUIRE(r.code == cli::kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,p_X,certification");
  std::uint64_t last = 0, rows = 0;
  while (std::getline(in, line) && !line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) {
    const auto a = line.find(','), b = line.find(',', a + 1);
    const std::uint64_t v = std::stoull(line.substr(a + 1, b - a - 1));
    if (rows > 0) CHECK(v > last);
    last = v;
    ++rows;
  }
  CHECK(rows == 61);
}

TEST_CASE("complexity json reports the fit") {
  const auto r = call({"complexity", "--word", "a?b?c", "--nmax", "200", "--fit", "50:200"});
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["monotone"] == true);
  CHECK(j["fit"]["slope"].get<double>() > 1.55);
  CHECK(j["fit"]["slope"].get<double>() < 1.95);
}

TEST_CASE("phi certificate") {
  const auto r = call({"phi", "--word", "a?b?c", "--level", "2", "--verify"});
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["radius"] == 8);
  CHECK(j["p_n"] == 25);
  CHECK(j["q_n"] == 4);
  CHECK(j["identity_checked"] == true);
  CHECK(j["identity_holds"] == true);
  CHECK(j["factors_tested"].get<std::uint64_t>() > 0);
}

TEST_CASE("roots") {
  const auto r = call({"roots", "--word", "a?b?c", "--level", "1"});
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["a"] == 1);
  CHECK(j["b"] == 2);
  CHECK(j["order"] == 2);
  CHECK(j["certified"] == true);
}

TEST_CASE("odometer and blocks subcommands") {
  const auto o = call({"odometer", "--scale", "times:3:2:6"});
  REQUIRE(o.code == cli::kOk);
  CHECK(json::parse(o.out).is_object());
  const auto b = call({"blocks", "--k1", "4", "--levels", "3"});
  REQUIRE(b.code == cli::kOk);
  CHECK(json::parse(b.out)["ok"] == true);
  CHECK(call({"blocks", "--d0", "1"}).code == cli::kUsage);
}

TEST_CASE("realize writes a spec that gen can load") {
  const auto path = scratch("z2_z6.json");
  const auto r = call({"realize", "--d", "2", "--a", "6", "--depth", "3", "--out", path.string(), "--check"});
  REQUIRE(r.code == cli::kOk);
  REQUIRE(std::filesystem::exists(path));
  const auto g = call({"gen", "--spec", path.string(), "--range=0:30"});
  REQUIRE(g.code == cli::kOk);
  CHECK(g.out.substr(0, g.out.find('\n')).size() == 30);
  CHECK(call({"gen", "--spec", path.string(), "--word", "a?b"}).code == cli::kUsage);

  std::ofstream(scratch("bad.json")) << R"({"kind":"torus"})";
  const auto bad = call({"gen", "--spec", scratch("bad.json").string()});
  CHECK(bad.code == cli::kUsage);
  CHECK(bad.err.find("unknown spec kind") != std::string::npos);
  std::filesystem::remove_all(path.parent_path());
}

TEST_CASE("verify-all is deterministic") {
  const std::vector<std::string> args{"verify-all", "--word", "a?b?c", "--levels", "2", "--trials", "20"};
  const auto a = call(args);
  const auto b = call(args);
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j["ok"] == true);
  CHECK(j["levels"] == 2);
  CHECK_FALSE(j["checks"].empty());
  const auto c = call({"verify-all", "--word", "a?b?c", "--levels", "2", "--trials", "20", "--seed", "7"});
  CHECK(c.code == cli::kOk);
}

TEST_CASE("memory budget option") {
  const auto r = call({"--mem-budget", "1024", "complexity", "--word", "a?b?c", "--nmax", "300"});
  CHECK(r.code != cli::kOk);
  CHECK_FALSE(r.err.empty());
}
