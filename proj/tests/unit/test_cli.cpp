#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "saltus/cli.hpp"
#include "saltus/errors.hpp"

namespace fs = std::filesystem;
using namespace saltus;
using nlohmann::ordered_json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "saltus");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("saltus_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("saltus_cfg_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("srb on the builtin tent: node values are 1/2") {
  const auto dir = fresh_dir("srb");
  const auto r = run_cli({"srb", "--config", "builtin:tent", "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "srb.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind,index,x,value");
  int nodes = 0;
  while (std::getline(in, line)) {
    if (!line.starts_with("node,")) continue;
    ++nodes;
    const double v = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(std::fabs(v - 0.5) <= 1e-6);
  }
  CHECK(nodes == 4097);
  CHECK(fs::exists(dir / "srb_summary.csv"));
}

TEST_CASE("invalid config: odd grid gives exit 2 and no artifacts") {
  const auto dir = fresh_dir("odd");
  const auto r = run_cli({"srb", "--config", "tent", "--grid", "1001", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir));
  const auto err = ordered_json::parse(r.err);
  CHECK(err["error"] == "validation");
  CHECK(err["message"].get<std::string>().find("even") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  const auto cfg = write_config("det", R"({"family": {"kind": "additive", "base": "skew_tent 1.9"},
    "observable": "monomial 1", "grid_size": 512, "n_orbits": 4, "orbit_len": 2000, "burn_in": 10})");
  for (const char* fmt : {"csv", "json"}) {
    const auto a = fresh_dir(std::string("det_a_") + fmt), b = fresh_dir(std::string("det_b_") + fmt);
    REQUIRE(run_cli({"srb", "--config", cfg.string(), "--seed", "9", "--format", fmt, "--out", a.string()}).code == 0);
    REQUIRE(run_cli({"srb", "--config", cfg.string(), "--seed", "9", "--format", fmt, "--out", b.string()}).code == 0);
    for (const auto& e : fs::directory_iterator(a)) {
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }
  }
}

TEST_CASE("response on tent-bump") {
  const auto dir = fresh_dir("resp");
  const auto r = run_cli({"response", "--config", "tent-bump", "--grid", "1024", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = ordered_json::parse(slurp(dir / "response.json"));
  CHECK(std::fabs(j["formula_value"].get<double>() - 1.0 / 6.0) <= 2e-3);
  CHECK(std::fabs(j["fd_value"].get<double>() - 1.0 / 6.0) <= 2e-3);
  CHECK(j["ground_truth"].get<double>() == doctest::Approx(1.0 / 6.0));
  CHECK(j.contains("fd"));
}

TEST_CASE("unknown keys and names are validation errors") {
  CHECK(run_cli({"srb", "--config", write_config("k", R"({"gridsize": 64})").string()}).code == 2);
  CHECK(run_cli({"srb", "--config", write_config("n", R"({"observable": "nope"})").string()}).code == 2);
  CHECK(run_cli({"srb", "--config", write_config("m", R"({"family": {"base": "logistic"}})").string()}).code == 2);
  CHECK(run_cli({"srb", "--config", write_config("d", R"({"deltas": [0.01, 0.02]})").string()}).code == 2);
  CHECK(run_cli({"srb", "--config", "/nonexistent/config.json"}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"srb", "--format", "xml"}).code == 2);
}

TEST_CASE("non-horizontal direction: response is a validation error") {
  const auto cfg = write_config("nh", R"({"family": {"kind": "additive", "base": "tent", "X": "poly 1 1"},
    "grid_size": 256})");
  const auto dir = fresh_dir("nh");
  const auto r = run_cli({"response", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("norms on a sample file") {
  const auto samples = fs::temp_directory_path() / "saltus_samples.txt";
  std::ofstream(samples) << "0, 1\n0 1\n";
  const auto cfg = write_config("norms", R"({"samples": ")" + samples.string() + R"(", "p_values": [1, 2]})");
  const auto dir = fresh_dir("norms");
  REQUIRE(run_cli({"norms", "--config", cfg.string(), "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "norms.csv") == "p,var_p,bvp_norm\n1,3,4\n2,1.7320508075688772,2\n");
}

TEST_CASE("config parsing") {
  const auto f = cli::parse_function(ordered_json("skew_tent 1.9"));
  CHECK(f.name == "skew_tent");
  CHECK(f.params == std::vector<double>{1.9});
  const auto g = cli::parse_function(ordered_json{{"name", "poly"}, {"params", {1, 2}}});
  CHECK(g.params.size() == 2);
  CHECK_THROWS_AS(cli::parse_function(ordered_json("bump x")), ValidationError);
  const auto names = cli::builtin_names();
  CHECK(names == std::vector<std::string>{"tent", "tent-bump", "skew-1.9", "tangent-pair"});
  for (const auto& n : names) {
    auto c = cli::parse_config(cli::builtin_config(n));
    c.command = "srb";
    CHECK_NOTHROW(cli::validate(c));
  }
}

TEST_CASE("csv number formatting round-trips") {
  CHECK(cli::csv_number(0.1) == "0.10000000000000001");
  CHECK(cli::csv_number(0.5) == "0.5");
  CHECK(std::stod(cli::csv_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("executable reports exit codes") {
  const char* tool = std::getenv("SALTUS_TOOL");
  if (!tool) return;
  const std::string cmd = std::string(tool) + " srb --grid 7 --out " +
                          fresh_dir("exe").string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 2);
}
