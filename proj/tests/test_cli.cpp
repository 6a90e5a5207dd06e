#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dpspin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = dpspin::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) { return std::string(DPSPIN_FIXTURE_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("dpspin_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("validate reports and exit codes") {
  const auto ok = run({"validate", fixture("m1.json")});
  CHECK(ok.code == 0);
  const auto doc = nlohmann::json::parse(ok.out);
  CHECK(doc.at("valid").get<bool>());

  const auto bad = temp_file("bad.json", R"({"dimension": 1, "period": 1, "num_phases": 1, "labels": {"0": 1},
    "strong_bonds": [{"from": "0", "offset": [1], "weight": "-1"}, {"from": "0", "offset": [-1], "weight": "-1"}]})");
  const auto invalid = run({"validate", bad});
  CHECK(invalid.code == 1);
  CHECK(invalid.out.find("strong-positivity") != std::string::npos);

  CHECK(run({"validate", fixture("missing.json")}).code == 1);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"fhom", fixture("m1.json")}).code == 2);
  CHECK(run({"fhom", fixture("m1.json"), "--normal", "1", "--T", "x"}).code == 2);
  CHECK(run({"fhom", fixture("m1.json"), "--normal", "1,0", "--T", "2,4"}).code == 2);
  CHECK(run({"phi", fixture("m1.json"), "--M", "4", "--format", "xml"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("phi converges toward the chain density") {
  const auto r = run({"phi", fixture("m1.json"), "--z", "-1", "--M", "4,8,16"});
  REQUIRE(r.code == 0);
  const auto lines = csv_lines(r.out);
  REQUIRE(lines.size() >= 4);
  CHECK(lines[0].find("phi") != std::string::npos);
  // phi_M = 1.4 - 0.4 / M
  CHECK(r.out.find("1.375") != std::string::npos);
  CHECK(r.out.find("1.35") != std::string::npos);
}

TEST_CASE("fhom on the fig8 lattice") {
  const auto r = run({"fhom", fixture("fig8.json"), "--phase", "1", "--normal", "1,0", "--T", "8,16,32", "--format",
                      "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("rows").at(0).at("estimate") == "0.5");
}

TEST_CASE("output is byte-identical across runs and thread counts") {
  const std::vector<std::string> args{"phi", fixture("island.json"), "--M", "5,8,10", "--format", "json"};
  const auto a = run(args);
  auto more = args;
  more.insert(more.end(), {"--jobs", "3"});
  const auto b = run(more);
  REQUIRE(a.code == 0);
  CHECK(a.out == run(args).out);
  CHECK(a.out == b.out);

  const auto out_path = (std::filesystem::temp_directory_path() / "dpspin_test_out.csv").string();
  auto to_file = std::vector<std::string>{"components", fixture("fig9.json"), "--format", "csv", "--out", out_path};
  CHECK(run(to_file).code == 0);
  std::ifstream in(out_path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str() == run({"components", fixture("fig9.json"), "--format", "csv"}).out);
}

TEST_CASE("energy, extend, gamma-eval and converge") {
  const auto field = temp_file("field.json", R"({"eps": "1/32", "domain": {"lo": [0], "hi": [1]}, "rle": [[-1, 16], [1, 15]]})");
  const auto e = run({"energy", fixture("m1.json"), field, "--format", "json"});
  REQUIRE(e.code == 0);
  CHECK(nlohmann::json::parse(e.out).dump().find("2.0125") != std::string::npos);

  const auto out_field = (std::filesystem::temp_directory_path() / "dpspin_test_extended.json").string();
  const auto x = run({"extend", fixture("m1.json"), field, "--phase", "1", "--M", "4", "--field-out", out_field});
  CHECK(x.code == 0);
  CHECK(std::filesystem::exists(out_field));
  CHECK(run({"extend", fixture("m1.json"), field, "--phase", "1", "--M", "3"}).code != 0);

  const auto g = run({"gamma-eval", fixture("fig8.json"), fixture("fig8_target.json"), "--T", "8,16", "--Mphi", "8,16"});
  CHECK(g.code == 0);

  const auto c = run({"converge", fixture("m1.json"), fixture("m1_jump_target.json"), "--eps", "1/32,1/64", "--M", "8",
                      "--T", "2,4", "--Mphi", "16,32"});
  CHECK(c.code == 0);
  CHECK(csv_lines(c.out).size() >= 3);
  CHECK(run({"converge", fixture("m1.json"), fixture("m1_jump_target.json"), "--eps", "1/64,1/32", "--M", "8"}).code != 0);
}

TEST_CASE("bundled examples all pass") {
  const auto r = run({"examples"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(csv_lines(r.out).size() == 23);
}
