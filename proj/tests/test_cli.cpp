#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TICHAIN_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json run_json(const std::string& args, int expect_code = 0) {
  auto r = run("--reproducible " + args);
  CAPTURE(args);
  CHECK(r.code == expect_code);
  return nlohmann::json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("tichain_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("marginal commands") {
  const auto loop = temp_file("loop.json", R"({"d": 2, "n": 2, "probs": [0, 0.5, 0.5, 0]})");
  const auto prod = temp_file("prod.json", R"({"d": 2, "n": 2, "probs": [0, 1, 0, 0]})");
  const auto broken = temp_file("broken.json", R"({"d": 2, "n": 2, "probs": [0, 1, 0)");
  const auto extra = temp_file("extra.json", R"({"d": 2, "n": 2, "probs": [0, 0.5, 0.5, 0], "foo": 1})");

  auto check = run_json("marginal check " + loop);
  CHECK(check["consistent"] == true);
  CHECK(check["schema"] == 1);
  CHECK_FALSE(check.contains("timestamp"));
  CHECK(run("marginal check " + prod).code == 1);
  CHECK(run("marginal check " + broken).code == 2);
  CHECK(run("marginal check " + extra).code == 2);
  CHECK(run("marginal check /nonexistent/file.json").code == 2);

  auto ext = run_json("marginal extremes --d 2 --n 2");
  CHECK(ext["count"] == 3);
  CHECK(ext["rows"].size() == 3);

  auto extended = run_json("marginal extend " + loop + " --sites 3");
  CHECK(extended["distribution"]["probs"][2] == 0.5);
  CHECK(run("marginal extend " + prod + " --sites 3").code == 2);

  auto dec = run_json("marginal decompose " + loop);
  CHECK(dec["terms"] == 1);
  CHECK(dec["reconstruction_error"].get<double>() < 1e-12);
  CHECK(run("marginal").code == 2);
  CHECK(run("marginal extremes --d 0").code == 2);
}

TEST_CASE("witness commands") {
  auto b = run_json("witness bound --T yx");
  CHECK(b.dump().find("0.5") != std::string::npos);
  auto f = run_json("witness family --threshold");
  CHECK(f.dump().find("0.4955") != std::string::npos);
  auto r = run_json("witness report --lambda 0.49");
  CHECK(r["ppt"] == true);
  CHECK(r["violation"].get<double>() > 0.0);
  CHECK(r["excluded_block_size"].is_number_integer());
  CHECK(run("witness report --lambda 0").code == 1);
  CHECK(run("witness report --lambda 1.5").code == 2);
  CHECK(run("witness family --lambda -1").code == 2);
  CHECK(run("witness bound --T 1,2,3").code == 2);
}

TEST_CASE("bell commands") {
  auto b = run_json("bell bound --id 2");
  CHECK(b.dump().find("\"-4\"") != std::string::npos);
  auto v = run_json("bell verify --id 4");
  CHECK(v.dump().find("\"facet\":true") != std::string::npos);
  CHECK(run("bell bound --id 12").code == 2);
  CHECK(run("bell verify --id 0").code == 2);
  auto vc = run_json("bell vertices --count-only");
  CHECK(vc["count"] == 26213);

  const auto sum = temp_file("sum.txt", "-4 -6 0 4 1 3 1 1 0 1 -7\n");
  CHECK(run("bell verify --file " + sum).code == 1);
  const auto bad = temp_file("bad.txt", "1 2 3\n");
  CHECK(run("bell bound --file " + bad).code == 2);

  auto facets = run_json("bell facets --projection toy");
  CHECK(facets["rows"].size() == 3);

  auto gen = run_json("bell genuine --table1");
  std::string column;
  for (const auto& row : gen["rows"]) column += row["genuine"].get<std::string>();
  CHECK(column == "NNNYNYYNYYY");
  CHECK(run("bell genuine --id 2").code == 1);
  CHECK(run("bell genuine --id 4").code == 0);
}

TEST_CASE("quantum commands") {
  auto v = run_json("quantum value --id 2 --theta 0.077 --phi 1.874 --rings 5,6");
  CHECK(v["extrapolated"].get<double>() < -4.0);
  CHECK(run("--reproducible quantum value --id 2 --theta 0 --phi 0").code == 1);
  CHECK(run("quantum value --id 2 --theta 0 --phi 0 --rings 12").code == 2);
  CHECK(run("quantum value --id 2 --theta 0 --phi 0 --rings 8 --max-sites 6").code == 2);
  CHECK(run("quantum value --id 2 --theta x --phi 0").code == 2);
  auto s = run_json("quantum seesaw --id 4 --m 3 --N 6 --iters 2 --seed 7");
  CHECK(s["monotone"] == true);
  CHECK(run("quantum seesaw --id 4 --m 2").code == 2);
}

TEST_CASE("global options") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--format xml witness bound").code == 2);
  auto csv = run("--format csv --reproducible witness bound --T yx");
  CHECK(csv.code == 0);
  CHECK(csv.out.find(',') != std::string::npos);
  CHECK(csv.out.find('{') == std::string::npos);

  const auto out = (std::filesystem::temp_directory_path() / "tichain_cli_out.json").string();
  std::filesystem::remove(out);
  CHECK(run("--reproducible -o " + out + " witness bound").code == 0);
  std::ifstream in(out);
  auto j = nlohmann::json::parse(in);
  CHECK(j["command"].get<std::string>().find("witness") != std::string::npos);

  // Byte-identical reruns, also with several threads.
  auto a = run("--reproducible bell genuine --table1");
  auto b = run("--reproducible bell genuine --table1");
  CHECK(a.out == b.out);
  auto c = run("--reproducible witness report --lambda 0.3");
  CHECK(c.out == run("--reproducible witness report --lambda 0.3").out);
  auto timed = run("witness bound");
  CHECK(timed.out.find("timestamp") != std::string::npos);
  setenv("TICHAIN_THREADS", "3", 1);
  auto threaded = run("--reproducible bell genuine --table1");
  unsetenv("TICHAIN_THREADS");
  CHECK(threaded.out == a.out);
}
