#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "ranklab/params_io.hpp"
#include "test_util.hpp"

using namespace ranklab;

namespace {

struct Output {
  int code = -1;
  std::string text;  // stdout and stderr combined
};

Output ranklab_cli(const std::string& args) {
  const std::string cmd = std::string(RANKLAB_CLI_PATH) + " " + args + " 2>&1";
  Output out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out.text += buf.data();
  const int status = ::pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of a CSV file as lists of fields (no quoted commas in these files).
std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("usage and data errors map to exit codes") {
  CHECK(ranklab_cli("").code == 2);
  CHECK(ranklab_cli("--help").code == 0);
  CHECK(ranklab_cli("frobnicate").code == 2);
  CHECK(ranklab_cli("sweep --bogus").code == 2);
  const auto dir = test::temp_dir("cli-errors");
  const Output empty_grid = ranklab_cli("sweep --grid-lambda '' --out " + dir.string());
  CHECK(empty_grid.code == 2);
  CHECK(empty_grid.text.find("--grid-lambda") != std::string::npos);
  const Output missing = ranklab_cli("estimate /no/such/log.jsonl --out " + dir.string());
  CHECK(missing.code == 3);
  CHECK(missing.text.find("/no/such/log.jsonl") != std::string::npos);
  CHECK(ranklab_cli("simulate --params /no/params.json --out " + dir.string()).code == 3);
}

TEST_CASE("synthetic data round trip through estimation") {
  const auto dir = test::temp_dir("cli-estimate");
  REQUIRE(ranklab_cli("gen-synthetic --seed 4 --out " + dir.string()).code == 0);
  const auto log = dir / "synthetic.jsonl";
  const Output est = ranklab_cli("estimate " + log.string() + " --bootstrap 20 --out " + (dir / "est").string());
  REQUIRE(est.code == 0);
  const ParamsFile file = read_params_file(dir / "est" / "params.json");
  const auto& r = file.topics.at("pooled");
  CHECK(std::abs(r.point.beta - 1.09) < 0.03);
  CHECK(r.ci_low.has_value());
  CHECK(r.replicates == 20);
  CHECK(std::filesystem::exists(dir / "est" / "estimate_ci.csv"));

  const auto manifest = nlohmann::json::parse(slurp(dir / "est" / "manifest.json"));
  CHECK(manifest["command"] == "estimate");
  CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK(manifest["seed"] == 1);

  const Output one = ranklab_cli("estimate " + log.string() + " --per-topic --bootstrap 1 --out " + (dir / "one").string());
  CHECK(one.code == 0);
  CHECK(one.text.find("degenerate") != std::string::npos);
  CHECK(read_params_file(dir / "one" / "params.json").topics.size() == 4);
}

TEST_CASE("sweep output is byte-identical for a fixed seed") {
  const auto dir = test::temp_dir("cli-sweep");
  const std::string args = "sweep --grid-lambda 0,1 --grid-eta 0,100 --replicates 30 --seed 9 --emit-plot-data";
  REQUIRE(ranklab_cli(args + " --threads 2 --out " + (dir / "a").string()).code == 0);
  REQUIRE(ranklab_cli(args + " --threads 1 --out " + (dir / "b").string()).code == 0);
  for (const char* f : {"grid.csv", "corners.csv", "plot_data.csv"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const auto grid = csv_rows(dir / "a" / "grid.csv");
  CHECK(grid.size() == 5);
  const auto corners = csv_rows(dir / "a" / "corners.csv");
  CHECK(corners.size() == 1 + 5 * 4);
  CHECK(csv_rows(dir / "a" / "plot_data.csv").size() == 1 + (4 + 20) * 30 * 2);

  // A config file supplies defaults that flags override.
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"format_version": 1, "seed": 9, "replicates": 30, "grid_lambda": [0, 1], "grid_eta": [0, 100]})";
  }
  REQUIRE(ranklab_cli("sweep --no-corners --config " + (dir / "cfg.json").string() + " --out " + (dir / "c").string())
              .code == 0);
  CHECK(slurp(dir / "c" / "grid.csv") == slurp(dir / "a" / "grid.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "c" / "manifest.json"));
  CHECK(manifest["config"]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("analyze compares two scenarios") {
  const auto dir = test::temp_dir("cli-analyze");
  REQUIRE(ranklab_cli("simulate --runs 6 --seed 1 --out " + (dir / "base").string()).code == 0);
  REQUIRE(ranklab_cli("simulate --runs 6 --lambda 1 --eta 100 --seed 2 --out " + (dir / "pers").string()).code == 0);
  const auto base = (dir / "base" / "events.jsonl").string();
  const auto pers = (dir / "pers" / "events.jsonl").string();

  REQUIRE(ranklab_cli("analyze " + base + " " + pers + " --out " + (dir / "cmp").string()).code == 0);
  for (const auto& row : csv_rows(dir / "cmp" / "tests.csv")) {
    if (row[1] == "mwu_ext") CHECK(std::stod(row[6]) < 0.001);
  }

  REQUIRE(ranklab_cli("analyze " + base + " " + base + " --out " + (dir / "same").string()).code == 0);
  const auto same = csv_rows(dir / "same" / "tests.csv");
  REQUIRE(same.size() > 1);
  for (std::size_t i = 1; i < same.size(); ++i) {
    if (same[i][6] != "NA") CHECK(std::stod(same[i][6]) > 0.05);
  }
}

TEST_CASE("analyze reports missing polarization") {
  const auto dir = test::temp_dir("cli-left");
  {
    std::ofstream cfg(dir / "left.json");
    cfg << "{\"format_version\": 1}";
  }
  // Left-only users via a parameters file with a point-mass stance distribution.
  REQUIRE(ranklab_cli("simulate --runs 2 --out " + (dir / "sim").string()).code == 0);
  std::ifstream in(dir / "sim" / "events.jsonl");
  std::ofstream out(dir / "left.jsonl");
  std::map<std::string, int> seq;
  for (std::string line; std::getline(in, line);) {
    auto j = nlohmann::json::parse(line);
    if (j["user_stance"].get<int>() >= 0) continue;
    j["seq"] = ++seq[j["run_id"].get<std::string>()];
    out << j.dump() << '\n';
  }
  out.close();
  const auto left = (dir / "left.jsonl").string();
  REQUIRE(ranklab_cli("analyze " + left + " " + left + " --out " + (dir / "an").string()).code == 0);
  const auto metrics = csv_rows(dir / "an" / "metrics.csv");
  REQUIRE(metrics.size() == 3);
  CHECK(metrics[1][6] == "NA");
  CHECK(metrics[1][5] != "NA");
}

TEST_CASE("replay subcommand") {
  const auto dir = test::temp_dir("cli-replay");
  REQUIRE(ranklab_cli("simulate --runs 2 --lambda 0.5 --eta 3 --out " + dir.string()).code == 0);
  const Output ok = ranklab_cli("replay " + (dir / "events.jsonl").string() + " --out " + (dir / "rp").string());
  REQUIRE(ok.code == 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "rp" / "replay.json"));
  CHECK(summary["runs"].size() == 2);
  CHECK(summary["runs"][0]["last_seq"] == 500);

  std::ifstream in(dir / "events.jsonl");
  std::ofstream out(dir / "gap.jsonl");
  int n = 0;
  for (std::string line; std::getline(in, line);) {
    if (++n != 7) out << line << '\n';
  }
  out.close();
  const Output gap = ranklab_cli("replay " + (dir / "gap.jsonl").string() + " --out " + (dir / "rp2").string());
  CHECK(gap.code == 3);
  CHECK(gap.text.find("seq gap") != std::string::npos);
}
