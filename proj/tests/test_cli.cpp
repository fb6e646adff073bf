#include "support/process.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using efda::testing::run_command;
using efda::testing::shell_quote;
using efda::testing::slurp;

namespace {

const std::string kCli = EFDA_CLI_PATH;

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "efda_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

efda::testing::CommandResult cli(const std::string& args) { return run_command(shell_quote(kCli) + " " + args); }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

const char* kSmallConfig =
    "name = small\nfamily = weibull:3\nclass_params = 4, 2\nalpha = 0.7\n"
    "n_train = 200\nn_test = 200\ntrials = 6\nseed = 5\nn_values = 100, 300\n"
    "alpha_values = 0.5, 0.8\nmethods = efda lda qda lr\n";

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(cli("").exit_code == 1);
  CHECK(cli("--help").exit_code == 0);
  CHECK(cli("--version").exit_code == 0);
  CHECK(cli("bench-binary --bogus").exit_code == 1);
  CHECK(cli("bench-binary").exit_code == 1);
  CHECK(cli("bench-binary --config /nonexistent.ini").exit_code == 1);
  CHECK(cli("fit --data /nonexistent.csv --model x").exit_code == 1);
  const auto dir = scratch_dir();
  write(dir / "small.ini", kSmallConfig);
  CHECK(cli("bench-binary --config " + shell_quote((dir / "small.ini").string()) + " --confidence maybe").exit_code ==
        1);
}

TEST_CASE("malformed inputs exit with 2 and name the line") {
  const auto dir = scratch_dir();
  write(dir / "broken.ini", "family = weibull:3\nclass_params = 4, 2\nfrobnicate = 1\n");
  auto r = cli("bench-binary --config " + shell_quote((dir / "broken.ini").string()) + " --out " +
               shell_quote(dir.string()));
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "broken.ini:3"));

  write(dir / "broken.csv", "x,label\n1,0\n2,1\nthree,1\n");
  r = cli("fit --data " + shell_quote((dir / "broken.csv").string()) + " --family exponential --model " +
          shell_quote((dir / "m.txt").string()));
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "broken.csv:4"));

  write(dir / "bad_model.txt", "efda-model 1\ntype = binary\nfamily = poisson\nalpha = nope\n");
  write(dir / "x.csv", "1\n2\n");
  r = cli("predict --model " + shell_quote((dir / "bad_model.txt").string()) + " --data " +
          shell_quote((dir / "x.csv").string()));
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "efda:"));
}

TEST_CASE("fit then predict") {
  const auto dir = scratch_dir();
  std::string train = "x,label\n";
  for (int i = 0; i < 100; ++i) train += std::to_string(i % 2 ? 0.2 + 0.01 * i : 1.5 + 0.02 * i) + "," +
                                         std::to_string(i % 2) + "\n";
  write(dir / "train.csv", train);
  write(dir / "test.csv", "x\n0.3\n4.0\n");
  const auto model = (dir / "model.txt").string();
  auto r = cli("fit --data " + shell_quote((dir / "train.csv").string()) + " --family exponential --model " +
               shell_quote(model));
  REQUIRE(r.exit_code == 0);
  CHECK(slurp(model).rfind("efda-model 1\n", 0) == 0);

  r = cli("predict --model " + shell_quote(model) + " --data " + shell_quote((dir / "test.csv").string()));
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("x1,p0,p1,predicted\n", 0) == 0);
  CHECK(contains(r.output, "0.3,"));
  CHECK(r.output.substr(r.output.size() - 2) == "0\n");

  const auto out = (dir / "pred.csv").string();
  r = cli("predict --model " + shell_quote(model) + " --data " + shell_quote((dir / "test.csv").string()) +
          " --output " + shell_quote(out));
  REQUIRE(r.exit_code == 0);
  CHECK(slurp(out).rfind("x1,p0,p1,predicted\n", 0) == 0);

  r = cli("fit --data " + shell_quote((dir / "train.csv").string()) + " --method lr --model " +
          shell_quote((dir / "lr.txt").string()));
  CHECK(r.exit_code == 0);
}

TEST_CASE("experiments are identical across thread counts") {
  const auto dir = scratch_dir();
  const auto cfg = shell_quote((dir / "small.ini").string());
  write(dir / "small.ini", kSmallConfig);
  for (const char* kind : {"bench-binary", "sweep-n", "sweep-alpha", "ablate-shape", "efficiency"}) {
    const auto a = dir / (std::string(kind) + "_1");
    const auto b = dir / (std::string(kind) + "_3");
    CAPTURE(kind);
    REQUIRE(cli(std::string(kind) + " --config " + cfg + " --per-trial --threads 1 --out " + shell_quote(a.string()))
                .exit_code == 0);
    REQUIRE(cli(std::string(kind) + " --config " + cfg + " --per-trial --threads 3 --out " + shell_quote(b.string()))
                .exit_code == 0);
    CHECK(slurp((a / "small.csv").string()) == slurp((b / "small.csv").string()));
    CHECK(slurp((a / "small_trials.csv").string()) == slurp((b / "small_trials.csv").string()));
    CHECK(slurp((a / "small.csv").string()).size() > 50);
  }
}

TEST_CASE("seed override and plotting") {
  const auto dir = scratch_dir();
  write(dir / "small.ini", kSmallConfig);
  const auto cfg = shell_quote((dir / "small.ini").string());
  REQUIRE(cli("sweep-n --config " + cfg + " --out " + shell_quote((dir / "s1").string())).exit_code == 0);
  REQUIRE(cli("sweep-n --config " + cfg + " --seed 77 --out " + shell_quote((dir / "s2").string())).exit_code == 0);
  CHECK(slurp((dir / "s1/small.csv").string()) != slurp((dir / "s2/small.csv").string()));

  const auto svg = (dir / "s1/plot.svg").string();
  auto r = cli("plot --input " + shell_quote((dir / "s1/small.csv").string()) + " --preset sweep_n --output " +
               shell_quote(svg));
  REQUIRE(r.exit_code == 0);
  CHECK(slurp(svg).rfind("<svg", 0) == 0);
  r = cli("plot --input " + shell_quote((dir / "s1/small.csv").string()) + " --preset pie --output " +
          shell_quote(svg));
  CHECK(r.exit_code == 2);
}
