// Black-box tests of the command-line binary: each case spawns the real
// executable (path injected as TURBUQ_CLI) and checks exit codes, files,
// and stdout. Library calls here only build fixtures.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "turbuq/checkpoint.hpp"
#include "turbuq/dataset.hpp"

using namespace turbuq;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("turbuq_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::filesystem::path& cwd, const std::string& args) {
  const auto out_file = cwd / "_stdout.txt";
  const std::string cmd = "cd '" + cwd.string() + "' && '" + TURBUQ_CLI + "' " + args + " > '" +
                          out_file.string() + "' 2> '" + (cwd / "_stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out_file);
  return r;
}

std::size_t line_count(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

// dataset whose truth is the constant 0.25 everywhere, u_inf = 1
void write_constant_dataset(const std::filesystem::path& csv) {
  std::ofstream out(csv);
  out << "case,station,x,y,k_rans,k_dns\n";
  for (int p = 0; p < 3; ++p)
    for (int i = 0; i < 10; ++i)
      out << "c" << p << ",0.2,0.0," << 0.1 * (i + 1) << "," << 0.05 + 0.01 * i << ",0.25\n";
  std::ofstream side(csv.parent_path() / (csv.stem().string() + ".uinf.json"));
  side << R"({"c0": 1.0, "c1": 1.0, "c2": 1.0})";
}

// checkpoint that predicts the constant `c` for every window
void write_constant_checkpoint(const std::filesystem::path& path, double c, std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.model = ml::CnnModel::init(ml::CnnArchitecture::conv_net(), 0);
  std::fill(ckpt.model.params.begin(), ckpt.model.params.end(), 0.0);
  ckpt.model.params.back() = c;
  ckpt.model.mode = ml::Mode::Inference;
  ckpt.standardization.input = {0.0, 1.0};
  ckpt.standardization.target = {0.0, 1.0};
  ckpt.seed = seed;
  save_checkpoint(ckpt, path);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth writes the expected rows and is byte-deterministic") {
  const auto dir = fresh_dir("synth");
  const CmdResult r = run_cli(dir, "synth --profiles 12 --points 64 --seed 7 --out d.csv");
  CHECK(r.exit_code == 0);
  CHECK(line_count(dir / "d.csv") == 769);  // 12 x 64 rows + header
  CHECK(std::filesystem::exists(dir / "d.uinf.json"));

  CHECK(run_cli(dir, "synth --profiles 12 --points 64 --seed 7 --out e.csv").exit_code == 0);
  CHECK(read_text(dir / "e.csv") == read_text(dir / "d.csv"));

  CHECK(run_cli(dir, "synth --profiles 1 --out x.csv").exit_code == 2);
  CHECK(run_cli(dir, "synth --out sub/does/not/exist.csv").exit_code == 3);
  CHECK(run_cli(dir, "synth --law cubic --out x.csv").exit_code == 2);
}

TEST_CASE("train produces an 85-parameter checkpoint plus history") {
  const auto dir = fresh_dir("train");
  REQUIRE(run_cli(dir, "synth --profiles 10 --points 24 --noise 0.02 --seed 5 --out d.csv")
              .exit_code == 0);
  const CmdResult r =
      run_cli(dir, "train --data d.csv --out m.json --seed 3 --max-epochs 80");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("val loss") != std::string::npos);

  const nlohmann::json ckpt = nlohmann::json::parse(read_text(dir / "m.json"));
  CHECK(ckpt.at("param_count").get<int>() == 85);
  CHECK(ckpt.at("seed").get<std::uint64_t>() == 3);

  const nlohmann::json hist = nlohmann::json::parse(read_text(dir / "m.history.json"));
  CHECK(hist.at("loss").get<std::string>() == "mae");
  CHECK(hist.at("val_loss").size() == hist.at("train_loss").size());
  CHECK(hist.at("epochs_run").get<int>() <= 80);

  // impatient run stops after a handful of epochs
  const CmdResult fast =
      run_cli(dir, "train --data d.csv --out p.json --seed 3 --patience 1 --max-epochs 80");
  CHECK(fast.exit_code == 0);
  const nlohmann::json ph = nlohmann::json::parse(read_text(dir / "p.history.json"));
  CHECK(ph.at("stopped_early").get<bool>());
  CHECK(ph.at("epochs_run").get<int>() < 80);

  const CmdResult mse =
      run_cli(dir, "train --data d.csv --out q.json --seed 3 --loss mse --max-epochs 10");
  CHECK(mse.exit_code == 0);
  CHECK(nlohmann::json::parse(read_text(dir / "q.history.json")).at("loss").get<std::string>() ==
        "mse");

  CHECK(run_cli(dir, "train --data d.csv --out x.json --loss huber").exit_code == 2);
  CHECK(run_cli(dir, "train --data missing.csv --out x.json").exit_code == 3);
}

TEST_CASE("train reports dataset problems with exit 4 and the offending line") {
  const auto dir = fresh_dir("train_bad_data");
  std::ofstream(dir / "bad.csv") << "case,station,x,y,k_rans,k_dns\n"
                                 << "a,0.2,0,0.1,0.5,0.6\n"
                                 << "a,0.2,0,0.2,-1,0.6\n";
  std::ofstream(dir / "bad.uinf.json") << R"({"a": 1.0})";
  const CmdResult r = run_cli(dir, "train --data bad.csv --out m.json");
  CHECK(r.exit_code == 4);
  CHECK(read_text(dir / "_stderr.txt").find("line 3") != std::string::npos);
}

TEST_CASE("evaluate scores the held-out partition against the checkpoint") {
  const auto dir = fresh_dir("evaluate");
  write_constant_dataset(dir / "d.csv");
  write_constant_checkpoint(dir / "oracle.json", 0.25, 11);

  const CmdResult r = run_cli(dir, "evaluate --data d.csv --model oracle.json --report rep");
  CHECK(r.exit_code == 0);
  const nlohmann::json summary = nlohmann::json::parse(read_text(dir / "rep" / "summary.json"));
  CHECK(summary.at("aggregate").at("mae_corrected").get<double>() == 0.0);
  CHECK(summary.at("aggregate").at("coverage").get<double>() == 1.0);
  CHECK(summary.at("aggregate").at("station_count").get<int>() == 1);  // 3 profiles -> 1 test
  CHECK(std::filesystem::exists(dir / "rep" / "station_000.csv"));

  CHECK(run_cli(dir, "evaluate --data d.csv --model absent.json --report rep2").exit_code == 5);
  CHECK(run_cli(dir, "evaluate --data absent.csv --model oracle.json --report rep3").exit_code ==
        3);
}

TEST_CASE("perturb prints members and envelope as json") {
  const auto dir = fresh_dir("perturb");
  const CmdResult r = run_cli(dir, "perturb --k 1 --delta-b 1 --targets 1c");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("members").size() == 1);
  const nlohmann::json& t = j.at("members").at(0).at("tensor");
  CHECK(t.at("xx").get<double>() == 2.0);
  CHECK(t.at("yy").get<double>() == 0.0);
  CHECK(t.at("zz").get<double>() == 0.0);
  CHECK(j.at("envelope").at("upper").at("xx").get<double>() == 2.0);

  const CmdResult echo = run_cli(dir, "perturb --k 1 --delta-b 0");
  REQUIRE(echo.exit_code == 0);
  const nlohmann::json e = nlohmann::json::parse(echo.out);
  for (const auto& m : e.at("members")) CHECK(m.at("tensor") == e.at("input"));

  CHECK(run_cli(dir, "perturb --k 1 --delta-b 1.5").exit_code == 2);
  CHECK(run_cli(dir, "perturb --k 1 --b 1,2,3").exit_code == 2);
  CHECK(run_cli(dir, "perturb --k 1 --b 0.7,0,-0.7,0,0,0").exit_code == 2);  // not realizable
  CHECK(run_cli(dir, "perturb --k -1 --delta-b 0.5").exit_code == 2);
  CHECK(run_cli(dir, "perturb --k 1 --targets 4c").exit_code == 2);
}

TEST_CASE("usage errors exit with code 2") {
  const auto dir = fresh_dir("usage");
  CHECK(run_cli(dir, "").exit_code == 2);
  CHECK(run_cli(dir, "frobnicate").exit_code == 2);
  CHECK(run_cli(dir, "synth").exit_code == 2);            // --out required
  CHECK(run_cli(dir, "train --data d.csv").exit_code == 2);
  CHECK(run_cli(dir, "--help").exit_code == 0);
}

}  // TEST_SUITE
