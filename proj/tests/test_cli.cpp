#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MLMC_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mlmc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config(const std::string& body) {
    const auto path = dir_ / "config.json";
    std::ofstream(path) << body;
    return path.string();
  }
  std::string read(const std::string& name) {
    std::ifstream in(dir_ / "out" / name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
  std::string out() const { return (dir_ / "out").string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DiscretizeWideWindow) {
  const auto r = run("discretize --config " +
                     config(R"({"kernel":{"family":"uniform-window","params":{"w":2}},"schedule":{"h_max":"1","h_min":"1"}})") +
                     " --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(read("level_1.csv"), "row,col,value\n0,0,0.5\n0,1,0.5\n1,0,0.5\n1,1,0.5\n");
  const auto header = nlohmann::json::parse(read("level_1.json"));
  EXPECT_EQ(header["n_states"], 2);
}

TEST_F(Cli, NonDyadicResolutionNamesTheField) {
  const auto r = run("discretize --config " + config(R"({"schedule":{"h_max":"1/2","h_min":"1/3"}})") + " --out " + out());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("schedule.h_min"), std::string::npos) << r.out;
  const auto p = run("pipeline --config " + config(R"({"schedule":{"h_max":"1/2","h_min":"1/3"}})") + " --out " + out());
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.out.find("schedule.h_min"), std::string::npos) << p.out;
}

TEST_F(Cli, TwoDimensionalStateCount) {
  const auto r = run("discretize --config " + config(R"({"schedule":{"h_max":"1/8","h_min":"1/8","d":2}})") + " --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto header = nlohmann::json::parse(read("level_1-8.json"));
  EXPECT_EQ(header["n_states"], 256);
  EXPECT_EQ(header["partition"]["d"], 2);
}

TEST_F(Cli, DefaultPipeline) {
  const auto r = run("pipeline --config " + config("{}") + " --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto report = nlohmann::json::parse(read("report.json"));
  EXPECT_EQ(report["levels"].size(), 4u);
  EXPECT_TRUE(report["pass"].get<bool>());
  const auto csv = read("levels.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "h,n_states,m,s,tau,delta_eig,q,walk_steps,C,classical_matvecs,classical_cost");
}

TEST_F(Cli, QuantumModeColumns) {
  const auto r = run("pipeline --config " + config(R"({"mode":"quantum-cost-model"})") + " --out " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto csv = read("levels.csv");
  const auto header = csv.substr(0, csv.find('\n'));
  EXPECT_NE(header.find("walk_steps"), std::string::npos);
  EXPECT_EQ(header.find("classical_matvecs"), std::string::npos);
}

TEST_F(Cli, CapacityExit) {
  const auto r = run("pipeline --config " + config("{}") + " --cap 8 --out " + out());
  EXPECT_EQ(r.code, 3) << r.out;
  const auto w = run("walk-check --config " + config(R"({"schedule":{"h_max":"1/8","h_min":"1/8","d":2}})") + " --out " + out());
  EXPECT_EQ(w.code, 3) << w.out;
}

TEST_F(Cli, BoundFailureExit) {
  // near-unit-root chain: q * delta / h grows between the 1/2 -> 1/4 and 1/4 -> 1/8 transitions
  const auto r = run("pipeline --config " +
                     config(R"({"kernel":{"params":{"a":0.99,"sigma":0.02},"boundary":"reflect"},)"
                            R"("schedule":{"h_max":"1/2","h_min":"1/64"}})") +
                     " --out " + out());
  EXPECT_EQ(r.code, 4) << r.out;
  const auto report = nlohmann::json::parse(read("report.json"));
  EXPECT_FALSE(report["lemma3"]["pass"].get<bool>());
}

TEST_F(Cli, ConfigErrors) {
  EXPECT_EQ(run("pipeline --config " + config(R"({"bogus":1})")).code, 2);
  EXPECT_EQ(run("pipeline --config " + config("{not json")).code, 2);
  EXPECT_EQ(run("pipeline --config /nonexistent/file.json").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("pipeline --config " + config(R"({"kernel":{"params":{"sigma":100}}})") + " --out " + out()).code, 2);
}

TEST_F(Cli, WalkCheck) {
  const auto r = run("walk-check --config " + config(R"({"schedule":{"h_max":"1/2","h_min":"1/4"}})") + " --steps 16 --out " +
                     out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto trace = read("walk_trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "step,overlap,autocorrelation");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 18);
  const auto spectrum = nlohmann::json::parse(read("walk_spectrum.json"));
  EXPECT_EQ(spectrum["n_states"], 4);
}

TEST_F(Cli, PrintConfigRoundTrips) {
  const auto r = run("print-config --config " + config(R"({"mode":"quantum-cost-model","target_epsilon":0.001})"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["mode"], "quantum-cost-model");
  EXPECT_EQ(doc["target_epsilon"], 0.001);
  const auto again = run("print-config --config " + config(doc.dump()));
  EXPECT_EQ(nlohmann::json::parse(again.out), doc);
}

TEST_F(Cli, SeedAndThreadsDoNotChangeOutputs) {
  const auto a = run("pipeline --config " + config("{}") + " --out " + (dir_ / "a").string());
  const auto b = run("pipeline --config " + config("{}") + " --seed 99 --out " + (dir_ / "b").string());
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  EXPECT_EQ(slurp(dir_ / "a" / "levels.csv"), slurp(dir_ / "b" / "levels.csv"));
}
