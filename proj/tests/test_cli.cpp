#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "sbmdyn/checkpoint.hpp"
#include "sbmdyn/commands.hpp"
#include "sbmdyn/config.hpp"
#include "sbmdyn/error.hpp"
#include "sbmdyn/tebd.hpp"

using namespace sbmdyn;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sbmdyn_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        ::unsetenv("SBMDYN_OUTPUT_DIR");
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunConfig small(const std::string& sub) const {
        RunConfig c;
        c.model.chain_length = 5;
        c.model.fock_dim = 4;
        c.model.obb_dim = 4;
        c.model.bond_cap = 16;
        c.t_final = 3.0;
        c.verbosity = 0;
        c.output_dir = (dir_ / sub).string();
        return c;
    }

    int run_cli(const std::string& args) const {
        const std::string cmd = std::string(SBMDYN_CLI) + " " + args + " >" + (dir_ / "stdout.txt").string() +
                                " 2>" + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_F(CliTest, ConfigRoundTrip) {
    RunConfig c = small("x");
    c.model.beta = 2.5;
    c.shift_mode = ShiftMode::sandwich;
    c.scan_s = {3.0};
    c.scan_alpha = {1.0, 4.0};
    c.classifier.t_skip = 12.5;
    c.seed = 99;
    const fs::path f = dir_ / "cfg.json";
    save_config(f.string(), c);
    const RunConfig back = load_config(f.string());
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(back.model.beta, 2.5);
    EXPECT_EQ(back.shift_mode, ShiftMode::sandwich);

    RunConfig inf = c;
    inf.model.beta = INFINITY;
    EXPECT_TRUE(std::isinf(config_from_json(config_to_json(inf)).model.beta));
}

TEST_F(CliTest, ConfigRejectsUnknownAndMistyped) {
    EXPECT_THROW(config_from_json(nlohmann::json{{"alpah", 0.1}}), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json{{"alpha", "big"}}), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json{{"shift_mode", "sideways"}}), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::array()), ConfigError);
    EXPECT_THROW(load_config((dir_ / "missing.json").string()), ConfigError);
}

TEST_F(CliTest, DecoupledEvolveAndAnalyze) {
    RunConfig c = small("rabi");
    c.model.alpha = 0.0;
    c.t_final = 200.0;
    c.model.bond_cap = 4;
    c.snapshot_every = 0;
    const std::string path = cmd_evolve(c);
    const TrajectoryRecord rec = read_trajectory_csv(path);
    ASSERT_EQ(rec.size(), 2001u);
    for (std::size_t i = 0; i < rec.size(); ++i) EXPECT_NEAR(rec.sigma_z[i], std::cos(0.1 * rec.times[i]), 1e-6);

    RunConfig a = small("rabi");
    const std::string report = cmd_analyze(path, a);
    const nlohmann::json j = nlohmann::json::parse(slurp(report));
    EXPECT_EQ(j["label"], "coherent");
    EXPECT_NEAR(j["t_s"].get<double>(), 31.4159, 1e-3);
}

TEST_F(CliTest, ByteIdenticalReruns) {
    RunConfig c = small("a");
    c.snapshot_every = 5;
    cmd_evolve(c);
    c.output_dir = (dir_ / "b").string();
    cmd_evolve(c);
    for (const char* f : {"trajectory.csv", "occupations.csv", "trajectory_shifts.csv"}) {
        const std::string a = slurp(dir_ / "a" / f);
        EXPECT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
    }
}

TEST_F(CliTest, ResumeMatchesDirectRun) {
    RunConfig direct = small("direct");
    direct.snapshot_every = 0;
    cmd_evolve(direct);

    RunConfig part = small("resume");
    part.snapshot_every = 0;
    part.checkpoint_every = 5;
    part.t_final = 1.5;
    cmd_evolve(part);
    part.resume = true;
    part.t_final = 3.0;
    cmd_evolve(part);

    const TrajectoryRecord a = read_trajectory_csv((dir_ / "direct" / "trajectory.csv").string());
    const TrajectoryRecord b = read_trajectory_csv((dir_ / "resume" / "trajectory.csv").string());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a.times[i], b.times[i], 1e-10);
        EXPECT_NEAR(a.sigma_z[i], b.sigma_z[i], 1e-10);
        EXPECT_NEAR(a.energy[i], b.energy[i], 1e-10);
        EXPECT_NEAR(a.norm[i], b.norm[i], 1e-10);
    }

    RunConfig other = part;
    other.model.alpha = 0.2;
    EXPECT_THROW(cmd_evolve(other), ConfigError);
}

TEST_F(CliTest, CheckpointRoundTripIsBitExact) {
    RunConfig c = small("ck");
    c.checkpoint_every = 10;
    c.t_final = 1.0;
    cmd_evolve(c);
    const Checkpoint ck = load_checkpoint((dir_ / "ck" / "trajectory.ckpt").string());
    save_checkpoint((dir_ / "copy.ckpt").string(), ck);
    EXPECT_EQ(slurp(dir_ / "ck" / "trajectory.ckpt"), slurp(dir_ / "copy.ckpt"));
    EXPECT_NEAR(ck.t, 1.0, 1e-12);
    std::ofstream(dir_ / "junk.ckpt") << "not a checkpoint";
    EXPECT_THROW(load_checkpoint((dir_ / "junk.ckpt").string()), ConfigError);
    EXPECT_THROW(load_checkpoint((dir_ / "none.ckpt").string()), NotFoundError);
}

TEST_F(CliTest, ShiftTableRoundTrip) {
    const std::vector<double> x = {0.0, -0.123456789012345, 1.5e-7};
    write_shift_table((dir_ / "s.csv").string(), x);
    const std::vector<double> y = read_shift_table((dir_ / "s.csv").string());
    ASSERT_EQ(y.size(), 3u);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(y[k], x[k], 1e-15 * std::max(1.0, std::abs(x[k])));
    EXPECT_EQ(slurp(dir_ / "s.csv").substr(0, 4), "k,x_");
}

TEST_F(CliTest, GroundWritesShiftTable) {
    RunConfig c = small("ground");
    c.model.alpha = 0.1;
    cmd_ground(c);
    const std::vector<double> x = read_shift_table((dir_ / "ground" / "shifts.csv").string());
    ASSERT_EQ(x.size(), 5u);
    EXPECT_EQ(x[0], 0.0);
    EXPECT_LT(x[1], 0.0);
    EXPECT_TRUE(fs::exists(dir_ / "ground" / "ground.ckpt"));
}

TEST_F(CliTest, ThermalWritesOccupations) {
    RunConfig c = small("thermal");
    c.kind = "thermal";
    c.model.chain_length = 3;
    c.model.fock_dim = 3;
    c.model.obb_dim = 9;
    c.model.beta = 2.0;
    c.t_final = 1.0;
    c.snapshot_every = 5;
    run_command(c);
    EXPECT_TRUE(fs::exists(dir_ / "thermal" / "trajectory.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "thermal" / "occupations.csv"));
    c.model.beta = INFINITY;
    EXPECT_THROW(run_command(c), ConfigError);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run_cli("evolve --alpha 0 --chain_length 3 --fock_dim 3 --obb_dim 3 --t_final 1 --output_dir " +
                      (dir_ / "ok").string()),
              0);
    EXPECT_TRUE(fs::exists(dir_ / "ok" / "trajectory.csv"));
    EXPECT_EQ(run_cli("evolve --no_such_key 1"), 2);
    std::ofstream(dir_ / "bad.json") << "{\"alpha\": 0.1, \"typo\": 3}";
    EXPECT_EQ(run_cli("evolve -c " + (dir_ / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("evolve --chain_length 1"), 2);
    EXPECT_EQ(run_cli("evolve --chain_length 8 --fock_dim 4 --obb_dim 4 --bond_cap 1 --alpha 0.3 --trunc_budget 1e-9 "
                      "--t_final 5 --output_dir " +
                      (dir_ / "abort").string()),
              3);
    EXPECT_TRUE(fs::exists(dir_ / "abort" / "trajectory.csv"));
    EXPECT_EQ(run_cli("analyze " + (dir_ / "nothing.csv").string() + " --output_dir " + dir_.string()), 4);
    EXPECT_EQ(run_cli("evolve --resume true --output_dir " + (dir_ / "empty").string()), 4);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
    ::setenv("SBMDYN_OUTPUT_DIR", (dir_ / "env").c_str(), 1);
    RunConfig c = small("ignored");
    c.model.alpha = 0.0;
    c.t_final = 0.5;
    EXPECT_EQ(resolve_output_dir(c), (dir_ / "env").string());
    EXPECT_EQ(run_cli("evolve --alpha 0 --chain_length 3 --fock_dim 3 --obb_dim 3 --t_final 0.5"), 0);
    EXPECT_TRUE(fs::exists(dir_ / "env" / "trajectory.csv"));
    ::unsetenv("SBMDYN_OUTPUT_DIR");
}
