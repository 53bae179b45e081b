#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "mfd/error.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using mfd::cli::Config;

namespace {

Config parse(const std::string& text) {
    std::istringstream is(text);
    return Config::parse(is, "test");
}

class CliRun : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mfd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    int run(std::vector<std::string> args) {
        std::vector<const char*> argv{"mfd"};
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return mfd::cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST(Config, Grammar) {
    const auto c = parse("# comment\n\npsi = power:2\nweight=unit  \ntruncation = 0.5, 0.25\n");
    EXPECT_EQ(c.text("psi", ""), "power:2");
    EXPECT_EQ(c.text("weight", ""), "unit");
    EXPECT_EQ(c.list("truncation", "").size(), 2u);
    EXPECT_EQ(c.text("missing", "fallback"), "fallback");
    EXPECT_DOUBLE_EQ(c.real("missing", 1.5), 1.5);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse("psi = linear\npsi = power:2\n"), mfd::ConfigError);
    EXPECT_THROW(parse("Psi = linear\n"), mfd::ConfigError);
    EXPECT_THROW(parse("just words\n"), mfd::ConfigError);
    const auto c = parse("grid = 12x\ninverse = maybe\n");
    EXPECT_THROW(c.integer("grid", 0), mfd::ConfigError);
    EXPECT_THROW(c.flag("inverse", false), mfd::ConfigError);
    EXPECT_THROW(c.require_known({"grid"}, "energy"), mfd::ConfigError);
}

TEST(Config, OverridesAreExemptFromKeyChecks) {
    auto c = parse("grid = 64\n");
    c.override_with("seed", "7");
    c.override_with("grid", "32");
    EXPECT_NO_THROW(c.require_known({"grid"}, "hopf"));
    EXPECT_EQ(c.integer("grid", 0), 32);
}

TEST_F(CliRun, UsageErrors) {
    EXPECT_EQ(run({}), mfd::cli::kExitUsage);
    EXPECT_EQ(run({"bogus"}), mfd::cli::kExitUsage);
    EXPECT_EQ(run({"ode", "--config", (dir_ / "absent.cfg").string()}), mfd::cli::kExitUsage);
    const auto bad = write_config("bad.cfg", "psi = linear\nnot_a_key = 1\n");
    EXPECT_EQ(run({"ode", "--config", bad, "--out", dir_.string()}), mfd::cli::kExitUsage);
    EXPECT_NE(err_.str().find("not_a_key"), std::string::npos);
    EXPECT_EQ(run({"hopf", "--grid", "4", "--out", dir_.string()}), mfd::cli::kExitUsage);
    EXPECT_EQ(run({"--help"}), mfd::cli::kExitOk);
}

TEST_F(CliRun, OdeWritesTableAndSummary) {
    const auto cfg = write_config("ode.cfg", "profile = psi=power:3;eta=hyp-half;lambda=1\n");
    ASSERT_EQ(run({"ode", "--config", cfg, "--out", dir_.string()}), mfd::cli::kExitOk) << err_.str();
    const auto j = nlohmann::json::parse(slurp(dir_ / "ode.json"));
    EXPECT_EQ(j["surjectivity"]["verdict"], "surjective");
    EXPECT_EQ(slurp(dir_ / "ode_table.csv").substr(0, 17), "y,u,du,K,residual");
}

TEST_F(CliRun, HopfIdentityIsHolomorphic) {
    ASSERT_EQ(run({"hopf", "--grid", "32", "--out", dir_.string()}), mfd::cli::kExitOk) << err_.str();
    const auto j = nlohmann::json::parse(slurp(dir_ / "hopf_residual.json"));
    EXPECT_EQ(j["max_dbar"], 0.0);
    EXPECT_TRUE(fs::exists(dir_ / "hopf.csv"));
}

TEST_F(CliRun, DataErrorsExitTwo) {
    const auto cfg = write_config("deg.cfg", "start = conj\n");
    EXPECT_EQ(run({"minimize", "--config", cfg, "--grid", "32", "--out", dir_.string()}), mfd::cli::kExitData);
    const auto missing = write_config("missing.cfg", "map = file:" + (dir_ / "nope.csv").string() + "\n");
    EXPECT_EQ(run({"energy", "--config", missing, "--grid", "16", "--out", dir_.string()}), mfd::cli::kExitData);
}

TEST_F(CliRun, VerifyFailureExitsThree) {
    const auto cfg = write_config("conj.cfg", "battery = rs\nmap = conj\n");
    EXPECT_EQ(run({"verify", "--config", cfg, "--grid", "32", "--out", dir_.string()}), mfd::cli::kExitVerdict);
    const auto j = nlohmann::json::parse(slurp(dir_ / "verify_rs.json"));
    EXPECT_NE(j.dump().find("hypothesis violated"), std::string::npos);
}

TEST_F(CliRun, SameSeedGivesIdenticalOutput) {
    const auto cfg = write_config("rs.cfg", "battery = rs\ncount = 3\n");
    const fs::path a = dir_ / "a", b = dir_ / "b", c = dir_ / "c";
    ASSERT_EQ(run({"verify", "--config", cfg, "--grid", "32", "--seed", "5", "--out", a.string()}), 0) << err_.str();
    ASSERT_EQ(run({"verify", "--config", cfg, "--grid", "32", "--seed", "5", "--out", b.string()}), 0);
    ASSERT_EQ(run({"verify", "--config", cfg, "--grid", "32", "--seed", "6", "--out", c.string()}), 0);
    EXPECT_EQ(slurp(a / "verify_rs.json"), slurp(b / "verify_rs.json"));
    EXPECT_NE(slurp(a / "verify_rs.json"), slurp(c / "verify_rs.json"));
}

TEST_F(CliRun, FileMapMatchesClosedForm) {
    const auto cfg = write_config("map.cfg", "map = shear:0.1\n");
    ASSERT_EQ(run({"map", "--config", cfg, "--grid", "32", "--out", dir_.string()}), 0) << err_.str();
    const auto e1 = write_config("e1.cfg", "map = shear:0.1\n");
    const auto e2 = write_config("e2.cfg", "map = file:" + (dir_ / "map.csv").string() + "\n");
    const fs::path o1 = dir_ / "o1", o2 = dir_ / "o2";
    ASSERT_EQ(run({"energy", "--config", e1, "--grid", "32", "--out", o1.string()}), 0) << err_.str();
    ASSERT_EQ(run({"energy", "--config", e2, "--grid", "32", "--out", o2.string()}), 0) << err_.str();
    const auto j1 = nlohmann::json::parse(slurp(o1 / "energy.json"));
    const auto j2 = nlohmann::json::parse(slurp(o2 / "energy.json"));
    // The closed form uses analytic derivatives, the file finite differences.
    EXPECT_NEAR(j1["direct"]["value"].get<double>(), j2["direct"]["value"].get<double>(), 1e-6);
}
