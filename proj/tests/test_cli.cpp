#include "becsq/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace becsq::cli {
namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

struct Run {
    int code;
    std::string out, err;
};

Run simulate_with(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = cmd_simulate(cfg, out, err);
    return {code, out.str(), err.str()};
}

TEST(Config, ParsesKeyValueText) {
    RunConfig cfg;
    apply_config_text(cfg, "# scenario\n r = 0.5\nphi=0.25 # trailing\nm-re = 1\nomega_a = 3.5\nsources = oracle, moment-map\n"
                           "n_max = 40\nsteps=10\n");
    EXPECT_EQ(cfg.input.r, 0.5);
    EXPECT_EQ(cfg.input.phi, 0.25);
    EXPECT_EQ(cfg.input.m, cplx(1.0, 0.0));
    EXPECT_EQ(cfg.params.omega_a, 3.5);
    EXPECT_EQ(cfg.n_max, 40);
    EXPECT_EQ(cfg.steps, 10);
    EXPECT_EQ(cfg.sources, (std::vector<Source>{Source::moment_map, Source::oracle}));
    apply_config_text(cfg, "n_max = auto\n");
    EXPECT_FALSE(cfg.n_max.has_value());
}

TEST(Config, Errors) {
    RunConfig cfg;
    EXPECT_THROW(apply_config_text(cfg, "bogus = 1\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "r 1\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "r = 1x\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "steps = 2.5\n"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "sources = oracle, magic\n"), ConfigError);
    EXPECT_THROW(apply_config_file(cfg, "/nonexistent/dir/cfg.txt"), ConfigError);
}

TEST(Config, FileThenOverride) {
    const auto path = std::filesystem::temp_directory_path() / "becsq_cfg_test.txt";
    {
        std::ofstream f(path);
        f << "r = 0.3\ntheta = 1.0\n";
    }
    RunConfig cfg;
    apply_config_file(cfg, path.string());
    set_key(cfg, "r", "0.7");
    EXPECT_EQ(cfg.input.r, 0.7);
    EXPECT_EQ(cfg.params.theta, 1.0);
    std::filesystem::remove(path);
}

TEST(Config, Validation) {
    RunConfig cfg;
    cfg.steps = 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.params.omega_r = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.input.r = -1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, HalfOpenTimeGrid) {
    RunConfig cfg;
    cfg.t_max = 2.0;
    cfg.steps = 4;
    EXPECT_EQ(cfg.time_grid(), (std::vector<double>{0.0, 0.5, 1.0, 1.5}));
}

TEST(Csv, NumberFormatting) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(std::nan("")), "NA");
    EXPECT_EQ(format_field(std::nullopt), "NA");
}

TEST(Simulate, DefaultScenarioRowCount) {
    const auto run = simulate_with(RunConfig{});
    ASSERT_EQ(run.code, kOk) << run.err;
    const auto ls = lines(run.out);
    ASSERT_FALSE(ls.empty());
    EXPECT_EQ(ls.front(), kCsvHeader);
    EXPECT_EQ(ls.size(), 601u);
    // t = 0: b is empty, so Q_b is undefined for the computed sources
    EXPECT_NE(ls[2].find("moment-map"), std::string::npos);
    EXPECT_NE(ls[2].find(",NA,"), std::string::npos);
}

TEST(Simulate, OracleOnlyTwoSteps) {
    RunConfig cfg;
    cfg.sources = {Source::oracle};
    cfg.steps = 2;
    const auto run = simulate_with(cfg);
    ASSERT_EQ(run.code, kOk) << run.err;
    EXPECT_EQ(lines(run.out).size(), 3u);
}

TEST(Simulate, InsufficientTruncationExitCode) {
    RunConfig cfg;
    cfg.input.r = 3.0;
    cfg.n_max = 16;
    const auto run = simulate_with(cfg);
    EXPECT_EQ(run.code, kTruncationInsufficient);
    EXPECT_NE(run.err.find("error"), std::string::npos);
}

TEST(Simulate, ConfigErrorExitCode) {
    RunConfig cfg;
    cfg.steps = 0;
    EXPECT_EQ(simulate_with(cfg).code, kConfigError);
}

TEST(Simulate, Deterministic) {
    RunConfig cfg;
    cfg.input = {0.6, 0.3, cplx(0.4, 0.2)};
    cfg.params = {4.5, 4.0, 1.0, 0.5};
    cfg.steps = 30;
    const auto x = simulate_with(cfg);
    const auto y = simulate_with(cfg);
    ASSERT_EQ(x.code, kOk) << x.err;
    EXPECT_EQ(x.out, y.out);
}

TEST(Simulate, DetunedLiteralRowsAreNA) {
    RunConfig cfg;
    cfg.params.omega0 = 5.0;
    cfg.sources = {Source::literal};
    cfg.steps = 3;
    const auto run = simulate_with(cfg);
    ASSERT_EQ(run.code, kOk) << run.err;
    const auto ls = lines(run.out);
    EXPECT_NE(ls[1].find("literal-paper,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA"), std::string::npos);
}

TEST(Simulate, WritesToFile) {
    const auto path = std::filesystem::temp_directory_path() / "becsq_sim_test.csv";
    RunConfig cfg;
    cfg.steps = 2;
    cfg.output_path = path.string();
    const auto run = simulate_with(cfg);
    ASSERT_EQ(run.code, kOk);
    EXPECT_TRUE(run.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(lines(ss.str()).size(), 7u);
    std::filesystem::remove(path);
}

TEST(Verify, DefaultScenario) {
    std::ostringstream out, err;
    const int code = cmd_verify(RunConfig{}, out, err);
    EXPECT_EQ(code, kOk) << err.str();
    const auto text = out.str();
    EXPECT_EQ(text.find("UNRESOLVED"), std::string::npos);
    EXPECT_NE(text.find("\"Eq. (19)\",\"Q_a(t) (m=0)\",CONFIRMED"), std::string::npos);
    EXPECT_NE(text.find("# points"), std::string::npos);
}

TEST(Verify, MissingOracleSource) {
    RunConfig cfg;
    cfg.sources = {Source::literal, Source::moment_map};
    std::ostringstream out, err;
    EXPECT_EQ(cmd_verify(cfg, out, err), kConfigError);
}

TEST(Sweep, ThreeValuesTripleRows) {
    RunConfig cfg;
    cfg.axis = "r";
    cfg.values = {1.0, 0.0, 0.5};
    cfg.steps = 5;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_sweep(cfg, out, err), kOk) << err.str();
    const auto ls = lines(out.str());
    EXPECT_EQ(ls.size(), 1u + 3u * 15u);
    EXPECT_EQ(ls[1].rfind("r,0,", 0), 0u);
    EXPECT_EQ(ls.back().rfind("r,1,", 0), 0u);
}

TEST(Sweep, NumberStatisticsIndependentOfTheta) {
    RunConfig cfg;
    cfg.axis = "theta";
    cfg.values = {0.0, 1.3};
    cfg.steps = 6;
    cfg.sources = {Source::oracle};
    cfg.input = {0.5, 0.0, 0.7};
    std::ostringstream out, err;
    ASSERT_EQ(cmd_sweep(cfg, out, err), kOk) << err.str();
    const auto ls = lines(out.str());
    ASSERT_EQ(ls.size(), 13u);
    for (std::size_t i = 1; i <= 6; ++i) {
        std::vector<double> x, y;
        for (auto [row, dst] : {std::pair{ls[i], &x}, std::pair{ls[i + 6], &y}}) {
            const auto cells = split_list(row);
            for (int c : {4, 5, 6, 7, 8, 9}) dst->push_back(cells[c] == "NA" ? 0.0 : std::stod(cells[c]));
        }
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], y[k], 1e-10);
    }
}

TEST(Sweep, UnknownAxis) {
    RunConfig cfg;
    cfg.axis = "gravity";
    cfg.values = {1.0};
    std::ostringstream out, err;
    EXPECT_EQ(cmd_sweep(cfg, out, err), kConfigError);
}

TEST(Converge, VacuumTriviallyConverged) {
    RunConfig cfg;
    cfg.input = {0.0, 0.0, 0.0};
    cfg.steps = 4;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_converge(cfg, {8, 16}, out, err), kOk) << err.str();
    EXPECT_NE(err.str().find("converged at n_max=16"), std::string::npos);
}

TEST(Converge, StrongSqueezingInsufficient) {
    RunConfig cfg;
    cfg.input = {2.0, 0.0, 0.0};
    cfg.steps = 4;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_converge(cfg, {16, 24}, out, err), kTruncationInsufficient);
}

// The r = 1 squeezed vacuum still moves by ~1e-5 between cutoffs 48 and 64.
TEST(Converge, UnitSqueezingNotConvergedBy64) {
    RunConfig cfg;
    cfg.steps = 8;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_converge(cfg, {32, 48, 64}, out, err), kTruncationInsufficient);
    EXPECT_NE(err.str().find("not converged"), std::string::npos);
}

TEST(Converge, RejectsBadList) {
    RunConfig cfg;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_converge(cfg, {32, 16}, out, err), kConfigError);
    EXPECT_EQ(cmd_converge(cfg, {}, out, err), kConfigError);
}

}  // namespace
}  // namespace becsq::cli
