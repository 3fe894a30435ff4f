#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frisk/rng.hpp"
#include "frisk/timeseries.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli_path;

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + g_cli_path + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        prices_ = (dir_ / "prices.csv").string();
        write_prices(prices_, 3000, 0.0464, 0.10);
        params_config_ = (dir_ / "params.json").string();
        json cfg = {{"params", {{"gaussian", {{"sigma2_per_year", 0.0464},
                                              {"mu_per_year", 0.1102}}}}}};
        std::ofstream(params_config_) << cfg.dump(2);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }

    // geometric Brownian prices at the daily interval
    static void write_prices(const std::string& path, int n_days,
                             double sigma2, double mu_year) {
        frisk::Rng rng(4242);
        const double dt = frisk::default_dt;
        const double s = std::sqrt(sigma2 * dt);
        std::ofstream out(path);
        out << "date,close\n";
        out.precision(12);
        double logp = std::log(100.0);
        for (int i = 0; i < n_days; ++i) {
            out << "d" << 100000 + i << ',' << std::exp(logp) << '\n';
            logp += (mu_year - 0.5 * sigma2) * dt + s * rng.normal();
        }
    }

    std::string out_dir(const std::string& tag) const {
        return (dir_ / tag).string();
    }

    fs::path dir_;
    std::string prices_;
    std::string params_config_;
};

} // namespace

TEST_F(CliTest, RiskTableFromInlineParameters) {
    const std::string out = out_dir("risk_inline");
    ASSERT_EQ(run_cli("risk --config " + params_config_ + " --model gaussian"
                      " --pstar 0.01 0.05 --horizon 1 10 --out " + out), 0);
    ASSERT_TRUE(fs::exists(fs::path(out) / "risk_table.csv"));
    ASSERT_TRUE(fs::exists(fs::path(out) / "risk_table.json"));

    json j;
    std::ifstream(fs::path(out) / "risk_table.json") >> j;
    ASSERT_EQ(j.at("rows").size(), 4u);
    for (const auto& row : j["rows"]) {
        const double p = row.at("pstar").get<double>();
        const int h = row.at("horizon_days").get<int>();
        const oracles::GaussRisk ref =
            oracles::gaussian_risk(0.0464, 0.1102, h * frisk::default_dt, p);
        EXPECT_NEAR(row.at("lambda_star").get<double>(), ref.lambda_star, 1e-7);
        EXPECT_NEAR(row.at("estar").get<double>(), ref.estar, 1e-7);
    }
    // manifest carries version, config hash, and seed
    const json& man = j.at("manifest");
    EXPECT_TRUE(man.contains("version"));
    EXPECT_TRUE(man.contains("config_hash"));
    EXPECT_EQ(man.at("seed").get<std::uint64_t>(), 42u);

    const std::string csv = slurp(fs::path(out) / "risk_table.csv");
    EXPECT_EQ(count_lines(csv), 5u); // header + 4 rows
    EXPECT_NE(csv.find("model,pstar,horizon_days"), std::string::npos);
}

TEST_F(CliTest, QuadratureModeMatchesFft) {
    const std::string a = out_dir("mode_fft"), b = out_dir("mode_quad");
    ASSERT_EQ(run_cli("risk --config " + params_config_ + " --model gaussian"
                      " --pstar 0.01 --horizon 1 --mode fft --out " + a), 0);
    ASSERT_EQ(run_cli("risk --config " + params_config_ + " --model gaussian"
                      " --pstar 0.01 --horizon 1 --mode quadrature --out " + b), 0);
    json ja, jb;
    std::ifstream(fs::path(a) / "risk_table.json") >> ja;
    std::ifstream(fs::path(b) / "risk_table.json") >> jb;
    EXPECT_NEAR(ja["rows"][0]["lambda_star"].get<double>(),
                jb["rows"][0]["lambda_star"].get<double>(), 1e-6);
    EXPECT_EQ(jb["rows"][0]["mode"].get<std::string>(), "quadrature");
}

TEST_F(CliTest, HistoricalEstimatorFromPrices) {
    const std::string out = out_dir("risk_hist");
    ASSERT_EQ(run_cli("risk --input " + prices_ + " --model historical"
                      " --pstar 0.05 --horizon 1 --out " + out), 0);
    json j;
    std::ifstream(fs::path(out) / "risk_table.json") >> j;
    ASSERT_EQ(j["rows"].size(), 1u);
    EXPECT_EQ(j["rows"][0]["mode"].get<std::string>(), "historical");
    // daily 5% VaR of a 21.5% annual-vol series: within a broad sane band
    const double var = j["rows"][0]["lambda_star"].get<double>();
    EXPECT_GT(var, 0.01);
    EXPECT_LT(var, 0.05);
}

TEST_F(CliTest, CalibrateGaussianFromPrices) {
    const std::string out = out_dir("calibrate");
    ASSERT_EQ(run_cli("calibrate --input " + prices_ + " --model gaussian --out " + out), 0);
    ASSERT_TRUE(fs::exists(fs::path(out) / "calibrate_gaussian.json"));
    ASSERT_TRUE(fs::exists(fs::path(out) / "calibrate_index.json"));
    json j;
    std::ifstream(fs::path(out) / "calibrate_gaussian.json") >> j;
    EXPECT_NEAR(j["params"]["sigma2_per_year"].get<double>(), 0.0464, 0.15 * 0.0464);
}

TEST_F(CliTest, CurveCommandWrites100Points) {
    const std::string out = out_dir("curve");
    ASSERT_EQ(run_cli("curve --config " + params_config_ + " --model gaussian"
                      " --horizon 1 --out " + out), 0);
    const fs::path f = fs::path(out) / "curve_gaussian_h1.csv";
    ASSERT_TRUE(fs::exists(f));
    const std::string body = slurp(f);
    EXPECT_EQ(count_lines(body), 101u); // header + 100 significance levels
    // endpoints of the requested range appear
    EXPECT_NE(body.find("0.001"), std::string::npos);
    EXPECT_NE(body.find("0.1"), std::string::npos);
}

TEST_F(CliTest, BootstrapIsSeedReproducible) {
    const std::string a = out_dir("boot_a"), b = out_dir("boot_b"), c = out_dir("boot_c");
    const std::string common = "bootstrap --input " + prices_ +
        " --model gaussian --pstar 0.01 --horizon 1 --mb 100 --alpha 0.16 ";
    ASSERT_EQ(run_cli(common + "--seed 7 --out " + a), 0);
    ASSERT_EQ(run_cli(common + "--seed 7 --out " + b), 0);
    ASSERT_EQ(run_cli(common + "--seed 8 --out " + c), 0);
    const std::string ta = slurp(fs::path(a) / "bootstrap_table.csv");
    EXPECT_EQ(ta, slurp(fs::path(b) / "bootstrap_table.csv"));
    EXPECT_NE(ta, slurp(fs::path(c) / "bootstrap_table.csv"));
    EXPECT_EQ(slurp(fs::path(a) / "replicas_gaussian_p0.01_h1.csv"),
              slurp(fs::path(b) / "replicas_gaussian_p0.01_h1.csv"));
    json j;
    std::ifstream(fs::path(a) / "bootstrap_table.json") >> j;
    const auto& row = j["rows"][0];
    const double lo = row["ci"][0].get<double>();
    const double hi = row["ci"][1].get<double>();
    const double central = row["lambda_star"].get<double>();
    EXPECT_LT(lo, hi);
    // central estimate within the 68% band stretched by half its width
    EXPECT_GT(central, lo - 0.5 * (hi - lo));
    EXPECT_LT(central, hi + 0.5 * (hi - lo));
}

TEST_F(CliTest, ErrorsExitNonzero) {
    EXPECT_NE(run_cli("risk --model gaussian --pstar 0.01 --horizon 1 --out " +
                      out_dir("err1")), 0); // no input, no params
    EXPECT_NE(run_cli("risk --config " + params_config_ +
                      " --model gaussian --pstar 0.9 --out " + out_dir("err2")), 0);
    EXPECT_NE(run_cli("calibrate --out " + out_dir("err3")), 0); // input required
    EXPECT_NE(run_cli("risk --input /nonexistent.csv --model historical --out " +
                      out_dir("err4")), 0);
    EXPECT_NE(run_cli("frobnicate"), 0); // unknown subcommand
    EXPECT_NE(run_cli(""), 0);           // subcommand required
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
    // config says horizon 10; flag narrows it to 1
    const std::string cfg_path = (dir_ / "override.json").string();
    json cfg = {{"horizon", {10}}, {"pstar", {0.05}},
                {"params", {{"gaussian", {{"sigma2_per_year", 0.0464},
                                          {"mu_per_year", 0.1102}}}}}};
    std::ofstream(cfg_path) << cfg.dump();
    const std::string out = out_dir("override");
    ASSERT_EQ(run_cli("risk --config " + cfg_path + " --model gaussian"
                      " --horizon 1 --out " + out), 0);
    json j;
    std::ifstream(fs::path(out) / "risk_table.json") >> j;
    ASSERT_EQ(j["rows"].size(), 1u);
    EXPECT_EQ(j["rows"][0]["horizon_days"].get<int>(), 1);
    EXPECT_EQ(j["rows"][0]["pstar"].get<double>(), 0.05);
}

int main_impl(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <risk_cli path> [gtest args]\n", argv[0]);
        return 2;
    }
    g_cli_path = argv[1];
    // splice out our positional argument before gtest parses the rest
    std::vector<char*> args;
    args.push_back(argv[0]);
    for (int i = 2; i < argc; ++i) args.push_back(argv[i]);
    int n = static_cast<int>(args.size());
    ::testing::InitGoogleTest(&n, args.data());
    return RUN_ALL_TESTS();
}

int main(int argc, char** argv) { return main_impl(argc, argv); }
