#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "glassonet/pipeline.hpp"
#include "glassonet/simulate.hpp"

using namespace glassonet;
namespace fs = std::filesystem;

namespace {

const std::string data_dir = GLASSONET_DATA_DIR;
const std::string cli = GLASSONET_CLI_PATH;

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("glassonet_test_pipeline_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

PipelineConfig fixture_config(const fs::path& out) {
    PipelineConfig c;
    c.input = data_dir + "/synthetic_p10_n50.csv";
    c.output = out.string();
    return c;
}

}  // namespace

TEST(Pipeline, FixtureEndToEnd) {
    const auto out = scratch("e2e");
    const auto res = run_pipeline(fixture_config(out));
    EXPECT_EQ(res.exit_code, exit_ok);
    ASSERT_TRUE(res.fit);
    EXPECT_LE(res.fit->initial.kkt_residual, 1e-4);
    EXPECT_LE(res.fit->adaptive.kkt_residual, 1e-4);
    const std::vector<std::string> expected{
        "standardization.json", "covariance.json", "cv.json",        "cv_curve.csv",   "precision_initial.json",
        "cv_adaptive.json",     "precision_adaptive.json", "network.json", "network.dot", "partition.json",
        "partition.csv",        "centrality.csv",  "centrality.json"};
    ASSERT_EQ(res.files.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        EXPECT_EQ(fs::path(res.files[k]).filename(), expected[k]);
        EXPECT_TRUE(fs::exists(res.files[k]));
    }
    const auto adaptive = io::json::parse(slurp(out / "precision_adaptive.json"));
    EXPECT_LE(adaptive["kkt_residual"].get<double>(), 1e-4);
    EXPECT_EQ(adaptive["config"], fixture_config(out).to_json());
    fs::remove_all(out);
}

TEST(Pipeline, MatchesLibraryFit) {
    const auto out = scratch("lib");
    const auto cfg = fixture_config(out);
    const auto res = run_pipeline(cfg);
    const auto fit = fit_network(load_csv(cfg.input), cfg.fit_config());
    EXPECT_EQ(res.fit->adaptive.theta, fit.adaptive.theta);
    EXPECT_EQ(res.fit->network.W, fit.network.W);
    fs::remove_all(out);
}

TEST(Pipeline, ReuseLambdaSkipsAdaptiveCv) {
    const auto out = scratch("reuse");
    auto cfg = fixture_config(out);
    cfg.re_cv_adaptive = false;
    const auto res = run_pipeline(cfg);
    EXPECT_FALSE(res.fit->adaptive_cv);
    EXPECT_EQ(res.fit->adaptive.lambda, res.fit->initial.lambda);
    EXPECT_FALSE(fs::exists(out / "cv_adaptive.json"));
    cfg.re_cv_adaptive = true;
    cfg.adaptive_lambda = 0.05;
    EXPECT_EQ(run_pipeline(cfg).fit->adaptive.lambda, 0.05);
    fs::remove_all(out);
}

TEST(Pipeline, FoldsAboveRowsFailsBeforeComputing) {
    const auto out = scratch("kn");
    auto cfg = fixture_config(out);
    cfg.cv_folds = 51;
    EXPECT_THROW(run_pipeline(cfg), ValidationError);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Pipeline, FixedLambdaIgnoresSeed) {
    const auto a_dir = scratch("seed_a");
    auto a = fixture_config(a_dir);
    a.lambda = 0.15;
    a.seed = 1;
    auto b = a;
    b.seed = 2;
    EXPECT_EQ(run_pipeline(a).fit->adaptive.theta, run_pipeline(b).fit->adaptive.theta);
    fs::remove_all(a_dir);
}

TEST(Pipeline, BootstrapArtifactsAndPartialFailureCode) {
    const auto out = scratch("boot");
    // One nonzero entry: resamples that miss row 0 have a constant column.
    const auto csv = out / "sparse.csv";
    fs::create_directories(out);
    {
        std::ofstream f(csv);
        f << "a,b,c\n";
        std::mt19937_64 rng(3);
        std::normal_distribution<double> z;
        for (int i = 0; i < 20; ++i) f << z(rng) << "," << z(rng) << "," << (i == 0 ? 1 : 0) << "\n";
    }
    PipelineConfig cfg;
    cfg.input = csv.string();
    cfg.output = (out / "run").string();
    cfg.bootstrap = true;
    cfg.bootstrap_iterations = 20;
    cfg.fix_lambda = true;
    // Cross-validation would also hit the constant column, so λ is given.
    cfg.lambda = 0.1;
    cfg.dump_iterations = (out / "iters").string();
    const auto res = run_pipeline(cfg);
    ASSERT_TRUE(res.bootstrap);
    EXPECT_GT(res.bootstrap->failure_count, 0);
    EXPECT_EQ(res.exit_code, exit_partial_bootstrap);
    EXPECT_TRUE(fs::exists(out / "run" / "bootstrap.json"));
    EXPECT_TRUE(fs::exists(out / "iters" / "strength.csv"));
    const auto j = io::json::parse(slurp(out / "run" / "bootstrap.json"));
    EXPECT_EQ(j["failure_count"].get<int>() + j["successes"].get<int>(), 20);
    EXPECT_EQ(j["fixed_lambda"].get<double>(), 0.1);
    EXPECT_EQ(run_cli("pipeline -i " + csv.string() + " -o " + (out / "cli").string() +
                      " --bootstrap --iterations 20 --fix-lambda --lambda 0.1"),
              exit_partial_bootstrap);
    fs::remove_all(out);
}

TEST(Cli, ExitCodes) {
    const auto out = scratch("codes");
    const std::string fixture = data_dir + "/synthetic_p10_n50.csv";
    EXPECT_EQ(run_cli("pipeline -i " + fixture + " -o " + out.string()), exit_ok);
    EXPECT_EQ(run_cli("pipeline -i " + fixture + " -o " + (out / "x").string() + " --cv-folds 51"), exit_validation);
    EXPECT_FALSE(fs::exists(out / "x"));
    EXPECT_EQ(run_cli("fit -i " + (out / "missing.csv").string()), exit_validation);
    EXPECT_EQ(run_cli("fit --bogus"), exit_validation);
    const auto constant = out / "constant.csv";
    std::ofstream(constant) << "a,b\n1,2\n1,3\n1,5\n";
    EXPECT_EQ(run_cli("fit -i " + constant.string() + " --lambda 0.1 -o " + (out / "c").string()), exit_numerical);
    fs::remove_all(out);
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
    const auto out = scratch("bytes");
    const auto copy = scratch("bytes_copy");
    const std::string args = "pipeline -i " + data_dir + "/synthetic_p10_n50.csv -o " + out.string() +
                             " --seed 7 --bootstrap --iterations 30 --workers 2";
    ASSERT_EQ(run_cli(args), exit_ok);
    fs::copy(out, copy, fs::copy_options::recursive);
    fs::remove_all(out);
    ASSERT_EQ(run_cli(args), exit_ok);
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(copy)) {
        EXPECT_EQ(slurp(entry.path()), slurp(out / entry.path().filename())) << entry.path();
        ++compared;
    }
    EXPECT_EQ(compared, 15u);
    fs::remove_all(out);
    fs::remove_all(copy);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto out = scratch("cfg");
    fs::create_directories(out);
    const auto cfg = out / "run.toml";
    std::ofstream(cfg) << "input = \"" << data_dir << "/synthetic_p10_n50.csv\"\n"
                       << "output = \"" << (out / "a").string() << "\"\n"
                       << "[cv]\nfolds = 4\n";
    ASSERT_EQ(run_cli("fit --config " + cfg.string() + " --cv-folds 3"), exit_ok);
    const auto j = io::json::parse(slurp(out / "a" / "cv.json"));
    EXPECT_EQ(j["config"]["cv"]["folds"], 3);
    EXPECT_EQ(j["fold_losses"].size(), 3u);
    fs::remove_all(out);
}

TEST(Cli, StageSubcommandsChain) {
    const auto out = scratch("stages");
    const std::string fixture = data_dir + "/table1_synthetic.csv";
    ASSERT_EQ(run_cli("fit -i " + fixture + " --domains " + data_dir + "/table1_synthetic.domains.csv -o " +
                      out.string()),
              exit_ok);
    ASSERT_EQ(run_cli("communities --network " + (out / "network.json").string() + " -o " + out.string()), exit_ok);
    ASSERT_EQ(run_cli("centrality --network " + (out / "network.json").string() + " -o " + out.string()), exit_ok);
    const auto net = io::load_network((out / "network.json").string());
    EXPECT_EQ(net.p(), 41);
    EXPECT_EQ(net.node_domains.front(), "Somatic");
    const auto part = io::json::parse(slurp(out / "partition.json"));
    EXPECT_EQ(part["labels"].size(), 41u);
    EXPECT_TRUE(fs::exists(out / "centrality.csv"));
    fs::remove_all(out);
}

TEST(Cli, SimulateWritesDataAndTruth) {
    const auto out = scratch("sim");
    ASSERT_EQ(run_cli("simulate --p 4 --n 30 --pattern hub --seed 3 -o " + out.string() + " --name s"), exit_ok);
    const auto raw = load_csv((out / "s.csv").string());
    EXPECT_EQ(raw.n(), 30);
    EXPECT_EQ(raw.p(), 4);
    const auto truth = io::json::parse(slurp(out / "s_theta_true.json"));
    const Matrix theta = io::matrix_from_json(truth["theta"]);
    SyntheticSpec spec;
    spec.p = 4;
    spec.n = 30;
    spec.pattern = GraphPattern::hub;
    spec.seed = 3;
    const auto direct = simulate(spec);
    EXPECT_EQ(theta, direct.theta_true);
    EXPECT_EQ(raw.values, direct.data.values);
    EXPECT_EQ(run_cli("simulate --pattern ring -o " + out.string()), exit_validation);
    fs::remove_all(out);
}
