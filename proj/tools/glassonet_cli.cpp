// Command line front end: fit, communities, centrality, bootstrap, simulate, pipeline.

#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "glassonet/pipeline.hpp"
#include "glassonet/simulate.hpp"

using namespace glassonet;

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

void setting(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [&ov, key](const std::string& v) { ov.emplace_back(key, v); }, help);
}

void switch_on(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_flag_callback(flag, [&ov, key] { ov.emplace_back(key, "true"); }, help);
}

struct Common {
    std::string config_path;
    Overrides ov;
};

void add_output_options(CLI::App* app, Common& c) {
    setting(app, c.ov, "-o,--output", "output", "Output directory");
    setting(app, c.ov, "--formats", "formats", "Comma-separated subset of json,csv,dot");
}

void add_fit_options(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "Config file (key = value, [section] headers)");
    setting(app, c.ov, "-i,--input", "input", "Data CSV (rows = individuals, columns = variables)");
    setting(app, c.ov, "--domains", "domains", "Sidecar CSV mapping variable to domain");
    add_output_options(app, c);
    setting(app, c.ov, "--seed", "seed", "Seed for all random streams");
    setting(app, c.ov, "--workers", "workers", "Worker threads");
    setting(app, c.ov, "--divisor", "data.divisor", "Standardization divisor: n-1 or n");
    setting(app, c.ov, "--kappa-max", "data.kappa_max", "Condition number cap for the ridge step");
    setting(app, c.ov, "--cv-folds", "cv.folds", "Cross-validation folds");
    setting(app, c.ov, "--num-lambda", "cv.num_lambda", "Points on the lambda grid");
    setting(app, c.ov, "--lam-min-ratio", "cv.lam_min_ratio", "lambda_min / lambda_max");
    setting(app, c.ov, "--lambda", "cv.lambda", "Use this lambda and skip cross-validation");
    switch_on(app, c.ov, "--paper-literal", "cv.paper_literal", "Standardize once on the full data before CV");
    switch_on(app, c.ov, "--re-cv-adaptive", "cv.re_cv_adaptive",
              "Cross-validate the adaptive stage with its weights (default)");
    app->add_flag_callback("--reuse-lambda", [&c] { c.ov.emplace_back("cv.re_cv_adaptive", "false"); },
                           "Give the adaptive stage the initial stage's lambda");
    setting(app, c.ov, "--adaptive-lambda", "cv.adaptive_lambda", "Use this lambda for the adaptive stage");
    setting(app, c.ov, "--delta", "estimator.delta", "Adaptive weight offset");
    setting(app, c.ov, "--tol", "estimator.tol", "Solver tolerance");
    setting(app, c.ov, "--max-iter", "estimator.max_iter", "Solver sweep limit");
    setting(app, c.ov, "--zero-tol", "network.zero_tol", "|theta_ij| at or below this is no edge");
}

void add_bootstrap_options(CLI::App* app, Common& c) {
    setting(app, c.ov, "--iterations", "bootstrap.iterations", "Bootstrap iterations B");
    switch_on(app, c.ov, "--fix-lambda", "bootstrap.fix_lambda", "Reuse the original lambda in every iteration");
    setting(app, c.ov, "--top-k", "bootstrap.top_k", "k for top-k rank stability");
    switch_on(app, c.ov, "--with-communities", "bootstrap.with_communities", "Run Walktrap in every iteration");
    setting(app, c.ov, "--dump-iterations", "bootstrap.dump_iterations", "Directory for per-iteration tables");
}

PipelineConfig resolve(const Common& c) {
    PipelineConfig cfg;
    if (!c.config_path.empty()) load_config_file(cfg, c.config_path);
    for (const auto& [k, v] : c.ov) apply_setting(cfg, k, v);
    return cfg;
}

void report(const std::vector<std::string>& files, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : files) std::cout << f << "\n";
}

int cmd_fit(const Common& c) {
    const auto cfg = resolve(c);
    cfg.validate();
    const auto raw = load_input(cfg);
    ArtifactWriter out(cfg);
    const auto fit = run_fit_stages(raw, cfg, out);
    report(out.files(), fit.warnings);
    std::cerr << "lambda " << io::format_number(fit.adaptive.lambda) << ", " << fit.network.edge_count()
              << " edges, kkt residual " << io::format_number(fit.adaptive.kkt_residual) << "\n";
    return exit_ok;
}

int cmd_communities(const Common& c, const std::string& network_path) {
    const auto cfg = resolve(c);
    cfg.validate();
    const auto net = run_stage("load", "pass a network.json written by fit", [&] { return io::load_network(network_path); });
    ArtifactWriter out(cfg);
    std::vector<std::string> warnings;
    const auto part = run_community_stage(net, cfg, out, warnings);
    report(out.files(), warnings);
    if (part) std::cerr << "modularity " << io::format_number(part->modularity) << "\n";
    return exit_ok;
}

int cmd_centrality(const Common& c, const std::string& network_path) {
    const auto cfg = resolve(c);
    cfg.validate();
    const auto net = run_stage("load", "pass a network.json written by fit", [&] { return io::load_network(network_path); });
    ArtifactWriter out(cfg);
    run_centrality_stage(net, cfg, out);
    report(out.files(), {});
    return exit_ok;
}

int cmd_bootstrap(const Common& c) {
    auto cfg = resolve(c);
    cfg.bootstrap = true;
    cfg.validate();
    const auto raw = load_input(cfg);
    run_stage("config", "adjust cv.folds or other settings to the data size",
              [&] { cfg.bootstrap_config().validate(raw.n()); });
    // The original fit supplies λ* and the reference centralities; its
    // artifacts are not written by this subcommand.
    PipelineConfig quiet = cfg;
    quiet.formats.clear();
    ArtifactWriter none(quiet);
    const auto fit = run_fit_stages(raw, cfg, none);
    const auto original = centrality(fit.network, cfg.workers);
    ArtifactWriter out(cfg);
    const auto summary = run_bootstrap_stage(raw, fit, original, cfg, out);
    report(out.files(), summary.warnings);
    std::cerr << summary.success_count() << " of " << summary.iterations << " iterations succeeded\n";
    return summary.failure_count > 0 ? exit_partial_bootstrap : exit_ok;
}

int cmd_pipeline(const Common& c) {
    const auto cfg = resolve(c);
    const auto res = run_pipeline(cfg);
    report(res.files, res.warnings);
    return res.exit_code;
}

struct SimulateArgs {
    SyntheticSpec spec;
    std::string pattern = "chain";
    std::string output = ".";
    std::string name = "synthetic";
};

int cmd_simulate(SimulateArgs& a) {
    a.spec.pattern = parse_pattern(a.pattern);
    const auto d = simulate(a.spec);
    io::json config{{"p", a.spec.p},
                    {"n", a.spec.n},
                    {"pattern", to_string(a.spec.pattern)},
                    {"magnitude", a.spec.magnitude},
                    {"edge_prob", a.spec.edge_prob},
                    {"block_strength", a.spec.block_strength},
                    {"seed", a.spec.seed}};
    const auto dir = std::filesystem::path(a.output);
    const auto csv = (dir / (a.name + ".csv")).string();
    const auto theta = (dir / (a.name + "_theta_true.json")).string();
    io::write_text(csv, io::data_to_csv(d.data));
    io::json j = io::artifact("theta_true", config);
    j["nodes"] = d.data.variable_names;
    j["theta"] = io::matrix_to_json(d.theta_true);
    io::write_json(theta, j);
    report({csv, theta}, {});
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse Gaussian graphical networks with adaptive graphical lasso"};
    app.set_version_flag("--version", std::string(glassonet::version));
    app.require_subcommand(1);

    Common fit_c, comm_c, cent_c, boot_c, pipe_c;
    std::string comm_network, cent_network;
    SimulateArgs sim;

    auto* fit = app.add_subcommand("fit", "Standardize, cross-validate, fit glasso and adaptive glasso, export the network");
    add_fit_options(fit, fit_c);

    auto* comm = app.add_subcommand("communities", "Walktrap communities of a fitted network");
    comm->add_option("--network", comm_network, "network.json from fit")->required();
    setting(comm, comm_c.ov, "--walk-steps", "community.walk_steps", "Random-walk length t");
    add_output_options(comm, comm_c);

    auto* cent = app.add_subcommand("centrality", "Strength, closeness and betweenness of a fitted network");
    cent->add_option("--network", cent_network, "network.json from fit")->required();
    setting(cent, cent_c.ov, "--workers", "workers", "Worker threads");
    add_output_options(cent, cent_c);

    auto* boot = app.add_subcommand("bootstrap", "Nonparametric bootstrap of centralities");
    add_fit_options(boot, boot_c);
    add_bootstrap_options(boot, boot_c);

    auto* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic dataset from a known sparse precision matrix");
    sim_cmd->add_option("--p", sim.spec.p, "Variables")->capture_default_str();
    sim_cmd->add_option("--n", sim.spec.n, "Rows")->capture_default_str();
    sim_cmd->add_option("--pattern", sim.pattern, "chain, hub, random or two_block")->capture_default_str();
    sim_cmd->add_option("--magnitude", sim.spec.magnitude, "|theta_ij| of true edges")->capture_default_str();
    sim_cmd->add_option("--edge-prob", sim.spec.edge_prob, "Edge probability (random)")->capture_default_str();
    sim_cmd->add_option("--block-strength", sim.spec.block_strength, "|theta_ij| within blocks (two_block)")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.spec.seed, "Seed")->capture_default_str();
    sim_cmd->add_option("-o,--output", sim.output, "Output directory")->capture_default_str();
    sim_cmd->add_option("--name", sim.name, "File name stem")->capture_default_str();

    auto* pipe = app.add_subcommand("pipeline", "Run every stage and write all artifacts");
    add_fit_options(pipe, pipe_c);
    setting(pipe, pipe_c.ov, "--walk-steps", "community.walk_steps", "Random-walk length t");
    switch_on(pipe, pipe_c.ov, "--bootstrap", "bootstrap.enabled", "Also run the bootstrap");
    add_bootstrap_options(pipe, pipe_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (*fit) return cmd_fit(fit_c);
        if (*comm) return cmd_communities(comm_c, comm_network);
        if (*cent) return cmd_centrality(cent_c, cent_network);
        if (*boot) return cmd_bootstrap(boot_c);
        if (*sim_cmd) return cmd_simulate(sim);
        if (*pipe) return cmd_pipeline(pipe_c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return exit_ok;
}
