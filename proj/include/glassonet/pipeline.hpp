#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bootstrap.hpp"
#include "community.hpp"
#include "fit.hpp"
#include "io.hpp"
#include "netgraph.hpp"

namespace glassonet {

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_numerical = 3, exit_partial_bootstrap = 4 };

struct PipelineConfig {
    std::string input;
    std::string domains;
    std::string output = "glassonet_out";
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::vector<std::string> formats{"json", "csv", "dot"};

    Divisor divisor = Divisor::n_minus_1;
    double kappa_max = 1e6;

    int cv_folds = 5;
    int num_lambda = 10;
    double lam_min_ratio = 0.01;
    bool paper_literal = false;
    bool re_cv_adaptive = true;
    std::optional<double> lambda;
    std::optional<double> adaptive_lambda;

    double delta = 0.2;
    double tol = 1e-5;
    int max_iter = 500;

    double zero_tol = 1e-8;
    int walk_steps = 4;

    bool bootstrap = false;
    int bootstrap_iterations = 1000;
    bool fix_lambda = false;
    int top_k = 5;
    bool with_communities = false;
    std::string dump_iterations;

    bool wants(const std::string& format) const {
        return std::find(formats.begin(), formats.end(), format) != formats.end();
    }

    /// Range checks that do not need the data.
    void validate() const {
        if (formats.empty()) throw ValidationError("formats: at least one of json, csv, dot is required");
        for (const auto& f : formats)
            if (f != "json" && f != "csv" && f != "dot") throw ValidationError("formats: unknown format \"" + f + "\"");
        if (workers < 1) throw ValidationError("workers must be >= 1");
        if (!(kappa_max >= 1.0) || !std::isfinite(kappa_max)) throw ValidationError("data.kappa_max must be finite and >= 1");
        if (cv_folds < 2) throw ValidationError("cv.folds must be >= 2");
        if (num_lambda < 1) throw ValidationError("cv.num_lambda must be >= 1");
        if (!(lam_min_ratio > 0.0 && lam_min_ratio <= 1.0)) throw ValidationError("cv.lam_min_ratio must be in (0, 1]");
        if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda))) throw ValidationError("cv.lambda must be finite and >= 0");
        if (adaptive_lambda && !(*adaptive_lambda >= 0.0 && std::isfinite(*adaptive_lambda)))
            throw ValidationError("cv.adaptive_lambda must be finite and >= 0");
        if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("estimator.delta must be finite and > 0");
        if (!(tol > 0.0)) throw ValidationError("estimator.tol must be > 0");
        if (max_iter < 1) throw ValidationError("estimator.max_iter must be >= 1");
        if (!(zero_tol >= 0.0)) throw ValidationError("network.zero_tol must be >= 0");
        if (walk_steps < 1) throw ValidationError("community.walk_steps must be >= 1");
        if (bootstrap_iterations < 1) throw ValidationError("bootstrap.iterations must be >= 1");
        if (top_k < 1) throw ValidationError("bootstrap.top_k must be >= 1");
    }

    FitConfig fit_config() const {
        FitConfig f;
        f.divisor = divisor;
        f.kappa_max = kappa_max;
        f.cv.folds = cv_folds;
        f.cv.num_lambda = num_lambda;
        f.cv.lam_min_ratio = lam_min_ratio;
        f.cv.seed = seed;
        f.cv.paper_literal = paper_literal;
        f.cv.parallelism = workers;
        f.delta = delta;
        f.zero_tol = zero_tol;
        f.re_cv_adaptive = re_cv_adaptive;
        f.lambda = lambda;
        f.adaptive_lambda = adaptive_lambda;
        f.solver.tol = tol;
        f.solver.max_iter = max_iter;
        return f;
    }

    BootstrapConfig bootstrap_config() const {
        BootstrapConfig b;
        b.iterations = bootstrap_iterations;
        b.seed = seed;
        b.fit = fit_config();
        b.fix_lambda = fix_lambda;
        b.parallelism = workers;
        b.with_communities = with_communities;
        b.walk_steps = walk_steps;
        return b;
    }

    io::json to_json() const {
        io::json j;
        j["input"] = input;
        j["domains"] = domains;
        j["output"] = output;
        j["seed"] = seed;
        j["workers"] = workers;
        j["formats"] = formats;
        j["data"] = {{"divisor", to_string(divisor)}, {"kappa_max", kappa_max}};
        j["cv"] = {{"folds", cv_folds},
                   {"num_lambda", num_lambda},
                   {"lam_min_ratio", lam_min_ratio},
                   {"paper_literal", paper_literal},
                   {"re_cv_adaptive", re_cv_adaptive},
                   {"lambda", lambda ? io::json(*lambda) : io::json(nullptr)},
                   {"adaptive_lambda", adaptive_lambda ? io::json(*adaptive_lambda) : io::json(nullptr)}};
        j["estimator"] = {{"delta", delta}, {"tol", tol}, {"max_iter", max_iter}};
        j["network"] = {{"zero_tol", zero_tol}};
        j["community"] = {{"walk_steps", walk_steps}};
        j["bootstrap"] = {{"enabled", bootstrap},
                          {"iterations", bootstrap_iterations},
                          {"fix_lambda", fix_lambda},
                          {"top_k", top_k},
                          {"with_communities", with_communities},
                          {"dump_iterations", dump_iterations}};
        return j;
    }
};

namespace detail {

template <class T>
T parse_value(const std::string& key, const std::string& v) {
    auto fail = [&]() -> T { throw ValidationError(key + ": cannot parse \"" + v + "\""); };
    if constexpr (std::is_same_v<T, bool>) {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        return fail();
    } else if constexpr (std::is_same_v<T, std::string>) {
        return v;
    } else {
        T out{};
        const auto* end = v.data() + v.size();
        auto [ptr, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc() || ptr != end) return fail();
        return out;
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v + ",") {
        if (c == ',') {
            const auto t = std::string(detail::trim(cur));
            if (!t.empty()) out.push_back(t);
            cur.clear();
        } else if (c != '[' && c != ']' && c != '"') {
            cur += c;
        }
    }
    return out;
}

}  // namespace detail

/// Sets one dotted key ("cv.folds", "seed", ...) from its text value.
inline void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_value;
    const auto v = std::string(detail::trim(value));
    static const std::map<std::string, std::function<void(PipelineConfig&, const std::string&, const std::string&)>>
        setters = {
            {"input", [](auto& c, auto& k, auto& v) { c.input = parse_value<std::string>(k, v); }},
            {"domains", [](auto& c, auto& k, auto& v) { c.domains = parse_value<std::string>(k, v); }},
            {"output", [](auto& c, auto& k, auto& v) { c.output = parse_value<std::string>(k, v); }},
            {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_value<std::uint64_t>(k, v); }},
            {"workers", [](auto& c, auto& k, auto& v) { c.workers = parse_value<unsigned>(k, v); }},
            {"formats", [](auto& c, auto&, auto& v) { c.formats = detail::split_list(v); }},
            {"data.divisor", [](auto& c, auto&, auto& v) { c.divisor = parse_divisor(v); }},
            {"data.kappa_max", [](auto& c, auto& k, auto& v) { c.kappa_max = parse_value<double>(k, v); }},
            {"cv.folds", [](auto& c, auto& k, auto& v) { c.cv_folds = parse_value<int>(k, v); }},
            {"cv.num_lambda", [](auto& c, auto& k, auto& v) { c.num_lambda = parse_value<int>(k, v); }},
            {"cv.lam_min_ratio", [](auto& c, auto& k, auto& v) { c.lam_min_ratio = parse_value<double>(k, v); }},
            {"cv.paper_literal", [](auto& c, auto& k, auto& v) { c.paper_literal = parse_value<bool>(k, v); }},
            {"cv.re_cv_adaptive", [](auto& c, auto& k, auto& v) { c.re_cv_adaptive = parse_value<bool>(k, v); }},
            {"cv.lambda",
             [](auto& c, auto& k, auto& v) {
                 if (v.empty() || v == "none")
                     c.lambda.reset();
                 else
                     c.lambda = parse_value<double>(k, v);
             }},
            {"cv.adaptive_lambda",
             [](auto& c, auto& k, auto& v) {
                 if (v.empty() || v == "none")
                     c.adaptive_lambda.reset();
                 else
                     c.adaptive_lambda = parse_value<double>(k, v);
             }},
            {"estimator.delta", [](auto& c, auto& k, auto& v) { c.delta = parse_value<double>(k, v); }},
            {"estimator.tol", [](auto& c, auto& k, auto& v) { c.tol = parse_value<double>(k, v); }},
            {"estimator.max_iter", [](auto& c, auto& k, auto& v) { c.max_iter = parse_value<int>(k, v); }},
            {"network.zero_tol", [](auto& c, auto& k, auto& v) { c.zero_tol = parse_value<double>(k, v); }},
            {"community.walk_steps", [](auto& c, auto& k, auto& v) { c.walk_steps = parse_value<int>(k, v); }},
            {"bootstrap.enabled", [](auto& c, auto& k, auto& v) { c.bootstrap = parse_value<bool>(k, v); }},
            {"bootstrap.iterations",
             [](auto& c, auto& k, auto& v) { c.bootstrap_iterations = parse_value<int>(k, v); }},
            {"bootstrap.fix_lambda", [](auto& c, auto& k, auto& v) { c.fix_lambda = parse_value<bool>(k, v); }},
            {"bootstrap.top_k", [](auto& c, auto& k, auto& v) { c.top_k = parse_value<int>(k, v); }},
            {"bootstrap.with_communities",
             [](auto& c, auto& k, auto& v) { c.with_communities = parse_value<bool>(k, v); }},
            {"bootstrap.dump_iterations",
             [](auto& c, auto& k, auto& v) { c.dump_iterations = parse_value<std::string>(k, v); }},
        };
    const auto it = setters.find(key);
    if (it == setters.end()) throw ValidationError("unknown config key \"" + key + "\"");
    it->second(c, key, v);
}

/// Reads `key = value` lines with optional `[section]` headers (keys become
/// section.key), `#` comments and double-quoted strings.
inline void apply_config_file(PipelineConfig& c, std::istream& in, const std::string& source = "config") {
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments outside quotes.
        bool quoted = false;
        std::string body;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            if (ch == '#' && !quoted) break;
            body += ch;
        }
        const auto t = std::string(detail::trim(body));
        if (t.empty()) continue;
        auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
        if (t.front() == '[') {
            if (t.back() != ']') throw ValidationError(where() + "unterminated section header");
            section = std::string(detail::trim(std::string_view(t).substr(1, t.size() - 2)));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ValidationError(where() + "expected key = value");
        const auto key = std::string(detail::trim(std::string_view(t).substr(0, eq)));
        auto value = std::string(detail::trim(std::string_view(t).substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        try {
            apply_setting(c, section.empty() ? key : section + "." + key, value);
        } catch (const ValidationError& e) {
            throw ValidationError(where() + e.what());
        }
    }
}

inline void load_config_file(PipelineConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    apply_config_file(c, in, path);
}

/// Runs f, prefixing any error with the stage name and a remediation hint.
template <class F>
auto run_stage(const std::string& name, const std::string& hint, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(name + ": " + e.what() + " (hint: " + hint + ")");
    } catch (const NumericalError& e) {
        throw NumericalError(name + ": " + e.what() + " (hint: " + hint + ")");
    }
}

/// Collects artifacts under one output directory, in write order.
class ArtifactWriter {
public:
    ArtifactWriter(const PipelineConfig& cfg) : cfg_(cfg), config_json_(cfg.to_json()) {}

    const io::json& config() const { return config_json_; }
    const std::vector<std::string>& files() const { return files_; }

    void json(const std::string& name, const io::json& j) {
        if (cfg_.wants("json")) put(name, j.dump(2) + "\n");
    }
    void csv(const std::string& name, const std::string& text) {
        if (cfg_.wants("csv")) put(name, text);
    }
    void dot(const std::string& name, const std::string& text) {
        if (cfg_.wants("dot")) put(name, text);
    }

private:
    void put(const std::string& name, const std::string& text) {
        const auto path = (std::filesystem::path(cfg_.output) / name).string();
        io::write_text(path, text);
        files_.push_back(path);
    }

    const PipelineConfig& cfg_;
    io::json config_json_;
    std::vector<std::string> files_;
};

inline RawDataset load_input(const PipelineConfig& cfg) {
    return run_stage("load", "check the input path and CSV format", [&] {
        if (cfg.input.empty()) throw ValidationError("no input file given");
        auto raw = load_csv(cfg.input);
        if (!cfg.domains.empty()) load_domains(raw, cfg.domains);
        raw.validate();
        return raw;
    });
}

/// Estimation stages, writing each artifact as soon as it exists.
inline FitResult run_fit_stages(const RawDataset& raw, const PipelineConfig& cfg, ArtifactWriter& out) {
    const FitConfig fc = cfg.fit_config();
    run_stage("config", "adjust cv.folds or other settings to the data size", [&] { fc.validate(raw.n()); });
    FitResult r;
    r.standardized = run_stage("standardize", "drop or fix constant columns", [&] {
        return standardize(raw, fc.divisor);
    });
    out.json("standardization.json", io::standardization_report(r.standardized, raw.variable_names, out.config()));

    r.covariance = sample_covariance(r.standardized);
    r.ridged = run_stage("ridge", "raise data.kappa_max", [&] { return ridge_condition(r.covariance, fc.kappa_max); });
    out.json("covariance.json", io::covariance_report(r.covariance, r.ridged, fc.kappa_max, out.config()));

    double lambda = 0.0;
    if (fc.lambda) {
        lambda = *fc.lambda;
    } else {
        r.cv = run_stage("cross-validation", "try fewer folds, a larger cv.lam_min_ratio or a fixed cv.lambda",
                         [&] { return cross_validate(raw, fc.resolved_cv()); });
        lambda = r.cv->lambda_star;
        r.warnings.insert(r.warnings.end(), r.cv->warnings.begin(), r.cv->warnings.end());
        out.json("cv.json", io::cv_to_json(*r.cv, out.config()));
        out.csv("cv_curve.csv", io::cv_curve_csv(*r.cv, out.config()));
    }

    r.initial = run_stage("glasso", "raise estimator.max_iter or data.kappa_max",
                          [&] { return glasso_fit(r.ridged, lambda, fc.solver); });
    out.json("precision_initial.json", io::precision_to_json(r.initial, out.config(), "initial"));

    r.weights = adaptive_weights(r.initial.theta, fc.delta);
    double adaptive_lambda = lambda;
    if (fc.adaptive_lambda) {
        adaptive_lambda = *fc.adaptive_lambda;
    } else if (fc.re_cv_adaptive && !fc.lambda) {
        r.adaptive_cv = run_stage("adaptive cross-validation", "set cv.re_cv_adaptive = false or fix cv.adaptive_lambda",
                                  [&] { return cross_validate(raw, fc.resolved_cv(), r.weights); });
        adaptive_lambda = r.adaptive_cv->lambda_star;
        r.warnings.insert(r.warnings.end(), r.adaptive_cv->warnings.begin(), r.adaptive_cv->warnings.end());
        out.json("cv_adaptive.json", io::cv_to_json(*r.adaptive_cv, out.config(), "adaptive"));
    }
    r.adaptive = run_stage("adaptive glasso", "raise estimator.max_iter or estimator.delta",
                           [&] { return adaptive_glasso_fit(r.ridged, adaptive_lambda, r.weights, fc.solver); });
    out.json("precision_adaptive.json", io::precision_to_json(r.adaptive, out.config(), "adaptive"));
    for (const auto* est : {&r.initial, &r.adaptive})
        r.warnings.insert(r.warnings.end(), est->warnings.begin(), est->warnings.end());

    r.network = precision_to_adjacency(r.adaptive, fc.zero_tol, raw.variable_names, raw.domain_labels);
    out.json("network.json", io::network_to_json(r.network, out.config()));
    out.dot("network.dot", io::network_to_dot(r.network, out.config()));
    return r;
}

/// Walktrap on a network; an edgeless network yields singletons with no Q.
inline std::optional<Partition> run_community_stage(const WeightedNetwork& net, const PipelineConfig& cfg,
                                                    ArtifactWriter& out, std::vector<std::string>& warnings) {
    std::optional<Partition> part;
    std::vector<int> labels(static_cast<std::size_t>(net.p()));
    if (net.edge_count() == 0) {
        warnings.push_back("network has no edges; every node is its own community and modularity is undefined");
        std::iota(labels.begin(), labels.end(), 0);
        io::json j = io::artifact("partition", out.config());
        j["t"] = cfg.walk_steps;
        j["nodes"] = net.node_labels;
        j["labels"] = labels;
        j["modularity"] = nullptr;
        j["merges"] = io::json::array();
        out.json("partition.json", j);
    } else {
        part = run_stage("communities", "check community.walk_steps", [&] { return walktrap(net, cfg.walk_steps); });
        labels = part->labels;
        out.json("partition.json", io::partition_to_json(*part, net.node_labels, out.config()));
    }
    out.csv("partition.csv", io::partition_csv(labels, net.node_labels, out.config()));
    return part;
}

inline CentralitySummary run_centrality_stage(const WeightedNetwork& net, const PipelineConfig& cfg,
                                              ArtifactWriter& out) {
    auto c = centrality(net, cfg.workers);
    out.csv("centrality.csv", io::centrality_csv(c, net.node_labels, out.config()));
    out.json("centrality.json", io::centrality_to_json(c, net.node_labels, out.config()));
    return c;
}

inline BootstrapSummary run_bootstrap_stage(const RawDataset& raw, const FitResult& fit,
                                            const CentralitySummary& original, const PipelineConfig& cfg,
                                            ArtifactWriter& out) {
    BootstrapConfig bc = cfg.bootstrap_config();
    // Fixed-λ mode reuses the λs selected on the original data.
    if (bc.fix_lambda) {
        if (!bc.fit.lambda) bc.fit.lambda = fit.initial.lambda;
        if (!bc.fit.adaptive_lambda) bc.fit.adaptive_lambda = fit.adaptive.lambda;
    }
    auto summary = run_stage("bootstrap", "inspect failures in bootstrap.json; try --fix-lambda",
                             [&] { return bootstrap_centrality(raw, bc); });
    const auto report = centrality_rank_stability(summary, original, cfg.top_k);
    out.json("bootstrap.json", io::bootstrap_to_json(summary, report, out.config()));
    out.csv("bootstrap.csv", io::bootstrap_csv(summary, report, out.config()));
    if (!cfg.dump_iterations.empty()) io::dump_iterations(cfg.dump_iterations, summary, out.config());
    return summary;
}

struct PipelineResult {
    int exit_code = exit_ok;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    std::optional<FitResult> fit;
    std::optional<Partition> partition;
    std::optional<CentralitySummary> centrality;
    std::optional<BootstrapSummary> bootstrap;
};

/// Full run. Throws ValidationError / NumericalError on hard errors; see
/// exit_code_for for the mapping used by the command line tool.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
    run_stage("config", "fix the named setting", [&] { cfg.validate(); });
    const auto raw = load_input(cfg);
    run_stage("config", "adjust cv.folds or other settings to the data size", [&] {
        cfg.fit_config().validate(raw.n());
        if (cfg.bootstrap) cfg.bootstrap_config().validate(raw.n());
    });

    PipelineResult res;
    ArtifactWriter out(cfg);
    res.fit = run_fit_stages(raw, cfg, out);
    res.warnings = res.fit->warnings;
    res.partition = run_community_stage(res.fit->network, cfg, out, res.warnings);
    res.centrality = run_centrality_stage(res.fit->network, cfg, out);
    if (cfg.bootstrap) {
        res.bootstrap = run_bootstrap_stage(raw, *res.fit, *res.centrality, cfg, out);
        res.warnings.insert(res.warnings.end(), res.bootstrap->warnings.begin(), res.bootstrap->warnings.end());
        if (res.bootstrap->failure_count > 0) res.exit_code = exit_partial_bootstrap;
    }
    res.files = out.files();
    return res;
}

/// Exit status for an exception escaping a run.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return exit_validation;
    if (dynamic_cast<const NumericalError*>(&e)) return exit_numerical;
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return exit_validation;
    return exit_numerical;
}

}  // namespace glassonet
