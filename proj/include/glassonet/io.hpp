#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bootstrap.hpp"
#include "common.hpp"
#include "community.hpp"
#include "cv.hpp"
#include "data.hpp"
#include "estimator.hpp"
#include "netgraph.hpp"

namespace glassonet::io {

using json = nlohmann::ordered_json;

/// 17 significant digits (round-trips a double); NA for non-finite.
inline std::string format_number(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Common header for every artifact.
inline json artifact(const std::string& kind, const json& config) {
    json j;
    j["schema_version"] = schema_version;
    j["version"] = version;
    j["kind"] = kind;
    j["config"] = config;
    return j;
}

/// One-line provenance comment for CSV and DOT outputs.
inline std::string provenance_comment(const std::string& prefix, const std::string& kind, const json& config) {
    return prefix + " glassonet " + std::string(version) + " schema_version=" + std::to_string(schema_version) +
           " kind=" + kind + " config=" + config.dump() + "\n";
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& rows) {
    if (!rows.is_array()) throw ValidationError("matrix must be an array of rows");
    const auto r = static_cast<Index>(rows.size());
    const Index c = r == 0 ? 0 : static_cast<Index>(rows[0].size());
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != c) throw ValidationError("ragged matrix in JSON");
        for (Index j = 0; j < c; ++j) {
            const auto& v = row[static_cast<std::size_t>(j)];
            if (!v.is_number()) throw ValidationError("matrix entries must be numbers");
            m(i, j) = v.get<double>();
        }
    }
    return m;
}

inline json vector_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vector vector_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

// ---- data -------------------------------------------------------------

inline std::string data_to_csv(const RawDataset& ds) {
    std::ostringstream out;
    for (Index j = 0; j < ds.p(); ++j) out << (j ? "," : "") << csv_field(ds.variable_names[static_cast<std::size_t>(j)]);
    out << "\n";
    for (Index i = 0; i < ds.n(); ++i) {
        for (Index j = 0; j < ds.p(); ++j) out << (j ? "," : "") << format_number(ds.values(i, j));
        out << "\n";
    }
    return out.str();
}

inline json standardization_report(const StandardizedMatrix& z, const std::vector<std::string>& names,
                                   const json& config) {
    json j = artifact("standardization", config);
    j["n"] = z.X.rows();
    j["p"] = z.X.cols();
    j["divisor"] = to_string(z.divisor);
    json cols = json::array();
    for (Index c = 0; c < z.X.cols(); ++c)
        cols.push_back({{"variable", names[static_cast<std::size_t>(c)]},
                        {"mean", z.column_means(c)},
                        {"sd", z.column_sds(c)}});
    j["columns"] = std::move(cols);
    return j;
}

inline json covariance_report(const CovarianceMatrix& raw, const CovarianceMatrix& ridged, double kappa_max,
                              const json& config) {
    json j = artifact("covariance", config);
    j["divisor"] = to_string(raw.divisor_convention);
    j["kappa_max"] = kappa_max;
    j["condition_number_before"] = std::isfinite(raw.condition_number) ? json(raw.condition_number) : json(nullptr);
    j["ridge_epsilon"] = ridged.ridge_epsilon;
    j["condition_number_after"] = ridged.condition_number;
    j["covariance"] = matrix_to_json(ridged.S);
    return j;
}

// ---- estimator ----------------------------------------------------------

inline json precision_to_json(const PrecisionEstimate& est, const json& config, const std::string& stage) {
    json j = artifact("precision", config);
    j["stage"] = stage;
    j["lambda"] = est.lambda;
    j["adaptive"] = est.weights.adaptive;
    if (est.weights.adaptive) j["delta"] = est.weights.delta;
    j["converged"] = est.converged;
    j["iterations"] = est.iterations;
    j["kkt_residual"] = est.kkt_residual;
    j["objective_trace"] = est.objective_trace;
    j["theta"] = matrix_to_json(est.theta);
    if (est.weights.adaptive) j["weights"] = matrix_to_json(est.weights.omega);
    j["warnings"] = est.warnings;
    return j;
}

inline PrecisionEstimate precision_from_json(const json& j) {
    PrecisionEstimate e;
    e.theta = matrix_from_json(j.at("theta"));
    e.lambda = j.at("lambda").get<double>();
    e.converged = j.at("converged").get<bool>();
    e.iterations = j.at("iterations").get<int>();
    e.kkt_residual = j.at("kkt_residual").get<double>();
    e.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    if (j.value("adaptive", false)) {
        e.weights.omega = matrix_from_json(j.at("weights"));
        e.weights.delta = j.at("delta").get<double>();
        e.weights.adaptive = true;
    } else {
        e.weights = PenaltyWeights::unit(e.theta.rows());
    }
    return e;
}

// ---- cv -----------------------------------------------------------------

inline json cv_to_json(const CvResult& cv, const json& config, const std::string& stage = "initial") {
    json j = artifact("cross_validation", config);
    j["stage"] = stage;
    j["lambda_grid"] = cv.lambda_grid;
    j["cv_curve"] = cv.cv_curve;  // +inf (all folds failed) serializes as null
    j["lambda_star"] = cv.lambda_star;
    j["lambda_star_index"] = cv.lambda_star_index;
    j["fold_losses"] = matrix_to_json(cv.fold_losses);
    j["fold_assignments"] = cv.fold_assignments;
    j["warnings"] = cv.warnings;
    return j;
}

inline std::string cv_curve_csv(const CvResult& cv, const json& config) {
    std::ostringstream out;
    out << provenance_comment("#", "cv_curve", config);
    out << "index,lambda,cv_loss";
    for (Index k = 0; k < cv.fold_losses.rows(); ++k) out << ",fold" << k + 1;
    out << "\n";
    for (std::size_t l = 0; l < cv.lambda_grid.size(); ++l) {
        out << l << "," << format_number(cv.lambda_grid[l]) << "," << format_number(cv.cv_curve[l]);
        for (Index k = 0; k < cv.fold_losses.rows(); ++k)
            out << "," << format_number(cv.fold_losses(k, static_cast<Index>(l)));
        out << "\n";
    }
    return out.str();
}

// ---- network ------------------------------------------------------------

inline json network_to_json(const WeightedNetwork& net, const json& config) {
    json j = artifact("network", config);
    json nodes = json::array();
    for (Index i = 0; i < net.p(); ++i) {
        json node{{"id", i}, {"label", net.node_labels[static_cast<std::size_t>(i)]}};
        node["domain"] = net.node_domains.empty() ? json(nullptr) : json(net.node_domains[static_cast<std::size_t>(i)]);
        nodes.push_back(std::move(node));
    }
    json edges = json::array();
    for (Index i = 0; i < net.p(); ++i)
        for (Index k = i + 1; k < net.p(); ++k)
            if (net.W(i, k) > 0.0) edges.push_back({{"i", i}, {"j", k}, {"weight", net.W(i, k)}, {"sign", net.edge_sign(i, k)}});
    j["nodes"] = std::move(nodes);
    j["edges"] = std::move(edges);
    return j;
}

inline WeightedNetwork network_from_json(const json& j) {
    const auto& nodes = j.at("nodes");
    const auto p = static_cast<Index>(nodes.size());
    WeightedNetwork net;
    net.W = Matrix::Zero(p, p);
    net.edge_sign = IntMatrix::Zero(p, p);
    bool any_domain = false;
    std::vector<std::string> domains;
    for (Index i = 0; i < p; ++i) {
        const auto& node = nodes[static_cast<std::size_t>(i)];
        if (node.at("id").get<Index>() != i) throw ValidationError("network nodes must be listed in id order");
        net.node_labels.push_back(node.at("label").get<std::string>());
        const auto& d = node.value("domain", json(nullptr));
        any_domain |= !d.is_null();
        domains.push_back(d.is_null() ? std::string() : d.get<std::string>());
    }
    if (any_domain) net.node_domains = std::move(domains);
    for (const auto& e : j.at("edges")) {
        const auto a = e.at("i").get<Index>();
        const auto b = e.at("j").get<Index>();
        if (a < 0 || b < 0 || a >= p || b >= p || a == b) throw ValidationError("edge endpoint out of range");
        net.W(a, b) = net.W(b, a) = e.at("weight").get<double>();
        net.edge_sign(a, b) = net.edge_sign(b, a) = e.at("sign").get<int>();
    }
    net.validate();
    return net;
}

inline WeightedNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open network file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("network file " + path + " is not valid JSON: " + e.what());
    }
    return network_from_json(j);
}

inline std::string network_to_dot(const WeightedNetwork& net, const json& config) {
    std::ostringstream out;
    out << provenance_comment("//", "network", config);
    out << "graph glassonet {\n";
    for (Index i = 0; i < net.p(); ++i) {
        out << "  n" << i << " [label=\"" << net.node_labels[static_cast<std::size_t>(i)] << "\"";
        if (!net.node_domains.empty()) out << ", domain=\"" << net.node_domains[static_cast<std::size_t>(i)] << "\"";
        out << "];\n";
    }
    for (Index i = 0; i < net.p(); ++i)
        for (Index k = i + 1; k < net.p(); ++k)
            if (net.W(i, k) > 0.0)
                out << "  n" << i << " -- n" << k << " [weight=" << format_number(net.W(i, k))
                    << ", color=" << (net.edge_sign(i, k) < 0 ? "red" : "blue") << "];\n";
    out << "}\n";
    return out.str();
}

// ---- centrality ---------------------------------------------------------

inline std::string centrality_csv(const CentralitySummary& c, const std::vector<std::string>& labels,
                                  const json& config) {
    std::ostringstream out;
    out << provenance_comment("#", "centrality", config);
    out << "node,strength,closeness,betweenness,component\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto k = static_cast<Index>(i);
        out << csv_field(labels[i]) << "," << format_number(c.strength(k)) << "," << format_number(c.closeness(k))
            << "," << format_number(c.betweenness(k)) << "," << c.component[i] << "\n";
    }
    return out.str();
}

inline json centrality_to_json(const CentralitySummary& c, const std::vector<std::string>& labels,
                               const json& config) {
    json j = artifact("centrality", config);
    j["edge_length_rule"] = c.edge_length_rule;
    j["nodes"] = labels;
    j["strength"] = vector_to_json(c.strength);
    j["closeness"] = vector_to_json(c.closeness);
    j["betweenness"] = vector_to_json(c.betweenness);
    j["component"] = c.component;
    return j;
}

// ---- communities --------------------------------------------------------

inline json partition_to_json(const Partition& part, const std::vector<std::string>& labels, const json& config) {
    json j = artifact("partition", config);
    j["t"] = part.t;
    j["nodes"] = labels;
    j["labels"] = part.labels;
    j["modularity"] = part.modularity;
    j["chosen_level"] = part.chosen_level;
    j["level_modularity"] = part.level_modularity;
    json merges = json::array();
    for (const auto& m : part.dendrogram)
        merges.push_back({{"a", m.a}, {"b", m.b}, {"merged", m.merged}, {"height", m.height}, {"delta_sigma", m.raw_height}});
    j["merges"] = std::move(merges);
    return j;
}

inline std::string partition_csv(const std::vector<int>& community, const std::vector<std::string>& labels,
                                 const json& config) {
    std::ostringstream out;
    out << provenance_comment("#", "partition", config);
    out << "node,community\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << csv_field(labels[i]) << "," << community[i] << "\n";
    return out.str();
}

// ---- bootstrap ----------------------------------------------------------

inline json measure_to_json(const MeasureSummary& s) {
    return {{"mean", vector_to_json(s.mean)},
            {"sd", vector_to_json(s.sd)},
            {"median", vector_to_json(s.median)},
            {"q025", vector_to_json(s.q025)},
            {"q975", vector_to_json(s.q975)}};
}

inline json stability_to_json(const MeasureStability& s) {
    return {{"abs_mean_diff", vector_to_json(s.abs_mean_diff)},
            {"sd", vector_to_json(s.sd)},
            {"top_k_fraction", vector_to_json(s.top_k_fraction)}};
}

inline json bootstrap_to_json(const BootstrapSummary& s, const std::optional<StabilityReport>& stability,
                              const json& config) {
    json j = artifact("bootstrap", config);
    j["nodes"] = s.node_labels;
    j["iterations"] = s.iterations;
    j["successes"] = s.success_count();
    j["failure_count"] = s.failure_count;
    j["fixed_lambda"] = s.fixed_lambda ? json(*s.fixed_lambda) : json(nullptr);
    j["fixed_adaptive_lambda"] = s.fixed_adaptive_lambda ? json(*s.fixed_adaptive_lambda) : json(nullptr);
    j["quantile_type"] = 7;
    j["strength"] = measure_to_json(s.strength);
    j["closeness"] = measure_to_json(s.closeness);
    j["betweenness"] = measure_to_json(s.betweenness);
    if (stability) {
        j["stability"] = {{"top_k", stability->top_k},
                          {"strength", stability_to_json(stability->strength)},
                          {"closeness", stability_to_json(stability->closeness)},
                          {"betweenness", stability_to_json(stability->betweenness)}};
    }
    json failures = json::array();
    for (std::size_t b = 0; b < s.failure_reasons.size(); ++b)
        if (!s.succeeded[b]) failures.push_back({{"iteration", b}, {"reason", s.failure_reasons[b]}});
    j["failures"] = std::move(failures);
    j["warnings"] = s.warnings;
    return j;
}

inline std::string bootstrap_csv(const BootstrapSummary& s, const std::optional<StabilityReport>& stability,
                                 const json& config) {
    std::ostringstream out;
    out << provenance_comment("#", "bootstrap", config);
    out << "node,measure,mean,sd,median,q025,q975";
    if (stability) out << ",abs_mean_diff,top_k_fraction";
    out << "\n";
    const std::pair<const char*, const MeasureSummary*> measures[] = {
        {"strength", &s.strength}, {"closeness", &s.closeness}, {"betweenness", &s.betweenness}};
    const MeasureStability* stab[] = {nullptr, nullptr, nullptr};
    if (stability) {
        stab[0] = &stability->strength;
        stab[1] = &stability->closeness;
        stab[2] = &stability->betweenness;
    }
    for (std::size_t i = 0; i < s.node_labels.size(); ++i) {
        const auto k = static_cast<Index>(i);
        for (int m = 0; m < 3; ++m) {
            const auto& ms = *measures[m].second;
            out << csv_field(s.node_labels[i]) << "," << measures[m].first << "," << format_number(ms.mean(k)) << ","
                << format_number(ms.sd(k)) << "," << format_number(ms.median(k)) << "," << format_number(ms.q025(k))
                << "," << format_number(ms.q975(k));
            if (stab[m]) out << "," << format_number(stab[m]->abs_mean_diff(k)) << "," << format_number(stab[m]->top_k_fraction(k));
            out << "\n";
        }
    }
    return out.str();
}

/// iteration x node table; failed iterations are written as NA.
inline std::string iteration_log_csv(const Matrix& log, const std::vector<std::string>& labels,
                                     const std::string& kind, const json& config) {
    std::ostringstream out;
    out << provenance_comment("#", kind, config);
    out << "iteration";
    for (const auto& l : labels) out << "," << csv_field(l);
    out << "\n";
    for (Index b = 0; b < log.rows(); ++b) {
        out << b;
        for (Index j = 0; j < log.cols(); ++j) out << "," << format_number(log(b, j));
        out << "\n";
    }
    return out.str();
}

/// Reads an iteration log written by iteration_log_csv; NA becomes NaN.
inline Matrix read_iteration_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open iteration log: " + path);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // iteration index
        while (std::getline(ss, cell, ','))
            row.push_back(cell == "NA" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

// ---- files --------------------------------------------------------------

inline void write_text(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
    if (!out) throw ValidationError("failed writing " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Writes strength.csv, closeness.csv, betweenness.csv (and communities.csv
/// when present) into dir.
inline std::vector<std::string> dump_iterations(const std::string& dir, const BootstrapSummary& s,
                                                const json& config) {
    std::vector<std::string> files;
    const std::pair<const char*, const Matrix*> logs[] = {
        {"strength", &s.strength_log}, {"closeness", &s.closeness_log}, {"betweenness", &s.betweenness_log}};
    for (const auto& [name, log] : logs) {
        const auto path = (std::filesystem::path(dir) / (std::string(name) + ".csv")).string();
        write_text(path, iteration_log_csv(*log, s.node_labels, std::string("bootstrap_") + name, config));
        files.push_back(path);
    }
    if (s.community_log.size() > 0) {
        const auto path = (std::filesystem::path(dir) / "communities.csv").string();
        Matrix m = s.community_log.cast<double>();
        for (Index b = 0; b < m.rows(); ++b)
            if (!s.succeeded[static_cast<std::size_t>(b)]) m.row(b).setConstant(std::numeric_limits<double>::quiet_NaN());
        write_text(path, iteration_log_csv(m, s.node_labels, "bootstrap_communities", config));
        files.push_back(path);
    }
    return files;
}

}  // namespace glassonet::io
