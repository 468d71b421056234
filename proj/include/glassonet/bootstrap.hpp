#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "common.hpp"
#include "community.hpp"
#include "fit.hpp"
#include "netgraph.hpp"
#include "parallel.hpp"

namespace glassonet {

/// Row indices for one resample, given n and the iteration's seed.
using Resampler = std::function<std::vector<Index>(Index n, std::uint64_t seed)>;

inline std::vector<Index> resample_with_replacement(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::vector<Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = pick(rng);
    return rows;
}

struct BootstrapConfig {
    int iterations = 1000;
    std::uint64_t seed = 0;
    FitConfig fit;
    // Reuse the original data's λs for every resample instead of
    // cross-validating each one. fit.lambda / fit.adaptive_lambda supply
    // them; unset ones come from one fit of the original data.
    bool fix_lambda = false;
    unsigned parallelism = 1;
    bool with_communities = false;
    int walk_steps = 4;
    Resampler resampler;  // defaults to resample_with_replacement

    void validate(Index n) const {
        if (iterations < 1) throw ValidationError("bootstrap iterations must be >= 1");
        if (walk_steps < 1) throw ValidationError("walk steps must be >= 1");
        fit.validate(n);
    }
};

struct MeasureSummary {
    Vector mean, sd, median, q025, q975;
};

struct BootstrapSummary {
    std::vector<std::string> node_labels;
    int iterations = 0;
    int failure_count = 0;
    std::vector<bool> succeeded;
    std::vector<std::string> failure_reasons;  // one per iteration, empty on success
    std::vector<double> lambdas;               // adaptive-stage λ per iteration (NaN on failure)
    // B x p logs; failed iterations are NaN rows.
    Matrix strength_log, closeness_log, betweenness_log;
    Eigen::MatrixXi community_log;  // only with_communities; -1 rows on failure
    MeasureSummary strength, closeness, betweenness;
    std::optional<double> fixed_lambda;
    std::optional<double> fixed_adaptive_lambda;
    std::vector<std::string> warnings;

    int success_count() const { return iterations - failure_count; }
};

/// Type-7 (linear interpolation) sample quantile.
inline double quantile_type7(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Per-column statistics over the rows flagged in `use`.
inline MeasureSummary summarize_log(const Matrix& log, const std::vector<bool>& use) {
    const Index p = log.cols();
    MeasureSummary s{Vector(p), Vector(p), Vector(p), Vector(p), Vector(p)};
    for (Index j = 0; j < p; ++j) {
        std::vector<double> v;
        for (Index b = 0; b < log.rows(); ++b)
            if (use[static_cast<std::size_t>(b)]) v.push_back(log(b, j));
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        s.mean(j) = mean;
        s.sd(j) = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        s.median(j) = quantile_type7(v, 0.5);
        s.q025(j) = quantile_type7(v, 0.025);
        s.q975(j) = quantile_type7(v, 0.975);
    }
    return s;
}

/// Nonparametric bootstrap over rows. Each iteration b draws its rows from
/// a seed derived from (seed, b) and re-runs the full fit, so the summary
/// does not depend on worker count or scheduling. Iterations with a
/// degenerate resample or a failed/non-converged fit count as failures.
inline BootstrapSummary bootstrap_centrality(const RawDataset& raw, const BootstrapConfig& cfg) {
    raw.validate();
    cfg.validate(raw.n());
    const Index p = raw.p();
    const auto B = static_cast<std::size_t>(cfg.iterations);

    BootstrapSummary out;
    out.node_labels = raw.variable_names;
    out.iterations = cfg.iterations;

    FitConfig fit_cfg = cfg.fit;
    if (cfg.fix_lambda) {
        if (!fit_cfg.lambda) {
            const auto original = fit_network(raw, cfg.fit);
            fit_cfg.lambda = original.initial.lambda;
            if (!fit_cfg.adaptive_lambda) fit_cfg.adaptive_lambda = original.adaptive.lambda;
        }
        out.fixed_lambda = fit_cfg.lambda;
        out.fixed_adaptive_lambda = fit_cfg.adaptive_lambda ? fit_cfg.adaptive_lambda : fit_cfg.lambda;
    } else {
        fit_cfg.lambda.reset();
        fit_cfg.adaptive_lambda.reset();
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.strength_log = Matrix::Constant(static_cast<Index>(B), p, nan);
    out.closeness_log = Matrix::Constant(static_cast<Index>(B), p, nan);
    out.betweenness_log = Matrix::Constant(static_cast<Index>(B), p, nan);
    if (cfg.with_communities) out.community_log = Eigen::MatrixXi::Constant(static_cast<Index>(B), p, -1);
    out.succeeded.assign(B, false);
    out.failure_reasons.assign(B, "");
    out.lambdas.assign(B, nan);

    const std::uint64_t base = stream_seed(cfg.seed, Stream::bootstrap);
    const Resampler& draw = cfg.resampler ? cfg.resampler : Resampler(resample_with_replacement);

    parallel_for(B, cfg.parallelism, [&](std::size_t b) {
        try {
            const auto rows = draw(raw.n(), hash_seed(base, b));
            const RawDataset sample = raw.rows(rows);
            FitConfig local = fit_cfg;
            local.cv.parallelism = 1;
            const auto fit = fit_network(sample, local);
            if (!fit.initial.converged || !fit.adaptive.converged) throw NumericalError("glasso did not converge");
            const auto c = centrality(fit.network);
            const auto row = static_cast<Index>(b);
            out.strength_log.row(row) = c.strength.transpose();
            out.closeness_log.row(row) = c.closeness.transpose();
            out.betweenness_log.row(row) = c.betweenness.transpose();
            out.lambdas[b] = fit.adaptive.lambda;
            if (cfg.with_communities) {
                Eigen::VectorXi labels = Eigen::VectorXi::Constant(p, -1);
                if (fit.network.edge_count() > 0) {
                    const auto part = walktrap(fit.network, cfg.walk_steps);
                    for (Index i = 0; i < p; ++i) labels(i) = part.labels[static_cast<std::size_t>(i)];
                } else {
                    for (Index i = 0; i < p; ++i) labels(i) = static_cast<int>(i);
                }
                out.community_log.row(row) = labels.transpose();
            }
            out.succeeded[b] = true;
        } catch (const std::exception& e) {
            out.failure_reasons[b] = e.what();
        }
    });

    out.failure_count = static_cast<int>(std::count(out.succeeded.begin(), out.succeeded.end(), false));
    if (out.failure_count == cfg.iterations)
        throw NumericalError("every bootstrap iteration failed (first reason: " + out.failure_reasons.front() + ")");
    if (out.failure_count > 0)
        out.warnings.push_back(std::to_string(out.failure_count) + " of " + std::to_string(cfg.iterations) +
                               " bootstrap iterations failed and were excluded");

    out.strength = summarize_log(out.strength_log, out.succeeded);
    out.closeness = summarize_log(out.closeness_log, out.succeeded);
    out.betweenness = summarize_log(out.betweenness_log, out.succeeded);
    return out;
}

struct MeasureStability {
    Vector abs_mean_diff;   // |bootstrap mean − original|
    Vector sd;              // bootstrap SD
    Vector top_k_fraction;  // share of successful iterations with the node in the top k
};

struct StabilityReport {
    int top_k = 5;
    MeasureStability strength, closeness, betweenness;
};

namespace detail {

inline Vector top_k_fraction(const Matrix& log, const std::vector<bool>& use, int k) {
    const Index p = log.cols();
    Vector count = Vector::Zero(p);
    double used = 0.0;
    std::vector<Index> idx(static_cast<std::size_t>(p));
    for (Index b = 0; b < log.rows(); ++b) {
        if (!use[static_cast<std::size_t>(b)]) continue;
        used += 1.0;
        std::iota(idx.begin(), idx.end(), Index{0});
        // Ties go to the lower node index.
        std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index c) { return log(b, a) > log(b, c); });
        for (Index r = 0; r < std::min<Index>(k, p); ++r) count(idx[static_cast<std::size_t>(r)]) += 1.0;
    }
    return used > 0.0 ? Vector(count / used) : count;
}

inline MeasureStability stability(const Matrix& log, const MeasureSummary& s, const Vector& original,
                                  const std::vector<bool>& use, int k) {
    return {(s.mean - original).cwiseAbs(), s.sd, top_k_fraction(log, use, k)};
}

}  // namespace detail

inline StabilityReport centrality_rank_stability(const BootstrapSummary& summary, const CentralitySummary& original,
                                                 int top_k = 5) {
    const Index p = static_cast<Index>(summary.node_labels.size());
    if (original.strength.size() != p || original.closeness.size() != p || original.betweenness.size() != p ||
        summary.strength_log.cols() != p)
        throw ValidationError("bootstrap summary and original centralities cover different node sets");
    if (top_k < 1) throw ValidationError("top_k must be >= 1");
    StabilityReport r;
    r.top_k = top_k;
    r.strength = detail::stability(summary.strength_log, summary.strength, original.strength, summary.succeeded, top_k);
    r.closeness =
        detail::stability(summary.closeness_log, summary.closeness, original.closeness, summary.succeeded, top_k);
    r.betweenness =
        detail::stability(summary.betweenness_log, summary.betweenness, original.betweenness, summary.succeeded, top_k);
    return r;
}

}  // namespace glassonet
