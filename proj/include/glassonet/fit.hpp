#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cv.hpp"
#include "data.hpp"
#include "estimator.hpp"
#include "netgraph.hpp"

namespace glassonet {

/// Settings for one pass data -> adaptive network.
struct FitConfig {
    Divisor divisor = Divisor::n_minus_1;
    double kappa_max = 1e6;
    CvConfig cv;  // folds, grid, seed, paper_literal, parallelism
    double delta = 0.2;
    double zero_tol = 1e-8;
    // Cross-validate the adaptive stage again with its weights fixed;
    // otherwise it reuses the initial stage's λ.
    bool re_cv_adaptive = true;
    std::optional<double> lambda;           // skips cross-validation when set
    std::optional<double> adaptive_lambda;  // fixes the adaptive stage's λ
    SolverOptions solver;

    CvConfig resolved_cv() const {
        CvConfig c = cv;
        c.divisor = divisor;
        c.kappa_max = kappa_max;
        c.delta = delta;
        c.solver = solver;
        return c;
    }

    void validate(Index n) const {
        if (!(kappa_max >= 1.0) || !std::isfinite(kappa_max)) throw ValidationError("kappa_max must be finite and >= 1");
        if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be finite and > 0");
        if (!(zero_tol >= 0.0)) throw ValidationError("zero_tol must be >= 0");
        if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda))) throw ValidationError("lambda must be finite and >= 0");
        if (adaptive_lambda && !(*adaptive_lambda >= 0.0 && std::isfinite(*adaptive_lambda)))
            throw ValidationError("adaptive lambda must be finite and >= 0");
        if (!lambda) resolved_cv().validate(n);
    }
};

struct FitResult {
    StandardizedMatrix standardized;
    CovarianceMatrix covariance;  // before ridge
    CovarianceMatrix ridged;
    std::optional<CvResult> cv;
    std::optional<CvResult> adaptive_cv;
    PrecisionEstimate initial;
    PenaltyWeights weights;
    PrecisionEstimate adaptive;
    WeightedNetwork network;
    std::vector<std::string> warnings;
};

/// standardize -> covariance -> ridge -> (CV) -> glasso -> adaptive weights
/// -> adaptive glasso -> network.
inline FitResult fit_network(const RawDataset& raw, const FitConfig& cfg) {
    raw.validate();
    cfg.validate(raw.n());
    FitResult r;
    r.standardized = standardize(raw, cfg.divisor);
    r.covariance = sample_covariance(r.standardized);
    r.ridged = ridge_condition(r.covariance, cfg.kappa_max);

    double lambda = 0.0;
    if (cfg.lambda) {
        lambda = *cfg.lambda;
    } else {
        r.cv = cross_validate(raw, cfg.resolved_cv());
        lambda = r.cv->lambda_star;
        r.warnings.insert(r.warnings.end(), r.cv->warnings.begin(), r.cv->warnings.end());
    }

    r.initial = glasso_fit(r.ridged, lambda, cfg.solver);
    r.weights = adaptive_weights(r.initial.theta, cfg.delta);
    double adaptive_lambda = lambda;
    if (cfg.adaptive_lambda) {
        adaptive_lambda = *cfg.adaptive_lambda;
    } else if (cfg.re_cv_adaptive && !cfg.lambda) {
        r.adaptive_cv = cross_validate(raw, cfg.resolved_cv(), r.weights);
        adaptive_lambda = r.adaptive_cv->lambda_star;
        r.warnings.insert(r.warnings.end(), r.adaptive_cv->warnings.begin(), r.adaptive_cv->warnings.end());
    }
    r.adaptive = adaptive_glasso_fit(r.ridged, adaptive_lambda, r.weights, cfg.solver);
    for (const auto* est : {&r.initial, &r.adaptive})
        r.warnings.insert(r.warnings.end(), est->warnings.begin(), est->warnings.end());
    r.network = precision_to_adjacency(r.adaptive, cfg.zero_tol, raw.variable_names, raw.domain_labels);
    return r;
}

}  // namespace glassonet
