#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "common.hpp"
#include "data.hpp"
#include "estimator.hpp"
#include "parallel.hpp"

namespace glassonet {

struct CvConfig {
    int folds = 5;
    int num_lambda = 10;
    double lam_min_ratio = 0.01;
    std::uint64_t seed = 0;
    double delta = 0.2;
    Divisor divisor = Divisor::n_minus_1;
    double kappa_max = 1e6;
    // Standardize once on the full data instead of per training fold.
    bool paper_literal = false;
    SolverOptions solver;
    unsigned parallelism = 1;

    void validate(Index n) const {
        if (folds < 2) throw ValidationError("cv folds must be >= 2");
        if (folds > n)
            throw ValidationError("cv folds (" + std::to_string(folds) + ") exceed the number of rows (" +
                                  std::to_string(n) + ")");
        if (folds != n && n / folds < 2)
            throw ValidationError("validation folds would have fewer than 2 rows; use fewer folds or leave-one-out");
        if (num_lambda < 2) throw ValidationError("num_lambda must be >= 2");
        if (!(lam_min_ratio > 0.0 && lam_min_ratio < 1.0)) throw ValidationError("lam_min_ratio must lie in (0, 1)");
        if (!(delta > 0.0)) throw ValidationError("delta must be > 0");
        if (!(kappa_max >= 1.0)) throw ValidationError("kappa_max must be >= 1");
    }
};

struct CvResult {
    std::vector<double> lambda_grid;  // descending
    Matrix fold_losses;               // folds x num_lambda
    std::vector<double> cv_curve;
    double lambda_star = 0.0;
    std::size_t lambda_star_index = 0;
    std::vector<int> fold_assignments;
    std::vector<std::string> warnings;
};

/// Fold id per row: a seeded permutation dealt round-robin, so fold sizes
/// differ by at most one.
inline std::vector<int> make_folds(Index n, int K, std::uint64_t seed) {
    if (K < 1 || K > n) throw ValidationError("fold count must lie in [1, n]");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(stream_seed(seed, Stream::folds));
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < perm.size(); ++pos)
        fold[static_cast<std::size_t>(perm[pos])] = static_cast<int>(pos % static_cast<std::size_t>(K));
    return fold;
}

struct LambdaGrid {
    std::vector<double> values;  // descending
    std::optional<std::string> warning;
};

/// Log-spaced from λmax = max_{i≠j}|S_ij| down to lam_min_ratio·λmax, both ends included.
inline LambdaGrid lambda_grid(const Matrix& S, int num, double lam_min_ratio) {
    if (num < 2) throw ValidationError("lambda grid needs at least 2 points");
    if (!(lam_min_ratio > 0.0 && lam_min_ratio < 1.0)) throw ValidationError("lam_min_ratio must lie in (0, 1)");
    LambdaGrid grid;
    const double lmax = max_off_diagonal_abs(S);
    if (lmax == 0.0) {
        grid.values = {0.0};
        grid.warning = "all off-diagonal covariances are zero; lambda grid degenerates to {0}";
        return grid;
    }
    grid.values.resize(static_cast<std::size_t>(num));
    for (int k = 0; k < num; ++k)
        grid.values[static_cast<std::size_t>(k)] = lmax * std::pow(lam_min_ratio, static_cast<double>(k) / (num - 1));
    grid.values.front() = lmax;
    grid.values.back() = lmax * lam_min_ratio;
    return grid;
}

inline LambdaGrid lambda_grid(const CovarianceMatrix& S, int num, double lam_min_ratio) {
    return lambda_grid(S.S, num, lam_min_ratio);
}

/// Held-out negative log-likelihood tr(S_val θ) − log det θ (constants dropped).
inline double fold_loss(const Matrix& S_val, const Matrix& theta) {
    const auto llt = detail::checked_cholesky(theta, "fold_loss");
    return S_val.cwiseProduct(theta).sum() - detail::log_det(llt);
}

namespace detail {

struct FoldMatrices {
    Matrix S_train;  // ridged
    Matrix S_val;
};

inline FoldMatrices fold_matrices(const RawDataset& raw, const Matrix& global_X, const std::vector<int>& folds,
                                  int k, const CvConfig& cfg) {
    std::vector<Index> train, val;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == k ? val : train).push_back(static_cast<Index>(i));
    Matrix Xtr, Xval;
    Matrix Str;
    if (cfg.paper_literal) {
        Xtr = global_X(train, Eigen::all);
        const Eigen::RowVectorXd mu = Xtr.colwise().mean();
        Xtr.rowwise() -= mu;
        Xval = global_X(val, Eigen::all);
        Xval.rowwise() -= mu;
        Str = crossproduct(Xtr, divisor_value(cfg.divisor, Xtr.rows()));
    } else {
        const auto z = standardize(raw.values(train, Eigen::all), raw.variable_names, cfg.divisor);
        Str = crossproduct(z.X, divisor_value(cfg.divisor, z.X.rows()));
        Xval = raw.values(val, Eigen::all);
        Xval.rowwise() -= z.column_means.transpose();
        Xval = Xval.array().rowwise() / z.column_sds.transpose().array();
    }
    CovarianceMatrix cov{Str, 0.0, condition_number(Str), cfg.divisor};
    FoldMatrices out;
    out.S_train = ridge_condition(cov, cfg.kappa_max).S;
    out.S_val = crossproduct(Xval, static_cast<double>(Xval.rows()));
    return out;
}

}  // namespace detail

/// K-fold cross-validation over the λ grid with an explicit partition.
/// Fits along each fold's λ path are warm-started from the previous λ, so
/// folds are the unit of parallel work and results do not depend on the
/// number of workers. When `weights` is given, every fit uses those
/// penalty weights (adaptive re-CV); otherwise unit weights.
inline CvResult cross_validate(const RawDataset& raw, const CvConfig& cfg, const std::vector<int>& folds,
                               const std::optional<PenaltyWeights>& weights = std::nullopt) {
    raw.validate();
    cfg.validate(raw.n());
    if (static_cast<Index>(folds.size()) != raw.n()) throw ValidationError("fold assignment length must equal n");
    const int K = cfg.folds;
    for (int f : folds)
        if (f < 0 || f >= K) throw ValidationError("fold id out of range");

    const auto global = standardize(raw, cfg.divisor);
    const auto full_cov = sample_covariance(global);
    auto grid = lambda_grid(full_cov, cfg.num_lambda, cfg.lam_min_ratio);

    CvResult res;
    res.lambda_grid = grid.values;
    res.fold_assignments = folds;
    if (grid.warning) res.warnings.push_back(*grid.warning);
    const std::size_t L = res.lambda_grid.size();
    res.fold_losses = Matrix::Constant(K, static_cast<Index>(L), std::numeric_limits<double>::infinity());

    std::vector<std::vector<std::string>> fold_warnings(static_cast<std::size_t>(K));
    parallel_for(static_cast<std::size_t>(K), cfg.parallelism, [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        auto& warn = fold_warnings[kk];
        detail::FoldMatrices fm;
        try {
            fm = detail::fold_matrices(raw, global.X, folds, k, cfg);
        } catch (const std::exception& e) {
            warn.push_back("fold " + std::to_string(k) + ": " + e.what() + "; all losses set to +inf");
            return;
        }
        const PenaltyWeights w = weights ? *weights : PenaltyWeights::unit(raw.p());
        std::optional<Matrix> warm;
        for (std::size_t j = 0; j < L; ++j) {
            const double lam = res.lambda_grid[j];
            try {
                auto est = adaptive_glasso_fit(fm.S_train, lam, w, cfg.solver, warm);
                if (!est.converged)
                    warn.push_back("fold " + std::to_string(k) + ", lambda " + std::to_string(lam) +
                                   ": fit did not converge");
                res.fold_losses(k, static_cast<Index>(j)) = fold_loss(fm.S_val, est.theta);
                warm = est.theta;
            } catch (const std::exception& e) {
                warn.push_back("fold " + std::to_string(k) + ", lambda " + std::to_string(lam) + ": " + e.what() +
                               "; loss set to +inf");
            }
        }
    });
    for (auto& w : fold_warnings) res.warnings.insert(res.warnings.end(), w.begin(), w.end());

    res.cv_curve.assign(L, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
        double acc = 0.0;
        for (int k = 0; k < K; ++k) acc += res.fold_losses(k, static_cast<Index>(j));
        res.cv_curve[j] = acc / K;
    }
    // Strict '<' keeps the first minimiser, i.e. the largest λ.
    std::size_t best = 0;
    for (std::size_t j = 1; j < L; ++j)
        if (res.cv_curve[j] < res.cv_curve[best]) best = j;
    if (!std::isfinite(res.cv_curve[best])) throw NumericalError("cross-validation failed for every lambda");
    res.lambda_star_index = best;
    res.lambda_star = res.lambda_grid[best];
    return res;
}

inline CvResult cross_validate(const RawDataset& raw, const CvConfig& cfg,
                               const std::optional<PenaltyWeights>& weights = std::nullopt) {
    cfg.validate(raw.n());
    return cross_validate(raw, cfg, make_folds(raw.n(), cfg.folds, cfg.seed), weights);
}

}  // namespace glassonet
