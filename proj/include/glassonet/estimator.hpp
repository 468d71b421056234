#pragma once

#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "common.hpp"
#include "data.hpp"

namespace glassonet {

/// Elementwise penalty multipliers ω. Only off-diagonal entries are used.
struct PenaltyWeights {
    Matrix omega;
    double delta = 0.0;  // 0 for unit weights
    bool adaptive = false;

    static PenaltyWeights unit(Index p) { return {Matrix::Ones(p, p), 0.0, false}; }
};

struct SolverOptions {
    double tol = 1e-5;
    int max_iter = 500;
    // Inner weighted-lasso coordinate descent.
    double inner_tol = 1e-10;
    int inner_max_iter = 10000;
    // Coordinates whose update lands below this magnitude become structural zeros.
    double zero_threshold = 1e-12;
};

struct PrecisionEstimate {
    Matrix theta;
    double lambda = 0.0;
    PenaltyWeights weights;
    std::vector<double> objective_trace;  // entry 0 is the starting point
    bool converged = false;
    int iterations = 0;
    double kkt_residual = std::numeric_limits<double>::infinity();
    std::vector<std::string> warnings;
};

namespace detail {

inline Eigen::LLT<Matrix> checked_cholesky(const Matrix& theta, const char* what) {
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": matrix is not positive definite");
    const auto& L = llt.matrixLLT();
    for (Index i = 0; i < L.rows(); ++i)
        if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i)))
            throw NumericalError(std::string(what) + ": matrix is not positive definite");
    return llt;
}

inline double log_det(const Eigen::LLT<Matrix>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline double penalty(const Matrix& theta, double lambda, const Matrix& omega) {
    double acc = 0.0;
    for (Index j = 0; j < theta.cols(); ++j)
        for (Index i = 0; i < theta.rows(); ++i)
            if (i != j) acc += omega(i, j) * std::abs(theta(i, j));
    return lambda * acc;
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

inline void check_problem(const Matrix& S, double lambda, const PenaltyWeights& w) {
    if (S.rows() != S.cols() || S.rows() < 1) throw ValidationError("covariance must be a non-empty square matrix");
    if (!S.allFinite()) throw ValidationError("covariance has non-finite entries");
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff()))
        throw ValidationError("covariance is not symmetric");
    if ((S.diagonal().array() <= 0.0).any()) throw ValidationError("covariance has a non-positive diagonal");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and >= 0");
    if (w.omega.rows() != S.rows() || w.omega.cols() != S.cols())
        throw ValidationError("penalty weights do not match covariance dimension");
    for (Index j = 0; j < S.cols(); ++j)
        for (Index i = 0; i < S.rows(); ++i)
            if (i != j && !(w.omega(i, j) > 0.0 && std::isfinite(w.omega(i, j))))
                throw ValidationError("penalty weights must be positive and finite");
}

}  // namespace detail

/// tr(Sθ) − log det θ + λ Σ_{i≠j} ω_ij |θ_ij|.
inline double objective(const Matrix& S, const Matrix& theta, double lambda, const Matrix& omega) {
    const auto llt = detail::checked_cholesky(theta, "objective");
    return (S.cwiseProduct(theta)).sum() - detail::log_det(llt) + detail::penalty(theta, lambda, omega);
}

inline double objective(const CovarianceMatrix& S, const Matrix& theta, double lambda, const PenaltyWeights& w) {
    return objective(S.S, theta, lambda, w.omega);
}

/// Largest violation of the stationarity conditions of the weighted objective:
///   (θ⁻¹ − S)_ij = λω_ij sign(θ_ij)  where θ_ij ≠ 0,
///   |(θ⁻¹ − S)_ij| ≤ λω_ij           where θ_ij = 0,
///   (θ⁻¹ − S)_ii = 0                  on the unpenalized diagonal.
inline double kkt_residual(const Matrix& S, const Matrix& theta, double lambda, const Matrix& omega) {
    const auto llt = detail::checked_cholesky(theta, "kkt_residual");
    const Matrix G = llt.solve(Matrix::Identity(theta.rows(), theta.cols())) - S;
    double worst = 0.0;
    for (Index j = 0; j < theta.cols(); ++j) {
        for (Index i = 0; i < theta.rows(); ++i) {
            double r;
            if (i == j) {
                r = std::abs(G(i, i));
            } else {
                const double pen = lambda * omega(i, j);
                const double t = theta(i, j);
                r = t != 0.0 ? std::abs(G(i, j) - pen * (t > 0.0 ? 1.0 : -1.0)) : std::max(0.0, std::abs(G(i, j)) - pen);
            }
            worst = std::max(worst, r);
        }
    }
    return worst;
}

inline double kkt_residual(const CovarianceMatrix& S, const PrecisionEstimate& est) {
    return kkt_residual(S.S, est.theta, est.lambda, est.weights.omega);
}

/// ω_ij = 1 / (|θ_init,ij| + δ).
inline PenaltyWeights adaptive_weights(const Matrix& theta_init, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be finite and > 0");
    PenaltyWeights w;
    w.omega = (theta_init.cwiseAbs().array() + delta).inverse().matrix();
    w.delta = delta;
    w.adaptive = true;
    return w;
}

/// Weighted graphical lasso by primal block coordinate descent.
///
/// Each sweep visits columns in ascending order. For column j, with the
/// remaining block Θ11 held fixed and A = Θ11⁻¹, the objective restricted to
/// (θ12, θ22) is minimised exactly:
///   θ12 = argmin_x  ½ xᵀ(s22 A)x + s12ᵀx + λ Σ ω_kj |x_k|
///   θ22 = 1/s22 + θ12ᵀ A θ12
/// The inner problem is a weighted lasso solved by cyclic coordinate
/// descent warm-started at the current θ12, so every block step can only
/// decrease the objective and Θ stays positive definite throughout.
/// W = Θ⁻¹ is refreshed by Cholesky once per sweep and rank-updated in between.
inline PrecisionEstimate adaptive_glasso_fit(const Matrix& S, double lambda, const PenaltyWeights& weights,
                                             const SolverOptions& opt = {},
                                             const std::optional<Matrix>& warm_start = std::nullopt) {
    detail::check_problem(S, lambda, weights);
    if (opt.max_iter < 1 || !(opt.tol > 0.0)) throw ValidationError("solver needs max_iter >= 1 and tol > 0");
    const Index p = S.rows();
    const Matrix& omega = weights.omega;

    PrecisionEstimate est;
    est.lambda = lambda;
    est.weights = weights;

    Matrix theta = S.diagonal().cwiseInverse().asDiagonal();
    if (warm_start && warm_start->rows() == p && warm_start->cols() == p) {
        Eigen::LLT<Matrix> llt(*warm_start);
        if (llt.info() == Eigen::Success) theta = symmetrized(*warm_start);
    }
    double obj = objective(S, theta, lambda, omega);
    est.objective_trace.push_back(obj);

    if (p == 1) {
        est.theta = theta;
        est.converged = true;
        est.kkt_residual = kkt_residual(S, theta, lambda, omega);
        return est;
    }

    std::vector<Index> others(static_cast<std::size_t>(p - 1));
    Matrix A(p - 1, p - 1), Q(p - 1, p - 1);
    Vector c(p - 1), x(p - 1), g(p - 1), pen(p - 1), Ax(p - 1), w12(p - 1);

    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        Matrix W = detail::checked_cholesky(theta, "glasso sweep").solve(Matrix::Identity(p, p));
        W = symmetrized(W);
        double max_change = 0.0;

        for (Index j = 0; j < p; ++j) {
            for (Index k = 0, m = 0; k < p; ++k)
                if (k != j) others[static_cast<std::size_t>(m++)] = k;

            w12 = W(others, j);
            const double w22 = W(j, j);
            A = W(others, others) - (w12 * w12.transpose()) / w22;
            const double s22 = S(j, j);
            Q = s22 * A;
            c = S(others, j);
            pen = lambda * omega(others, j);
            x = theta(others, j);
            const Vector x_old = x;

            g = Q * x + c;
            for (int sweep = 0; sweep < opt.inner_max_iter; ++sweep) {
                double inner_change = 0.0;
                for (Index k = 0; k < p - 1; ++k) {
                    const double qkk = Q(k, k);
                    const double r = g(k) - qkk * x(k);
                    double nx = detail::soft_threshold(-r, pen(k)) / qkk;
                    if (std::abs(nx) < opt.zero_threshold) nx = 0.0;
                    const double d = nx - x(k);
                    if (d != 0.0) {
                        g += Q.col(k) * d;
                        x(k) = nx;
                        inner_change = std::max(inner_change, std::abs(d));
                    }
                }
                if (inner_change < opt.inner_tol) break;
            }

            Ax = A * x;
            const double t22 = 1.0 / s22 + x.dot(Ax);
            max_change = std::max(max_change, (x - x_old).cwiseAbs().maxCoeff());
            max_change = std::max(max_change, std::abs(t22 - theta(j, j)));
            theta(others, j) = x;
            theta(j, others) = x.transpose();
            theta(j, j) = t22;

            // Block inverse with Schur complement θ22 − xᵀAx = 1/s22.
            W(others, others) = A + (Ax * Ax.transpose()) * s22;
            W(others, j) = -Ax * s22;
            W(j, others) = (-Ax * s22).transpose();
            W(j, j) = s22;
        }

        const double prev = obj;
        obj = objective(S, theta, lambda, omega);
        est.objective_trace.push_back(obj);
        est.iterations = iter;
        const double rel = std::abs(prev - obj) / std::max(1.0, std::abs(obj));
        if (max_change < opt.tol && rel < opt.tol) {
            est.converged = true;
            break;
        }
    }

    est.theta = theta;
    est.kkt_residual = kkt_residual(S, theta, lambda, omega);
    if (!est.converged)
        est.warnings.push_back("glasso did not converge within " + std::to_string(opt.max_iter) +
                               " iterations (lambda=" + std::to_string(lambda) + ")");
    return est;
}

inline PrecisionEstimate adaptive_glasso_fit(const CovarianceMatrix& S, double lambda, const PenaltyWeights& weights,
                                             const SolverOptions& opt = {},
                                             const std::optional<Matrix>& warm_start = std::nullopt) {
    return adaptive_glasso_fit(S.S, lambda, weights, opt, warm_start);
}

/// Standard graphical lasso: the unit-weight case of adaptive_glasso_fit.
inline PrecisionEstimate glasso_fit(const Matrix& S, double lambda, const SolverOptions& opt = {},
                                    const std::optional<Matrix>& warm_start = std::nullopt) {
    return adaptive_glasso_fit(S, lambda, PenaltyWeights::unit(S.rows()), opt, warm_start);
}

inline PrecisionEstimate glasso_fit(const CovarianceMatrix& S, double lambda, const SolverOptions& opt = {},
                                    const std::optional<Matrix>& warm_start = std::nullopt) {
    return glasso_fit(S.S, lambda, opt, warm_start);
}

}  // namespace glassonet
