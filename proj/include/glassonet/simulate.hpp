#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include "common.hpp"
#include "data.hpp"

namespace glassonet {

enum class GraphPattern { chain, hub, random, two_block };

inline std::string to_string(GraphPattern g) {
    switch (g) {
        case GraphPattern::chain: return "chain";
        case GraphPattern::hub: return "hub";
        case GraphPattern::random: return "random";
        case GraphPattern::two_block: return "two_block";
    }
    return "?";
}

inline GraphPattern parse_pattern(std::string_view s) {
    if (s == "chain") return GraphPattern::chain;
    if (s == "hub") return GraphPattern::hub;
    if (s == "random") return GraphPattern::random;
    if (s == "two_block" || s == "two-block") return GraphPattern::two_block;
    throw ValidationError("unknown graph pattern '" + std::string(s) + "'");
}

struct SyntheticSpec {
    Index p = 10;
    Index n = 50;
    GraphPattern pattern = GraphPattern::chain;
    double magnitude = 0.4;       // |θ_ij| on every true edge
    double edge_prob = 0.2;       // random pattern only
    double block_strength = 0.4;  // two_block pattern: within-block |θ_ij|
    std::uint64_t seed = 0;

    void validate() const {
        if (p < 2) throw ValidationError("simulate: p must be >= 2");
        if (n < 2) throw ValidationError("simulate: n must be >= 2");
        if (!(magnitude > 0.0) || !std::isfinite(magnitude)) throw ValidationError("simulate: magnitude must be > 0");
        if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw ValidationError("simulate: edge_prob must lie in [0, 1]");
        if (!(block_strength > 0.0) || !std::isfinite(block_strength))
            throw ValidationError("simulate: block_strength must be > 0");
    }
};

struct SyntheticData {
    RawDataset data;
    Matrix theta_true;
};

/// True precision matrix for the pattern. Off-diagonal entries are negative
/// (positive partial correlations) except in the random pattern, where signs
/// are drawn. The diagonal is max(1, Σ_j |θ_ij| + 0.1), so the matrix is
/// strictly diagonally dominant and hence SPD.
inline Matrix true_precision(const SyntheticSpec& spec, std::mt19937_64& rng) {
    const Index p = spec.p;
    Matrix theta = Matrix::Zero(p, p);
    auto set = [&](Index i, Index j, double v) { theta(i, j) = theta(j, i) = v; };
    switch (spec.pattern) {
        case GraphPattern::chain:
            for (Index i = 0; i + 1 < p; ++i) set(i, i + 1, -spec.magnitude);
            break;
        case GraphPattern::hub:
            for (Index i = 1; i < p; ++i) set(0, i, -spec.magnitude);
            break;
        case GraphPattern::random: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (Index i = 0; i < p; ++i)
                for (Index j = i + 1; j < p; ++j)
                    if (u(rng) < spec.edge_prob) set(i, j, u(rng) < 0.5 ? -spec.magnitude : spec.magnitude);
            break;
        }
        case GraphPattern::two_block: {
            const Index half = p / 2;
            for (Index i = 0; i < p; ++i)
                for (Index j = i + 1; j < p; ++j)
                    if ((i < half) == (j < half)) set(i, j, -spec.block_strength);
            break;
        }
    }
    for (Index i = 0; i < p; ++i) theta(i, i) = std::max(1.0, theta.row(i).cwiseAbs().sum() + 0.1);
    return theta;
}

/// Draws n rows from N(0, Θ⁻¹) as x = L z with Σ = LLᵀ.
inline SyntheticData simulate(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(stream_seed(spec.seed, Stream::simulate));
    SyntheticData out;
    out.theta_true = true_precision(spec, rng);
    const Matrix sigma = out.theta_true.inverse();
    Eigen::LLT<Matrix> llt(symmetrized(sigma));
    if (llt.info() != Eigen::Success) throw NumericalError("simulate: true covariance is not SPD");
    const Matrix L = llt.matrixL();

    std::normal_distribution<double> z;
    Matrix Z(spec.n, spec.p);
    for (Index i = 0; i < spec.n; ++i)
        for (Index j = 0; j < spec.p; ++j) Z(i, j) = z(rng);
    out.data.values = Z * L.transpose();
    for (Index j = 0; j < spec.p; ++j) out.data.variable_names.push_back("V" + std::to_string(j + 1));
    return out;
}

}  // namespace glassonet
