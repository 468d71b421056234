#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace glassonet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

#ifdef GLASSONET_VERSION
inline constexpr const char* version = GLASSONET_VERSION;
#else
inline constexpr const char* version = "0.1.0";
#endif

inline constexpr int schema_version = 1;

/// Bad input or configuration; detected before or instead of computing.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that cannot be completed (non-SPD matrix, zero variance, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer. Used to derive independent, order-free RNG seeds
/// from a master seed, e.g. one stream per bootstrap iteration.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Named sub-streams so that folds, bootstrap and simulation never share draws.
enum class Stream : std::uint64_t { folds = 1, bootstrap = 2, simulate = 3 };

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream s) noexcept {
    return hash_seed(seed, static_cast<std::uint64_t>(s) << 56);
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline double max_off_diagonal_abs(const Matrix& m) {
    double best = 0.0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (i != j) best = std::max(best, std::abs(m(i, j)));
    return best;
}

}  // namespace glassonet
