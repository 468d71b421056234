#pragma once

#include <limits>
#include <string>
#include <vector>

#include "common.hpp"
#include "estimator.hpp"
#include "parallel.hpp"

namespace glassonet {

using IntMatrix = Eigen::MatrixXi;

/// Undirected network from a precision matrix. W holds |θ_ij|; edge_sign
/// holds the sign of the partial correlation −θ_ij/√(θ_ii θ_jj).
struct WeightedNetwork {
    Matrix W;
    IntMatrix edge_sign;
    std::vector<std::string> node_labels;
    std::vector<std::string> node_domains;  // empty or size p

    Index p() const { return W.rows(); }

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (Index j = 0; j < p(); ++j)
            for (Index i = 0; i < j; ++i) e += W(i, j) > 0.0;
        return e;
    }

    void validate() const {
        if (W.rows() != W.cols()) throw ValidationError("adjacency must be square");
        if (edge_sign.rows() != W.rows() || edge_sign.cols() != W.cols())
            throw ValidationError("edge_sign must match adjacency");
        if (static_cast<Index>(node_labels.size()) != p()) throw ValidationError("one label per node required");
        if (!node_domains.empty() && static_cast<Index>(node_domains.size()) != p())
            throw ValidationError("one domain per node required");
        for (Index i = 0; i < p(); ++i) {
            if (W(i, i) != 0.0) throw ValidationError("adjacency diagonal must be zero");
            for (Index j = 0; j < p(); ++j) {
                if (!(W(i, j) >= 0.0) || !std::isfinite(W(i, j)))
                    throw ValidationError("adjacency weights must be finite and >= 0");
                if (W(i, j) != W(j, i)) throw ValidationError("adjacency must be symmetric");
                if ((W(i, j) > 0.0) != (edge_sign(i, j) != 0)) throw ValidationError("edge_sign disagrees with W");
            }
        }
    }

    /// Network with unit-sign edges from a bare weight matrix.
    static WeightedNetwork from_weights(const Matrix& W, std::vector<std::string> labels = {}) {
        WeightedNetwork net;
        net.W = W;
        net.W.diagonal().setZero();
        net.edge_sign = (net.W.array() > 0.0).cast<int>().matrix();
        if (labels.empty())
            for (Index i = 0; i < W.rows(); ++i) labels.push_back("V" + std::to_string(i + 1));
        net.node_labels = std::move(labels);
        return net;
    }
};

inline WeightedNetwork precision_to_adjacency(const Matrix& theta, double zero_tol = 1e-8,
                                              std::vector<std::string> labels = {},
                                              std::vector<std::string> domains = {}) {
    const Index p = theta.rows();
    WeightedNetwork net;
    net.W = Matrix::Zero(p, p);
    net.edge_sign = IntMatrix::Zero(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) {
            if (i == j || !(std::abs(theta(i, j)) > zero_tol)) continue;
            net.W(i, j) = std::abs(theta(i, j));
            const double pcor = -theta(i, j) / std::sqrt(theta(i, i) * theta(j, j));
            net.edge_sign(i, j) = pcor > 0.0 ? 1 : -1;
        }
    if (labels.empty())
        for (Index i = 0; i < p; ++i) labels.push_back("V" + std::to_string(i + 1));
    net.node_labels = std::move(labels);
    net.node_domains = std::move(domains);
    return net;
}

inline WeightedNetwork precision_to_adjacency(const PrecisionEstimate& est, double zero_tol = 1e-8,
                                              std::vector<std::string> labels = {},
                                              std::vector<std::string> domains = {}) {
    return precision_to_adjacency(est.theta, zero_tol, std::move(labels), std::move(domains));
}

/// S(i) = Σ_j W_ij.
inline Vector strength(const WeightedNetwork& net) { return net.W.rowwise().sum(); }

/// Relative tolerance under which two path lengths count as tied.
inline constexpr double path_tie_tolerance = 1e-9;

struct SingleSource {
    Vector dist;
    Vector sigma;                             // number of shortest paths from the source
    std::vector<std::vector<Index>> preds;    // shortest-path predecessors
    std::vector<Index> order;                 // settled order (non-decreasing distance)
};

/// Dijkstra with path counting, edge length 1/W_ij. Dense O(p²) scan; ties
/// on the smallest tentative distance go to the lower node index.
inline SingleSource single_source(const WeightedNetwork& net, Index s) {
    const Index p = net.p();
    const double inf = std::numeric_limits<double>::infinity();
    SingleSource r;
    r.dist = Vector::Constant(p, inf);
    r.sigma = Vector::Zero(p);
    r.preds.assign(static_cast<std::size_t>(p), {});
    std::vector<bool> done(static_cast<std::size_t>(p), false);
    r.dist(s) = 0.0;
    r.sigma(s) = 1.0;
    for (;;) {
        Index u = -1;
        for (Index v = 0; v < p; ++v)
            if (!done[static_cast<std::size_t>(v)] && std::isfinite(r.dist(v)) && (u < 0 || r.dist(v) < r.dist(u))) u = v;
        if (u < 0) break;
        done[static_cast<std::size_t>(u)] = true;
        r.order.push_back(u);
        for (Index v = 0; v < p; ++v) {
            const double w = net.W(u, v);
            if (!(w > 0.0) || done[static_cast<std::size_t>(v)]) continue;
            const double nd = r.dist(u) + 1.0 / w;
            const double slack = path_tie_tolerance * std::max(nd, std::isfinite(r.dist(v)) ? r.dist(v) : nd);
            if (!std::isfinite(r.dist(v)) || nd < r.dist(v) - slack) {
                r.dist(v) = nd;
                r.sigma(v) = r.sigma(u);
                r.preds[static_cast<std::size_t>(v)] = {u};
            } else if (std::abs(nd - r.dist(v)) <= slack) {
                r.sigma(v) += r.sigma(u);
                r.preds[static_cast<std::size_t>(v)].push_back(u);
            }
        }
    }
    return r;
}

struct ShortestPaths {
    Matrix dist;   // +inf when unreachable
    Matrix sigma;  // σ_rt, 0 when unreachable
};

inline ShortestPaths shortest_paths(const WeightedNetwork& net, unsigned workers = 1) {
    const Index p = net.p();
    ShortestPaths out{Matrix(p, p), Matrix(p, p)};
    parallel_for(static_cast<std::size_t>(p), workers, [&](std::size_t s) {
        auto r = single_source(net, static_cast<Index>(s));
        out.dist.row(static_cast<Index>(s)) = r.dist.transpose();
        out.sigma.row(static_cast<Index>(s)) = r.sigma.transpose();
    });
    return out;
}

/// B(i) = Σ_{r<t, r,t≠i} σ_rt(i)/σ_rt over unordered pairs, by Brandes
/// dependency accumulation on the weighted shortest-path DAG.
inline Vector weighted_betweenness(const WeightedNetwork& net, unsigned workers = 1) {
    const Index p = net.p();
    std::vector<Vector> per_source(static_cast<std::size_t>(p));
    parallel_for(static_cast<std::size_t>(p), workers, [&](std::size_t s) {
        auto r = single_source(net, static_cast<Index>(s));
        Vector delta = Vector::Zero(p);
        for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
            const Index w = *it;
            for (Index v : r.preds[static_cast<std::size_t>(w)]) delta(v) += r.sigma(v) / r.sigma(w) * (1.0 + delta(w));
        }
        delta(static_cast<Index>(s)) = 0.0;
        per_source[s] = std::move(delta);
    });
    Vector bc = Vector::Zero(p);
    for (const auto& d : per_source) bc += d;
    return bc / 2.0;
}

/// Connected-component id per node, numbered by lowest member index.
inline std::vector<int> components(const WeightedNetwork& net) {
    const Index p = net.p();
    std::vector<int> comp(static_cast<std::size_t>(p), -1);
    int next = 0;
    for (Index s = 0; s < p; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<Index> stack{s};
        comp[static_cast<std::size_t>(s)] = next;
        while (!stack.empty()) {
            const Index u = stack.back();
            stack.pop_back();
            for (Index v = 0; v < p; ++v)
                if (net.W(u, v) > 0.0 && comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = next;
                    stack.push_back(v);
                }
        }
        ++next;
    }
    return comp;
}

struct Closeness {
    Vector values;
    std::vector<int> component;
};

/// C(i) = 1 / Σ_j s(i,j), summing over the nodes of i's own component.
/// Isolated nodes get 0.
inline Closeness closeness(const WeightedNetwork& net, unsigned workers = 1) {
    const auto sp = shortest_paths(net, workers);
    Closeness out{Vector::Zero(net.p()), components(net)};
    for (Index i = 0; i < net.p(); ++i) {
        double total = 0.0;
        for (Index j = 0; j < net.p(); ++j)
            if (j != i && std::isfinite(sp.dist(i, j))) total += sp.dist(i, j);
        out.values(i) = total > 0.0 ? 1.0 / total : 0.0;
    }
    return out;
}

struct CentralitySummary {
    Vector strength;
    Vector closeness;
    Vector betweenness;
    std::vector<int> component;
    std::string edge_length_rule = "length = 1/|theta_ij|; closeness within connected component; "
                                   "betweenness over unordered pairs";
};

inline CentralitySummary centrality(const WeightedNetwork& net, unsigned workers = 1) {
    CentralitySummary out;
    out.strength = strength(net);
    auto c = closeness(net, workers);
    out.closeness = std::move(c.values);
    out.component = std::move(c.component);
    out.betweenness = weighted_betweenness(net, workers);
    return out;
}

}  // namespace glassonet
