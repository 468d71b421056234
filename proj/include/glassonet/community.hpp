#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "netgraph.hpp"

namespace glassonet {

struct TransitionMatrix {
    Matrix P;          // row-stochastic on non-isolated rows, zero rows otherwise
    Vector degrees;    // d_k = Σ_j W_kj
    double total_weight = 0.0;  // m = ½ Σ_ij W_ij
    std::vector<bool> isolated;
};

inline TransitionMatrix transition_matrix(const WeightedNetwork& net) {
    const Index p = net.p();
    TransitionMatrix tm;
    tm.degrees = net.W.rowwise().sum();
    tm.total_weight = 0.5 * net.W.sum();
    tm.P = Matrix::Zero(p, p);
    tm.isolated.assign(static_cast<std::size_t>(p), false);
    for (Index i = 0; i < p; ++i) {
        if (tm.degrees(i) > 0.0)
            tm.P.row(i) = net.W.row(i) / tm.degrees(i);
        else
            tm.isolated[static_cast<std::size_t>(i)] = true;
    }
    return tm;
}

/// Pᵗ by repeated multiplication.
inline Matrix walk_power(const TransitionMatrix& tm, int t) {
    if (t < 1) throw ValidationError("walk length t must be >= 1");
    Matrix Pt = tm.P;
    for (int s = 1; s < t; ++s) Pt = Pt * tm.P;
    return Pt;
}

namespace detail {

/// Σ_k (a_k − b_k)² / d_k over nodes with positive degree.
inline double walk_distance_sq(const Vector& a, const Vector& b, const Vector& degrees) {
    double acc = 0.0;
    for (Index k = 0; k < a.size(); ++k)
        if (degrees(k) > 0.0) {
            const double d = a(k) - b(k);
            acc += d * d / degrees(k);
        }
    return acc;
}

}  // namespace detail

/// d(i,j) = √( Σ_k (Pᵗ_ik − Pᵗ_jk)² / d_k ).
inline double walk_distance(const TransitionMatrix& tm, int t, Index i, Index j) {
    if (i == j) return 0.0;
    const Matrix Pt = walk_power(tm, t);
    return std::sqrt(detail::walk_distance_sq(Pt.row(i).transpose(), Pt.row(j).transpose(), tm.degrees));
}

/// Q = (1/2m) Σ_ij (W_ij − d_i d_j / 2m) δ(c_i, c_j).
inline double modularity(const WeightedNetwork& net, const std::vector<int>& labels) {
    const Index p = net.p();
    if (static_cast<Index>(labels.size()) != p) throw ValidationError("one community label per node required");
    const double two_m = net.W.sum();
    if (!(two_m > 0.0)) throw ValidationError("modularity is undefined on an edgeless network");
    const Vector d = net.W.rowwise().sum();
    // Σ over communities of (internal weight − (total degree)²/2m).
    std::map<int, std::pair<double, double>> per;  // label -> (Σ W inside, Σ d)
    for (Index i = 0; i < p; ++i) {
        auto& slot = per[labels[static_cast<std::size_t>(i)]];
        slot.second += d(i);
        for (Index j = 0; j < p; ++j)
            if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)]) slot.first += net.W(i, j);
    }
    double q = 0.0;
    for (const auto& [label, v] : per) q += v.first - v.second * v.second / two_m;
    return q / two_m;
}

struct Merge {
    int a = 0;
    int b = 0;
    int merged = 0;
    double height = 0.0;      // non-decreasing (running max of raw_height)
    double raw_height = 0.0;  // Δσ of this merge
};

struct Partition {
    std::vector<int> labels;
    double modularity = 0.0;
    std::vector<Merge> dendrogram;
    int t = 4;
    std::vector<double> level_modularity;  // Q after 0, 1, ... merges
    std::size_t chosen_level = 0;
};

namespace detail {

/// Relabels so non-isolated communities are numbered by their lowest node
/// index, followed by isolated nodes as singletons in index order.
inline std::vector<int> canonical_labels(const std::vector<int>& raw, const std::vector<bool>& isolated) {
    std::vector<int> out(raw.size(), -1);
    std::map<int, int> remap;
    int next = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (isolated[i]) continue;
        auto [it, inserted] = remap.emplace(raw[i], next);
        if (inserted) ++next;
        out[i] = it->second;
    }
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (isolated[i]) out[i] = next++;
    return out;
}

}  // namespace detail

/// Walktrap agglomeration. Starting from singletons, repeatedly merges the
/// pair of edge-adjacent communities with the smallest
///   Δσ(C1,C2) = (1/n) · |C1||C2|/(|C1|+|C2|) · r²(C1,C2),
/// where r is the walk distance between the communities' mean t-step
/// profiles and n the number of non-isolated nodes. The returned labels are
/// the dendrogram level of maximal modularity.
inline Partition walktrap(const WeightedNetwork& net, int t = 4) {
    if (t < 1) throw ValidationError("walk length t must be >= 1");
    const Index p = net.p();
    const auto tm = transition_matrix(net);
    if (!(tm.total_weight > 0.0)) throw ValidationError("walktrap needs at least one edge");
    const Matrix Pt = walk_power(tm, t);

    struct Community {
        Vector profile;
        double size = 0.0;
        std::set<int> neighbours;
        std::vector<Index> members;
    };
    std::map<int, Community> live;
    double n_active = 0.0;
    for (Index i = 0; i < p; ++i) {
        if (tm.isolated[static_cast<std::size_t>(i)]) continue;
        Community c;
        c.profile = Pt.row(i).transpose();
        c.size = 1.0;
        c.members = {i};
        for (Index j = 0; j < p; ++j)
            if (j != i && net.W(i, j) > 0.0) c.neighbours.insert(static_cast<int>(j));
        live.emplace(static_cast<int>(i), std::move(c));
        n_active += 1.0;
    }

    auto delta_sigma = [&](const Community& x, const Community& y) {
        return x.size * y.size / (x.size + y.size) * detail::walk_distance_sq(x.profile, y.profile, tm.degrees) /
               n_active;
    };

    std::vector<int> assignment(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) assignment[static_cast<std::size_t>(i)] = static_cast<int>(i);

    Partition out;
    out.t = t;
    std::vector<std::vector<int>> levels{assignment};
    out.level_modularity.push_back(modularity(net, assignment));

    int next_id = static_cast<int>(p);
    double running = 0.0;
    for (;;) {
        int best_a = -1, best_b = -1;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [a, ca] : live)
            for (int b : ca.neighbours) {
                if (b <= a) continue;
                const double ds = delta_sigma(ca, live.at(b));
                if (best_a < 0 || ds < best - 1e-12 * std::max(best, 1e-300)) {
                    best = ds;
                    best_a = a;
                    best_b = b;
                }
            }
        if (best_a < 0) break;

        Community& ca = live.at(best_a);
        Community& cb = live.at(best_b);
        Community merged;
        merged.size = ca.size + cb.size;
        merged.profile = (ca.size * ca.profile + cb.size * cb.profile) / merged.size;
        merged.members = ca.members;
        merged.members.insert(merged.members.end(), cb.members.begin(), cb.members.end());
        std::set<int> nb = ca.neighbours;
        nb.insert(cb.neighbours.begin(), cb.neighbours.end());
        nb.erase(best_a);
        nb.erase(best_b);
        merged.neighbours = nb;
        for (int other : nb) {
            auto& on = live.at(other).neighbours;
            on.erase(best_a);
            on.erase(best_b);
            on.insert(next_id);
        }
        for (Index m : merged.members) assignment[static_cast<std::size_t>(m)] = next_id;
        live.erase(best_a);
        live.erase(best_b);
        live.emplace(next_id, std::move(merged));

        running = std::max(running, best);
        out.dendrogram.push_back({best_a, best_b, next_id, running, best});
        levels.push_back(assignment);
        out.level_modularity.push_back(modularity(net, assignment));
        ++next_id;
    }

    std::size_t chosen = 0;
    for (std::size_t l = 1; l < out.level_modularity.size(); ++l)
        if (out.level_modularity[l] > out.level_modularity[chosen] + 1e-12) chosen = l;
    out.chosen_level = chosen;
    out.modularity = out.level_modularity[chosen];
    out.labels = detail::canonical_labels(levels[chosen], tm.isolated);
    return out;
}

}  // namespace glassonet
