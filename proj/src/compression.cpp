#include "protosim/compression.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace protosim {

std::vector<int> dbscan(const std::vector<std::vector<double>>& points, double eps, int min_pts) {
    if (eps <= 0.0) throw std::invalid_argument("dbscan: eps must be positive");
    if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be at least 1");

    constexpr int kUnvisited = -2;
    constexpr int kNoise = -1;
    const std::size_t n = points.size();
    std::vector<int> label(n, kUnvisited);

    const auto neighbors = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j)
            if (euclidean_distance(points[i], points[j]) <= eps) out.push_back(j);
        return out;  // includes i itself
    };

    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != kUnvisited) continue;
        auto seed = neighbors(i);
        if (seed.size() < static_cast<std::size_t>(min_pts)) {
            label[i] = kNoise;
            continue;
        }
        const int cluster = next++;
        label[i] = cluster;
        std::deque<std::size_t> frontier(seed.begin(), seed.end());
        while (!frontier.empty()) {
            const std::size_t j = frontier.front();
            frontier.pop_front();
            if (label[j] == kNoise) label[j] = cluster;  // border point
            if (label[j] != kUnvisited) continue;
            label[j] = cluster;
            auto reach = neighbors(j);
            if (reach.size() >= static_cast<std::size_t>(min_pts))
                frontier.insert(frontier.end(), reach.begin(), reach.end());
        }
    }
    // Keep every point: leftover noise becomes singleton clusters.
    for (std::size_t i = 0; i < n; ++i)
        if (label[i] == kNoise) label[i] = next++;
    return label;
}

namespace {

std::vector<std::vector<std::size_t>> group_clusters(const std::vector<int>& labels) {
    int count = 0;
    for (const int l : labels) count = std::max(count, l + 1);
    std::vector<std::vector<std::size_t>> clusters(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < labels.size(); ++i)
        clusters[static_cast<std::size_t>(labels[i])].push_back(i);
    return clusters;
}

}  // namespace

ClusteringOutcome adaptive_cluster_label(const std::vector<Prototype>& members,
                                         const CompressionConfig& cfg, double quota) {
    if (members.empty())
        throw std::invalid_argument("adaptive_cluster_label: no members");
    if (quota <= 0.0)
        throw std::invalid_argument("adaptive_cluster_label: quota must be positive");

    std::vector<std::vector<double>> points;
    points.reserve(members.size());
    for (const Prototype& p : members) points.push_back(p.vector);

    const double window_lo = cfg.target_low * quota;
    const double window_hi = cfg.target_high * quota;

    ClusteringOutcome best;
    double best_miss = std::numeric_limits<double>::infinity();
    double eps = cfg.eps_initial;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        auto clusters = group_clusters(dbscan(points, eps, cfg.min_pts));
        const double count = static_cast<double>(clusters.size());
        const double miss =
            count < window_lo ? window_lo - count : (count > window_hi ? count - window_hi : 0.0);
        if (miss < best_miss) {
            best_miss = miss;
            best.clusters = std::move(clusters);
            best.eps = eps;
            best.iterations = it;
        }
        if (miss == 0.0) {
            best.converged = true;
            return best;
        }
        eps *= count > window_hi ? cfg.eps_up : cfg.eps_down;
    }
    best.converged = false;
    best.iterations = cfg.max_iterations;
    return best;
}

Prototype merge_cluster(std::span<const Prototype> members, std::int64_t new_id) {
    if (members.empty()) throw std::invalid_argument("merge_cluster: empty cluster");
    Prototype out;
    out.id = new_id;
    out.label = members.front().label;
    out.vector.assign(members.front().vector.size(), 0.0);
    for (const Prototype& p : members) {
        if (p.label != out.label)
            throw std::invalid_argument("merge_cluster: mixed labels in one cluster");
        if (p.vector.size() != out.vector.size())
            throw std::invalid_argument("merge_cluster: dimension mismatch");
        for (std::size_t k = 0; k < out.vector.size(); ++k) out.vector[k] += p.vector[k];
        out.relevance += p.relevance;
        out.creation_tick = std::max(out.creation_tick, p.creation_tick);
    }
    const double m = static_cast<double>(members.size());
    for (double& v : out.vector) v /= m;
    return out;
}

CompressionResult compress_model(const PrototypeModel& model, const CompressionConfig& cfg) {
    CompressionResult result{model, false, {}};
    if (model.size() <= cfg.limit_size) return result;

    std::map<int, std::vector<Prototype>> by_label;
    for (const Prototype& p : model.prototypes()) by_label[p.label].push_back(p);
    const double quota =
        static_cast<double>(cfg.limit_size) / static_cast<double>(by_label.size());

    std::vector<Prototype> merged;
    std::int64_t next_id = model.next_id();
    for (const auto& [label, members] : by_label) {
        const ClusteringOutcome outcome = adaptive_cluster_label(members, cfg, quota);
        result.label_converged[label] = outcome.converged;
        for (const auto& cluster : outcome.clusters) {
            std::vector<Prototype> gathered;
            gathered.reserve(cluster.size());
            for (const std::size_t i : cluster) gathered.push_back(members[i]);
            merged.push_back(merge_cluster(gathered, next_id++));
        }
    }
    std::sort(merged.begin(), merged.end(),
              [](const Prototype& a, const Prototype& b) { return a.id < b.id; });

    // Each survivor connects to its two nearest peers; mutual picks collapse
    // into one undirected edge.
    std::map<EdgeKey, int> edges;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        std::vector<std::pair<double, std::int64_t>> order;
        order.reserve(merged.size() - 1);
        for (std::size_t j = 0; j < merged.size(); ++j) {
            if (j == i) continue;
            order.emplace_back(euclidean_distance(merged[i].vector, merged[j].vector),
                               merged[j].id);
        }
        std::sort(order.begin(), order.end());
        for (std::size_t k = 0; k < order.size() && k < 2; ++k)
            edges.try_emplace(make_edge_key(merged[i].id, order[k].second), 0);
    }

    result.model = PrototypeModel::from_state(std::move(merged), std::move(edges),
                                              model.class_counts(), model.dimension(), next_id,
                                              model.absorbed_samples(), model.since_denoise(),
                                              model.params());
    result.compressed = true;
    return result;
}

}  // namespace protosim
