#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "protosim/model.hpp"

namespace protosim {

/// Size-cap compression knobs.
struct CompressionConfig {
    std::size_t limit_size = 500;  ///< codebook size that triggers compression
    double target_low = 0.725;     ///< lower edge of the per-label target window, as a quota share
    double target_high = 0.775;    ///< upper edge of the per-label target window
    double eps_initial = 0.5;
    double eps_up = 1.25;   ///< radius growth when clusters are too many
    double eps_down = 0.8;  ///< radius shrink when clusters are too few
    int max_iterations = 50;
    int min_pts = 1;  ///< density threshold; 1 turns clustering into radius-connected components
};

/**
 * @brief Density clustering over points, brute-force neighbourhood queries.
 *
 * Returns one cluster id per point, 0..k-1. A point is core when at least
 * min_pts points (itself included) lie within eps. Points reachable from no
 * core point would classically be noise; here every such point becomes a
 * singleton cluster so that no input is discarded.
 */
std::vector<int> dbscan(const std::vector<std::vector<double>>& points, double eps, int min_pts);

/// Result of the radius search for one label.
struct ClusteringOutcome {
    std::vector<std::vector<std::size_t>> clusters;  ///< member indices into the input
    double eps = 0.0;                                ///< radius of the reported clustering
    int iterations = 0;
    bool converged = false;  ///< cluster count landed inside the target window
};

/**
 * @brief Searches a clustering radius whose cluster count lands in the
 * per-label target window [target_low, target_high] * quota.
 *
 * The radius starts at eps_initial and is multiplied by eps_up while there
 * are too many clusters and by eps_down while there are too few. When
 * max_iterations passes without landing in the window the outcome reports
 * converged = false and carries the iterate whose count came closest.
 */
ClusteringOutcome adaptive_cluster_label(const std::vector<Prototype>& members,
                                         const CompressionConfig& cfg, double quota);

/// Collapses same-label prototypes into their centroid. Relevance is summed,
/// the creation tick is the newest member's, the id is caller-assigned.
Prototype merge_cluster(std::span<const Prototype> members, std::int64_t new_id);

struct CompressionResult {
    PrototypeModel model;
    bool compressed = false;              ///< false when the size cap was not exceeded
    std::map<int, bool> label_converged;  ///< radius-search outcome per label
};

/**
 * @brief Pure size-cap compression of a codebook.
 *
 * A model at or under limit_size passes through unchanged. Otherwise each
 * label's prototypes are clustered independently against a quota of
 * limit_size / label-count and every cluster collapses into one centroid
 * prototype with a fresh id. Edges are rebuilt by connecting each surviving
 * prototype to its two nearest peers at age 0. Class counts, absorbed-sample
 * counters and total relevance are preserved; labels never disappear.
 */
CompressionResult compress_model(const PrototypeModel& model, const CompressionConfig& cfg);

}  // namespace protosim
