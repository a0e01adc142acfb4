#pragma once

#include <utility>
#include <vector>

#include "protosim/model.hpp"
#include "protosim/rng.hpp"

namespace protosim {

/// Discrete distribution over a shared evaluation grid.
struct DiscretePmf {
    std::vector<std::vector<double>> points;
    std::vector<double> masses;  // non-negative, sums to 1
};

/// Density-estimation knobs.
struct KdeConfig {
    int base_points = 1000;        ///< budget factor for the grid size
    int min_points = 100;          ///< grid floor, also used for degenerate ranges
    double fixed_bandwidth = 0.0;  ///< > 0 overrides the sample-size bandwidth rule
};

/// Parabolic kernel, 0.75 * (1 - u^2) on |u| <= 1 and 0 elsewhere.
double epanechnikov(double u);

/// Sample-size bandwidth rule, m^(-1 / (d + 4)).
double scott_bandwidth(std::size_t m, std::size_t d);

/**
 * @brief Product-kernel density estimate at one query point.
 *
 * f(x) = 1 / (m * h^d) * sum_i prod_k K((x_k - X_ik) / h), with a single
 * shared bandwidth h for all dimensions. Samples must be non-empty and of
 * uniform dimension; h must be positive.
 */
double kde_density(const std::vector<std::vector<double>>& samples,
                   const std::vector<double>& query, double h);

/**
 * @brief Random evaluation grid over the joint bounding box of two sets.
 *
 * The grid size is floor(base_points * 2^(d/2) * total_range / (2 d)) with
 * total_range the sum of per-dimension ranges of the union, floored at
 * min_points. A degenerate box (total_range 0) yields min_points copies of
 * the single point. Points are uniform in the box, drawn from rng.
 */
std::vector<std::vector<double>> evaluation_grid(const std::vector<std::vector<double>>& a,
                                                 const std::vector<std::vector<double>>& b,
                                                 const KdeConfig& cfg, Rng& rng);

/**
 * @brief Discretized density pair of two point sets on one shared grid.
 *
 * Each set's density is evaluated on the same grid with its own bandwidth and
 * normalized to unit mass. A zero total density falls back to the uniform
 * distribution over the grid.
 */
std::pair<DiscretePmf, DiscretePmf> pmf_pair(const std::vector<std::vector<double>>& a,
                                             const std::vector<std::vector<double>>& b,
                                             const KdeConfig& cfg, Rng& rng);

/// Relative entropy sum_j p_j log2(p_j / q_j). Zero p_j terms contribute 0;
/// any p_j > 0 with q_j = 0 yields +infinity. Grids must be the same size.
double kl_divergence(const DiscretePmf& p, const DiscretePmf& q);

/// Jensen-Shannon distance sqrt(0.5 KL(P||M) + 0.5 KL(Q||M)), M the midpoint
/// distribution. Base-2 logs keep the value in [0, 1].
double js_distance(const DiscretePmf& p, const DiscretePmf& q);

/// Divergence gate for sharing decisions: true when the densities of the
/// local codebook and the last exchanged peer snapshot differ by more than
/// the threshold. An empty snapshot is always worth updating.
bool is_it_worthy(const PrototypeModel& local, const std::vector<Prototype>& peer_snapshot,
                  double threshold, const KdeConfig& cfg, Rng& rng);

}  // namespace protosim
