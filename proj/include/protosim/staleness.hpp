#pragma once

#include <cstdint>
#include <vector>

#include "protosim/rng.hpp"

namespace protosim {

/// Poisson arrival times in (0, horizon], exponential gaps of the given rate.
std::vector<double> schedule_poisson_arrivals(double rate, double horizon, Rng& rng);

/// Long-run model update rate min(lambda * (s * T * mean_batch + 1), mu):
/// arrival-bound while the node keeps up, service-bound once saturated.
double effective_update_rate(double lambda, int s, double T, double mean_batch, double mu);

/// Queue stability predicate lambda * (s * T * mean_batch + 1) < mu.
bool lemma1_stable(double lambda, int s, double T, double mean_batch, double mu);

/// Expected-staleness ceiling (mu / (lambda s T)) * sum_{k=1}^{n-1} 1/k for a
/// homogeneous stable group of n nodes.
double lemma2_staleness_bound(double mu, double lambda, int s, double T, int n);

/**
 * @brief Version bookkeeping across nodes with time-weighted staleness sums.
 *
 * known(j, i) is the newest clock of node i that node j has seen (nodes see
 * their own clock instantly). Staleness S(j, i) = clock(i) - known(j, i) is
 * integrated over time between updates, so means are exact time averages.
 * Callers must feed events in non-decreasing time order.
 */
class StalenessTracker {
public:
    explicit StalenessTracker(int n);

    /// Node advanced its own clock.
    void on_local_update(int node, std::uint64_t version, double now);
    /// Node `to` received a message from `from` carrying the given version.
    void on_delivery(int to, int from, std::uint64_t version, double now);
    /// Folds elapsed time into the integrals without changing versions.
    void advance_to(double now);

    std::uint64_t version(int owner) const;
    std::uint64_t known(int at, int owner) const;
    std::uint64_t staleness(int at, int owner) const;  // instantaneous

    /// Time-averaged staleness of one node's view, mean over its peers.
    double node_mean_staleness(int node) const;
    /// Time-averaged mean over all ordered pairs.
    double mean_pairwise_staleness() const;
    double elapsed() const { return last_time_; }

private:
    int n_;
    std::vector<std::vector<std::uint64_t>> known_;  // known_[at][owner]
    std::vector<double> row_sum_;                    // sum_owner S(at, owner)
    double total_sum_ = 0.0;
    std::vector<double> node_integral_;
    double total_integral_ = 0.0;
    double last_time_ = 0.0;
};

}  // namespace protosim
