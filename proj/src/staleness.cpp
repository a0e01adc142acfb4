#include "protosim/staleness.hpp"

#include <algorithm>
#include <stdexcept>

namespace protosim {

std::vector<double> schedule_poisson_arrivals(double rate, double horizon, Rng& rng) {
    if (rate <= 0.0)
        throw std::invalid_argument("schedule_poisson_arrivals: rate must be positive");
    if (horizon < 0.0)
        throw std::invalid_argument("schedule_poisson_arrivals: negative horizon");
    std::vector<double> times;
    double t = rng.exponential(rate);
    while (t <= horizon) {
        times.push_back(t);
        t += rng.exponential(rate);
    }
    return times;
}

double effective_update_rate(double lambda, int s, double T, double mean_batch, double mu) {
    if (lambda < 0.0 || mu <= 0.0 || T < 0.0 || mean_batch < 0.0 || s < 0)
        throw std::invalid_argument("effective_update_rate: negative rate arguments");
    return std::min(lambda * (static_cast<double>(s) * T * mean_batch + 1.0), mu);
}

bool lemma1_stable(double lambda, int s, double T, double mean_batch, double mu) {
    if (lambda < 0.0 || mu <= 0.0 || T < 0.0 || mean_batch < 0.0 || s < 0)
        throw std::invalid_argument("lemma1_stable: negative rate arguments");
    return lambda * (static_cast<double>(s) * T * mean_batch + 1.0) < mu;
}

double lemma2_staleness_bound(double mu, double lambda, int s, double T, int n) {
    if (mu <= 0.0 || lambda <= 0.0 || s < 1 || T <= 0.0)
        throw std::invalid_argument("lemma2_staleness_bound: rates must be positive");
    if (n < 2) throw std::invalid_argument("lemma2_staleness_bound: need at least two nodes");
    double harmonic = 0.0;
    for (int k = 1; k <= n - 1; ++k) harmonic += 1.0 / static_cast<double>(k);
    return mu / (lambda * static_cast<double>(s) * T) * harmonic;
}

StalenessTracker::StalenessTracker(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("StalenessTracker: need at least two nodes");
    known_.assign(static_cast<std::size_t>(n), std::vector<std::uint64_t>(n, 0));
    row_sum_.assign(static_cast<std::size_t>(n), 0.0);
    node_integral_.assign(static_cast<std::size_t>(n), 0.0);
}

void StalenessTracker::advance_to(double now) {
    if (now < last_time_)
        throw std::invalid_argument("StalenessTracker: time went backwards");
    const double dt = now - last_time_;
    if (dt > 0.0) {
        total_integral_ += total_sum_ * dt;
        for (int j = 0; j < n_; ++j) node_integral_[j] += row_sum_[j] * dt;
        last_time_ = now;
    }
}

void StalenessTracker::on_local_update(int node, std::uint64_t version, double now) {
    advance_to(now);
    auto& own = known_[node][node];
    if (version < own)
        throw std::invalid_argument("StalenessTracker: clock went backwards");
    const double delta = static_cast<double>(version - own);
    own = version;
    if (delta == 0.0) return;
    for (int j = 0; j < n_; ++j) {
        if (j == node) continue;
        row_sum_[j] += delta;
    }
    total_sum_ += delta * static_cast<double>(n_ - 1);
}

void StalenessTracker::on_delivery(int to, int from, std::uint64_t version, double now) {
    advance_to(now);
    auto& seen = known_[to][from];
    const std::uint64_t fresh = std::max(seen, std::min(version, known_[from][from]));
    const double delta = static_cast<double>(fresh - seen);
    seen = fresh;
    row_sum_[to] -= delta;
    total_sum_ -= delta;
}

std::uint64_t StalenessTracker::version(int owner) const { return known_[owner][owner]; }

std::uint64_t StalenessTracker::known(int at, int owner) const { return known_[at][owner]; }

std::uint64_t StalenessTracker::staleness(int at, int owner) const {
    return known_[owner][owner] - known_[at][owner];
}

double StalenessTracker::node_mean_staleness(int node) const {
    if (last_time_ <= 0.0) return 0.0;
    return node_integral_[node] / (static_cast<double>(n_ - 1) * last_time_);
}

double StalenessTracker::mean_pairwise_staleness() const {
    if (last_time_ <= 0.0) return 0.0;
    return total_integral_ /
           (static_cast<double>(n_) * static_cast<double>(n_ - 1) * last_time_);
}

}  // namespace protosim
