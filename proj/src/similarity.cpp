#include "protosim/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace protosim {

double epanechnikov(double u) {
    if (std::abs(u) > 1.0) return 0.0;
    return 0.75 * (1.0 - u * u);
}

double scott_bandwidth(std::size_t m, std::size_t d) {
    if (m == 0) throw std::invalid_argument("scott_bandwidth: empty sample");
    return std::pow(static_cast<double>(m), -1.0 / (static_cast<double>(d) + 4.0));
}

double kde_density(const std::vector<std::vector<double>>& samples,
                   const std::vector<double>& query, double h) {
    if (samples.empty()) throw std::invalid_argument("kde_density: empty sample set");
    if (h <= 0.0) throw std::invalid_argument("kde_density: bandwidth must be positive");
    const std::size_t d = query.size();
    double sum = 0.0;
    for (const auto& x : samples) {
        if (x.size() != d) throw std::invalid_argument("kde_density: dimension mismatch");
        double prod = 1.0;
        for (std::size_t k = 0; k < d && prod != 0.0; ++k)
            prod *= epanechnikov((query[k] - x[k]) / h);
        sum += prod;
    }
    const double m = static_cast<double>(samples.size());
    return sum / (m * std::pow(h, static_cast<double>(d)));
}

std::vector<std::vector<double>> evaluation_grid(const std::vector<std::vector<double>>& a,
                                                 const std::vector<std::vector<double>>& b,
                                                 const KdeConfig& cfg, Rng& rng) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("evaluation_grid: both sets must be non-empty");
    const std::size_t d = a.front().size();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    const auto fold = [&](const std::vector<std::vector<double>>& set) {
        for (const auto& x : set) {
            if (x.size() != d)
                throw std::invalid_argument("evaluation_grid: dimension mismatch");
            for (std::size_t k = 0; k < d; ++k) {
                lo[k] = std::min(lo[k], x[k]);
                hi[k] = std::max(hi[k], x[k]);
            }
        }
    };
    fold(a);
    fold(b);

    double total_range = 0.0;
    for (std::size_t k = 0; k < d; ++k) total_range += hi[k] - lo[k];

    std::size_t count;
    if (total_range <= 0.0) {
        count = static_cast<std::size_t>(cfg.min_points);
    } else {
        const double raw = static_cast<double>(cfg.base_points) *
                           std::pow(2.0, static_cast<double>(d) / 2.0) *
                           (total_range / (2.0 * static_cast<double>(d)));
        count = static_cast<std::size_t>(std::floor(raw));
        count = std::max(count, static_cast<std::size_t>(cfg.min_points));
    }

    std::vector<std::vector<double>> grid(count, std::vector<double>(d));
    for (auto& point : grid)
        for (std::size_t k = 0; k < d; ++k)
            point[k] = lo[k] == hi[k] ? lo[k] : rng.uniform(lo[k], hi[k]);
    return grid;
}

namespace {

DiscretePmf normalized_masses(const std::vector<std::vector<double>>& samples,
                              const std::vector<std::vector<double>>& grid, double h) {
    DiscretePmf pmf;
    pmf.points = grid;
    pmf.masses.resize(grid.size());
    double total = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        pmf.masses[j] = kde_density(samples, grid[j], h);
        total += pmf.masses[j];
    }
    if (total <= 0.0) {
        const double uniform = 1.0 / static_cast<double>(grid.size());
        std::fill(pmf.masses.begin(), pmf.masses.end(), uniform);
    } else {
        for (double& m : pmf.masses) m /= total;
    }
    return pmf;
}

}  // namespace

std::pair<DiscretePmf, DiscretePmf> pmf_pair(const std::vector<std::vector<double>>& a,
                                             const std::vector<std::vector<double>>& b,
                                             const KdeConfig& cfg, Rng& rng) {
    const auto grid = evaluation_grid(a, b, cfg, rng);
    const std::size_t d = a.front().size();
    const double ha = cfg.fixed_bandwidth > 0.0 ? cfg.fixed_bandwidth : scott_bandwidth(a.size(), d);
    const double hb = cfg.fixed_bandwidth > 0.0 ? cfg.fixed_bandwidth : scott_bandwidth(b.size(), d);
    return {normalized_masses(a, grid, ha), normalized_masses(b, grid, hb)};
}

double kl_divergence(const DiscretePmf& p, const DiscretePmf& q) {
    if (p.masses.size() != q.masses.size())
        throw std::invalid_argument("kl_divergence: grids differ in size");
    double acc = 0.0;
    for (std::size_t j = 0; j < p.masses.size(); ++j) {
        const double pj = p.masses[j];
        if (pj <= 0.0) continue;
        const double qj = q.masses[j];
        if (qj <= 0.0) return std::numeric_limits<double>::infinity();
        acc += pj * std::log2(pj / qj);
    }
    return acc;
}

double js_distance(const DiscretePmf& p, const DiscretePmf& q) {
    if (p.masses.size() != q.masses.size())
        throw std::invalid_argument("js_distance: grids differ in size");
    DiscretePmf mid;
    mid.masses.resize(p.masses.size());
    for (std::size_t j = 0; j < p.masses.size(); ++j)
        mid.masses[j] = 0.5 * (p.masses[j] + q.masses[j]);
    double js2 = 0.5 * kl_divergence(p, mid) + 0.5 * kl_divergence(q, mid);
    // Mathematically js2 lies in [0, 1]; rounding may nudge it out.
    js2 = std::clamp(js2, 0.0, 1.0);
    return std::sqrt(js2);
}

bool is_it_worthy(const PrototypeModel& local, const std::vector<Prototype>& peer_snapshot,
                  double threshold, const KdeConfig& cfg, Rng& rng) {
    if (local.size() == 0) throw std::logic_error("is_it_worthy: empty local model");
    if (peer_snapshot.empty()) return true;
    std::vector<std::vector<double>> mine;
    mine.reserve(local.size());
    for (const Prototype& p : local.prototypes()) mine.push_back(p.vector);
    std::vector<std::vector<double>> theirs;
    theirs.reserve(peer_snapshot.size());
    for (const Prototype& p : peer_snapshot) theirs.push_back(p.vector);
    const auto [mine_pmf, theirs_pmf] = pmf_pair(mine, theirs, cfg, rng);
    return js_distance(mine_pmf, theirs_pmf) > threshold;
}

}  // namespace protosim
