#include "protosim/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace protosim {

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("euclidean_distance: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

PrototypeModel PrototypeModel::init(const Sample& a, const Sample& b, double now,
                                    const IlvqParams& params) {
    if (a.features.empty() || a.features.size() != b.features.size())
        throw std::invalid_argument("init: seed samples must share a positive dimension");
    PrototypeModel m;
    m.params_ = params;
    m.dimension_ = a.features.size();
    m.prototypes_.push_back({0, a.features, a.label, 0, now});
    m.prototypes_.push_back({1, b.features, b.label, 0, now});
    m.next_id_ = 2;
    m.class_counts_[a.label] += 1;
    m.class_counts_[b.label] += 1;
    m.absorbed_ = 2;
    m.since_denoise_ = 2;
    return m;
}

PrototypeModel PrototypeModel::from_state(std::vector<Prototype> prototypes,
                                          std::map<EdgeKey, int> edges,
                                          std::map<int, std::uint64_t> class_counts,
                                          std::size_t dimension, std::int64_t next_id,
                                          std::uint64_t absorbed, int since_denoise,
                                          const IlvqParams& params) {
    PrototypeModel m;
    m.prototypes_ = std::move(prototypes);
    m.edges_ = std::move(edges);
    m.class_counts_ = std::move(class_counts);
    m.dimension_ = dimension;
    m.next_id_ = next_id;
    m.absorbed_ = absorbed;
    m.since_denoise_ = since_denoise;
    m.params_ = params;
    for (std::size_t i = 1; i < m.prototypes_.size(); ++i)
        if (m.prototypes_[i - 1].id >= m.prototypes_[i].id)
            throw std::invalid_argument("from_state: prototypes must be sorted by unique id");
    return m;
}

std::size_t PrototypeModel::index_of(std::int64_t id) const {
    const auto it = std::lower_bound(
        prototypes_.begin(), prototypes_.end(), id,
        [](const Prototype& p, std::int64_t v) { return p.id < v; });
    if (it == prototypes_.end() || it->id != id)
        throw std::logic_error("unknown prototype id");
    return static_cast<std::size_t>(it - prototypes_.begin());
}

const Prototype& PrototypeModel::prototype_by_id(std::int64_t id) const {
    return prototypes_[index_of(id)];
}

std::vector<std::int64_t> PrototypeModel::neighbors_of(std::int64_t id) const {
    std::vector<std::int64_t> out;
    for (const auto& [key, age] : edges_) {
        if (key.first == id) out.push_back(key.second);
        else if (key.second == id) out.push_back(key.first);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double PrototypeModel::insertion_threshold(std::int64_t id) const {
    const Prototype& p = prototypes_[index_of(id)];
    const auto nbrs = neighbors_of(id);
    if (!nbrs.empty()) {
        double worst = 0.0;
        for (const std::int64_t n : nbrs)
            worst = std::max(worst, euclidean_distance(p.vector, prototype_by_id(n).vector));
        return worst;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Prototype& q : prototypes_) {
        if (q.id == id) continue;
        best = std::min(best, euclidean_distance(p.vector, q.vector));
    }
    return best;
}

WinnerPair PrototypeModel::find_winners(const std::vector<double>& x) const {
    if (prototypes_.size() < 2)
        throw std::logic_error("find_winners: at least two prototypes required");
    if (x.size() != dimension_)
        throw std::invalid_argument("find_winners: dimension mismatch");

    // (distance, id) ordering; storage is id-ascending, so strict improvement
    // on distance alone already breaks ties toward the lower id.
    std::size_t best = 0, second = 1;
    double best_d = euclidean_distance(x, prototypes_[0].vector);
    double second_d = euclidean_distance(x, prototypes_[1].vector);
    if (second_d < best_d) {
        std::swap(best, second);
        std::swap(best_d, second_d);
    }
    for (std::size_t i = 2; i < prototypes_.size(); ++i) {
        const double d = euclidean_distance(x, prototypes_[i].vector);
        if (d < best_d) {
            second = best;
            second_d = best_d;
            best = i;
            best_d = d;
        } else if (d < second_d) {
            second = i;
            second_d = d;
        }
    }
    return {prototypes_[best].id, prototypes_[second].id, best_d, second_d};
}

bool PrototypeModel::should_insert(const std::vector<double>& x, int label) const {
    if (class_counts_.find(label) == class_counts_.end()) return true;
    const WinnerPair w = find_winners(x);
    return w.winner_dist > insertion_threshold(w.winner) ||
           w.runner_up_dist > insertion_threshold(w.runner_up);
}

TrainOutcome PrototypeModel::train_one(const Sample& s, double now) {
    if (prototypes_.size() < 2)
        throw std::logic_error("train_one: model not initialized");
    if (s.features.size() != dimension_)
        throw std::invalid_argument("train_one: dimension mismatch");

    if (should_insert(s.features, s.label)) {
        prototypes_.push_back({next_id_++, s.features, s.label, 0, now});
        class_counts_[s.label] += 1;
        ++absorbed_;
        ++since_denoise_;
        return TrainOutcome::inserted;
    }

    const WinnerPair w = find_winners(s.features);
    const EdgeKey key = make_edge_key(w.winner, w.runner_up);
    edges_.try_emplace(key, 0);
    for (auto& [k, age] : edges_)
        if (k.first == w.winner || k.second == w.winner) ++age;

    class_counts_[s.label] += 1;
    ++absorbed_;
    ++since_denoise_;

    Prototype& winner = prototypes_[index_of(w.winner)];
    const double rate_w =
        std::max(1.0 / (1.0 + static_cast<double>(winner.relevance)), params_.min_winner_rate);
    const double rate_n = rate_w * params_.neighbor_rate_ratio;
    const auto nbrs = neighbors_of(w.winner);

    const auto pull = [&](std::vector<double>& v, double rate) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += rate * (s.features[i] - v[i]);
    };
    const auto push = [&](std::vector<double>& v, double rate) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= rate * (s.features[i] - v[i]);
    };

    if (winner.label == s.label) {
        pull(winner.vector, rate_w);
        for (const std::int64_t n : nbrs) {
            Prototype& q = prototypes_[index_of(n)];
            if (q.label != s.label) push(q.vector, rate_n);
        }
        winner.relevance += 1;
    } else {
        push(winner.vector, rate_w);
        for (const std::int64_t n : nbrs) {
            Prototype& q = prototypes_[index_of(n)];
            if (q.label == s.label) pull(q.vector, rate_n);
        }
    }

    remove_stale_edges();
    if (since_denoise_ >= params_.denoise_period) {
        denoise();
        since_denoise_ = 0;
    }
    return TrainOutcome::adapted;
}

int PrototypeModel::predict(const std::vector<double>& x) const {
    return predict_nearest(x).first;
}

std::pair<int, std::int64_t> PrototypeModel::predict_nearest(const std::vector<double>& x) const {
    if (prototypes_.empty()) throw std::logic_error("predict: empty model");
    if (x.size() != dimension_)
        throw std::invalid_argument("predict: dimension mismatch");
    std::size_t best = 0;
    double best_d = euclidean_distance(x, prototypes_[0].vector);
    for (std::size_t i = 1; i < prototypes_.size(); ++i) {
        const double d = euclidean_distance(x, prototypes_[i].vector);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return {prototypes_[best].label, prototypes_[best].id};
}

void PrototypeModel::reinforce(std::int64_t id) {
    prototypes_[index_of(id)].relevance += 1;
}

void PrototypeModel::remove_stale_edges() {
    for (auto it = edges_.begin(); it != edges_.end();) {
        if (it->second >= params_.max_edge_age) it = edges_.erase(it);
        else ++it;
    }
}

void PrototypeModel::denoise() {
    std::vector<char> has_edge(prototypes_.size(), 0);
    for (const auto& [key, age] : edges_) {
        has_edge[index_of(key.first)] = 1;
        has_edge[index_of(key.second)] = 1;
    }
    std::size_t keep = 0;
    for (const char h : has_edge) keep += h;
    // A sweep that would leave fewer than two prototypes is skipped whole;
    // winner search needs two entries.
    if (keep < 2) return;
    std::vector<Prototype> kept;
    kept.reserve(keep);
    for (std::size_t i = 0; i < prototypes_.size(); ++i)
        if (has_edge[i]) kept.push_back(std::move(prototypes_[i]));
    prototypes_ = std::move(kept);
}

}  // namespace protosim
