#include "protosim/node.hpp"

#include <algorithm>
#include <stdexcept>

namespace protosim {

void PeerQueue::push_batch(std::vector<Prototype> batch) {
    if (policy_.max_sets == 1) {
        batches_.clear();
        total_ = 0;
    } else if (policy_.max_sets > 1) {
        while (batches_.size() >= policy_.max_sets) {
            total_ -= batches_.front().size();
            batches_.pop_front();
        }
    }
    total_ += batch.size();
    batches_.push_back(std::move(batch));
    if (policy_.max_prototypes > 0) {
        while (total_ > policy_.max_prototypes && batches_.size() > 1) {
            total_ -= batches_.front().size();
            batches_.pop_front();
        }
        if (total_ > policy_.max_prototypes) {
            batches_.front().resize(policy_.max_prototypes);
            total_ = policy_.max_prototypes;
        }
    }
}

Prototype PeerQueue::pop_random_from_top(Rng& rng) {
    if (batches_.empty()) throw std::logic_error("pop_random_from_top: empty queue");
    auto& top = batches_.back();
    const std::size_t i = static_cast<std::size_t>(rng.below(top.size()));
    Prototype out = std::move(top[i]);
    top.erase(top.begin() + static_cast<std::ptrdiff_t>(i));
    --total_;
    if (top.empty()) batches_.pop_back();
    return out;
}

Node::Node(int id, int n_total, const NodeConfig& cfg)
    : id_(id), n_total_(n_total), cfg_(cfg) {
    if (n_total < 2) throw std::invalid_argument("Node: at least two nodes required");
    if (id < 0 || id >= n_total) throw std::invalid_argument("Node: id out of range");
    if (cfg.share.fanout < 0 || cfg.share.fanout > n_total - 1)
        throw std::invalid_argument("Node: fanout exceeds peer count");
    if (cfg.share.share_probability < 0.0 || cfg.share.share_probability > 1.0)
        throw std::invalid_argument("Node: share probability outside [0, 1]");
    queues_.assign(static_cast<std::size_t>(n_total - 1), PeerQueue(cfg.queue));
    known_versions_.assign(static_cast<std::size_t>(n_total - 1), 0);
    snapshots_.assign(static_cast<std::size_t>(n_total - 1), {});
}

const PrototypeModel& Node::model() const {
    if (!model_) throw std::logic_error("Node: model not initialized");
    return *model_;
}

std::size_t Node::neighbor_index(int node_id) const {
    if (node_id == id_ || node_id < 0 || node_id >= n_total_)
        throw std::invalid_argument("Node: not a neighbour id");
    return static_cast<std::size_t>(node_id < id_ ? node_id : node_id - 1);
}

int Node::neighbor_id(std::size_t index) const {
    const int i = static_cast<int>(index);
    return i < id_ ? i : i + 1;
}

const PeerQueue& Node::peer_queue(int nid) const { return queues_[neighbor_index(nid)]; }

std::uint64_t Node::known_version(int nid) const { return known_versions_[neighbor_index(nid)]; }

const std::vector<Prototype>& Node::peer_snapshot(int nid) const {
    return snapshots_[neighbor_index(nid)];
}

std::size_t Node::queued_prototypes() const {
    std::size_t total = 0;
    for (const PeerQueue& q : queues_) total += q.prototype_count();
    return total;
}

bool Node::any_peer_queue_nonempty() const {
    for (const PeerQueue& q : queues_)
        if (!q.empty()) return true;
    return false;
}

std::vector<Outgoing> Node::on_sensor_sample(const Sample& s, double now, Rng& rng) {
    return process_sensor(s, now, rng);
}

std::vector<Outgoing> Node::process_sensor(const Sample& s, double now, Rng& rng) {
    const std::size_t dim =
        model_ ? model_->dimension() : (pending_seed_ ? pending_seed_->features.size() : 0);
    if (dim != 0 && s.features.size() != dim) {
        ++counters_.samples_dropped;
        return {};
    }
    if (!model_) {
        if (!pending_seed_) {
            pending_seed_ = s;
            return {};
        }
        model_ = PrototypeModel::init(*pending_seed_, s, now, cfg_.ilvq);
        pending_seed_.reset();
        clock_ = 1;
        return try_share(now, rng);
    }
    const auto [predicted, nearest] = model_->predict_nearest(s.features);
    prequential_update(prequential_, s.label, predicted);
    if (predicted == s.label) model_->reinforce(nearest);
    model_->train_one(s, now);
    ++clock_;
    ++counters_.prototypes_trained;
    return try_share(now, rng);
}

std::optional<Prototype> Node::pick_peer_prototype(Rng& rng) {
    const std::size_t peers = queues_.size();
    if (!model_) {
        rr_cursor_ = (rr_cursor_ + 1) % peers;
        return std::nullopt;
    }
    for (std::size_t step = 1; step <= peers; ++step) {
        const std::size_t pos = (rr_cursor_ + step) % peers;
        if (!queues_[pos].empty()) {
            rr_cursor_ = pos;
            return queues_[pos].pop_random_from_top(rng);
        }
    }
    rr_cursor_ = (rr_cursor_ + 1) % peers;
    return std::nullopt;
}

void Node::absorb_peer_prototype(const Prototype& p, double now) {
    // Mismatched batches are normally rejected at enqueue; the remaining
    // path here is a batch accepted before the first sensor sample fixed
    // the node's dimension.
    if (p.vector.size() != model_->dimension()) {
        ++counters_.samples_dropped;
        return;
    }
    model_->train_one({p.vector, p.label}, now);
    ++clock_;
    ++counters_.prototypes_trained;
    if (cfg_.compress_after_absorb && model_->size() > cfg_.compression.limit_size)
        compress_in_place();
}

void Node::compress_in_place() {
    CompressionResult res = compress_model(*model_, cfg_.compression);
    if (res.compressed) {
        model_ = std::move(res.model);
        ++counters_.compressions;
    }
}

bool Node::idle_step(double now, Rng& rng) {
    auto popped = pick_peer_prototype(rng);
    if (!popped) return false;
    absorb_peer_prototype(*popped, now);
    return true;
}

void Node::enqueue_peer_model(const GossipMessage& msg) {
    if (static_cast<int>(msg.sender) == id_)
        throw std::invalid_argument("enqueue_peer_model: message from self");
    if (msg.prototypes.empty())
        throw std::invalid_argument("enqueue_peer_model: empty prototype batch");
    const std::size_t dim =
        model_ ? model_->dimension() : (pending_seed_ ? pending_seed_->features.size() : 0);
    if (dim != 0 && msg.prototypes.front().vector.size() != dim) {
        counters_.samples_dropped += msg.prototypes.size();
        return;
    }
    const std::size_t ni = neighbor_index(static_cast<int>(msg.sender));
    snapshots_[ni] = msg.prototypes;
    known_versions_[ni] = std::max(known_versions_[ni], msg.version);
    queues_[ni].push_batch(msg.prototypes);
}

std::vector<Outgoing> Node::try_share(double now, Rng& rng) {
    std::vector<Outgoing> out;
    if (!model_ || model_->size() == 0) return out;
    if (rng.uniform01() >= cfg_.share.share_probability) return out;
    if (cfg_.share.fanout == 0) return out;
    if (cfg_.share.compress_before_share && model_->size() > cfg_.compression.limit_size)
        compress_in_place();

    const auto picks =
        rng.sample_indices(queues_.size(), static_cast<std::size_t>(cfg_.share.fanout));
    for (const std::size_t ni : picks) {
        const bool worthy =
            !cfg_.share.gate_enabled ||
            is_it_worthy(*model_, snapshots_[ni], cfg_.share.jsd_threshold, cfg_.kde, rng);
        if (!worthy) {
            ++counters_.messages_suppressed;
            continue;
        }
        GossipMessage msg;
        msg.sender = static_cast<std::uint32_t>(id_);
        msg.version = clock_;
        msg.prototypes = model_->prototypes();
        msg.send_tick = now;
        counters_.bytes_sent += encoded_size(msg);
        ++counters_.messages_sent;
        snapshots_[ni] = msg.prototypes;
        out.push_back({neighbor_id(ni), std::move(msg)});
    }
    return out;
}

std::optional<Node::Work> Node::pick_work(Rng& rng) {
    if (!sensor_fifo_.empty()) {
        SensorWork w{std::move(sensor_fifo_.front())};
        sensor_fifo_.pop_front();
        return Work{std::move(w)};
    }
    auto popped = pick_peer_prototype(rng);
    if (!popped) return std::nullopt;
    return Work{PeerWork{std::move(*popped)}};
}

std::vector<Outgoing> Node::complete_work(Work work, double now, Rng& rng) {
    if (std::holds_alternative<SensorWork>(work))
        return process_sensor(std::get<SensorWork>(work).sample, now, rng);
    absorb_peer_prototype(std::get<PeerWork>(work).prototype, now);
    return {};
}

}  // namespace protosim
