#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <variant>
#include <vector>

#include "protosim/compression.hpp"
#include "protosim/metrics.hpp"
#include "protosim/model.hpp"
#include "protosim/rng.hpp"
#include "protosim/similarity.hpp"
#include "protosim/wire.hpp"

namespace protosim {

/// Retention policy of one peer queue; 0 means unbounded.
struct QueuePolicy {
    std::size_t max_sets = 0;        ///< retained batches per peer
    std::size_t max_prototypes = 0;  ///< total prototypes across batches
};

/**
 * @brief Per-peer LIFO of received prototype batches.
 *
 * New batches stack on top; service pops a uniformly random entry from the
 * top batch. With max_sets = 1 a new batch replaces whatever is queued.
 * When the prototype cap is exceeded the oldest batches fall away first;
 * if the newest batch alone exceeds the cap it is truncated to fit. The
 * policy bounds therefore hold after every push.
 */
class PeerQueue {
public:
    PeerQueue() = default;
    explicit PeerQueue(QueuePolicy policy) : policy_(policy) {}

    void push_batch(std::vector<Prototype> batch);
    Prototype pop_random_from_top(Rng& rng);  // pre: !empty()

    bool empty() const { return batches_.empty(); }
    std::size_t batch_count() const { return batches_.size(); }
    std::size_t prototype_count() const { return total_; }
    const std::deque<std::vector<Prototype>>& batches() const { return batches_; }

private:
    std::deque<std::vector<Prototype>> batches_;  // back = most recent
    QueuePolicy policy_{};
    std::size_t total_ = 0;
};

/// Gossip behaviour of one node.
struct ShareParams {
    int fanout = 4;                  ///< s, neighbours contacted per share
    double share_probability = 1.0;  ///< T, coin flipped after each sensor train
    double jsd_threshold = 0.05;
    bool gate_enabled = true;          ///< false sends to every selected neighbour
    bool compress_before_share = false;
};

/// Full per-node configuration.
struct NodeConfig {
    QueuePolicy queue{};
    ShareParams share{};
    IlvqParams ilvq{};
    KdeConfig kde{};
    CompressionConfig compression{};
    bool compress_after_absorb = false;  ///< run the size cap after peer-prototype training
};

struct NodeCounters {
    std::uint64_t prototypes_trained = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_suppressed = 0;  ///< selected but filtered by the gate
    std::uint64_t samples_dropped = 0;      ///< dimension mismatches
    std::uint64_t compressions = 0;
};

/// A message addressed to a specific peer.
struct Outgoing {
    int to = 0;
    GossipMessage message;
};

/**
 * @brief One learning node: private codebook, sensor backlog, peer queues.
 *
 * The logical clock is 0 before the model exists, becomes 1 when the first
 * two sensor samples seed the codebook and afterwards always equals
 * 1 + the number of completed training steps (sensor or peer). Sensor work
 * always outranks peer work; peer queues are served round-robin, one
 * prototype per idle step, resuming after the last served queue.
 */
class Node {
public:
    Node(int id, int n_total, const NodeConfig& cfg);

    /// Processes one sensor sample end to end: prediction (once the model
    /// exists), training, clock advance and a sharing attempt. Returns the
    /// messages to deliver.
    std::vector<Outgoing> on_sensor_sample(const Sample& s, double now, Rng& rng);

    /// One peer-service quantum. Serves the first non-empty queue in rotation
    /// order and trains on one popped prototype; false when all queues are
    /// empty or the model is not initialized yet.
    bool idle_step(double now, Rng& rng);

    /// Accepts a peer's message: stacks the batch, records the peer's clock
    /// and refreshes the divergence-gate snapshot. Self-addressed messages
    /// are a protocol error.
    void enqueue_peer_model(const GossipMessage& msg);

    /// Coin-flip gossip: with probability T picks fanout distinct neighbours
    /// and sends the current codebook snapshot to each one that passes the
    /// divergence gate. Byte and message counters update per recipient.
    std::vector<Outgoing> try_share(double now, Rng& rng);

    // Scheduler-grained interface: arrival buffering and service split so a
    // caller can attach service durations between picking and completing.
    struct SensorWork {
        Sample sample;
    };
    struct PeerWork {
        Prototype prototype;
    };
    using Work = std::variant<SensorWork, PeerWork>;

    void push_sensor(Sample s) { sensor_fifo_.push_back(std::move(s)); }
    /// Pending sensor sample first, otherwise one popped peer prototype.
    std::optional<Work> pick_work(Rng& rng);
    /// Applies the training effects of previously picked work.
    std::vector<Outgoing> complete_work(Work work, double now, Rng& rng);

    int id() const { return id_; }
    int peer_count() const { return n_total_ - 1; }
    bool initialized() const { return model_.has_value(); }
    const PrototypeModel& model() const;
    std::uint64_t logical_clock() const { return clock_; }
    const NodeCounters& counters() const { return counters_; }
    const ClassCounts& prequential() const { return prequential_; }
    std::size_t rotation_cursor() const { return rr_cursor_; }

    std::size_t sensor_backlog() const { return sensor_fifo_.size(); }
    std::size_t queued_prototypes() const;  // peer queues only
    std::size_t queued_total() const { return queued_prototypes() + sensor_fifo_.size(); }
    bool any_peer_queue_nonempty() const;

    const PeerQueue& peer_queue(int neighbor_id) const;
    std::uint64_t known_version(int neighbor_id) const;
    const std::vector<Prototype>& peer_snapshot(int neighbor_id) const;
    int neighbor_id(std::size_t index) const;

private:
    std::size_t neighbor_index(int node_id) const;
    std::optional<Prototype> pick_peer_prototype(Rng& rng);
    std::vector<Outgoing> process_sensor(const Sample& s, double now, Rng& rng);
    void absorb_peer_prototype(const Prototype& p, double now);
    void compress_in_place();

    int id_ = 0;
    int n_total_ = 0;
    NodeConfig cfg_{};
    std::optional<PrototypeModel> model_;
    std::optional<Sample> pending_seed_;
    std::deque<Sample> sensor_fifo_;
    std::vector<PeerQueue> queues_;                     // by neighbour index
    std::vector<std::uint64_t> known_versions_;        // by neighbour index
    std::vector<std::vector<Prototype>> snapshots_;    // last set exchanged either way
    std::size_t rr_cursor_ = 0;
    std::uint64_t clock_ = 0;
    NodeCounters counters_{};
    ClassCounts prequential_{};
};

}  // namespace protosim
