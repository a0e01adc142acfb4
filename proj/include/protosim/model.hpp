#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace protosim {

/// One labelled observation.
struct Sample {
    std::vector<double> features;
    int label = 0;
};

/// One codebook entry. Relevance counts correct winner assignments and
/// controls how fast the entry moves on later updates.
struct Prototype {
    std::int64_t id = 0;
    std::vector<double> vector;
    int label = 0;
    std::uint64_t relevance = 0;
    double creation_tick = 0.0;
};

/// Tuning knobs of the incremental training rule.
struct IlvqParams {
    double min_winner_rate = 0.01;     ///< lower cap for the winner learning rate
    double neighbor_rate_ratio = 0.1;  ///< neighbour rate as a fraction of the winner rate
    int max_edge_age = 50;             ///< edges reaching this age are removed
    int denoise_period = 100;          ///< absorbed samples between denoising sweeps
};

enum class TrainOutcome { inserted, adapted };

/// Winner search result: prototype ids and their distances to the query.
struct WinnerPair {
    std::int64_t winner = 0;
    std::int64_t runner_up = 0;
    double winner_dist = 0.0;
    double runner_up_dist = 0.0;
};

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Undirected edge key, always stored with the smaller id first.
using EdgeKey = std::pair<std::int64_t, std::int64_t>;

inline EdgeKey make_edge_key(std::int64_t a, std::int64_t b) {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

/**
 * @brief Incrementally trained labelled prototype set with an aged edge graph.
 *
 * The codebook is seeded with two samples. Each further sample either joins
 * the codebook as a new prototype (when its label is unknown or it lies
 * beyond the adaptive insertion threshold of both nearest prototypes) or is
 * absorbed: the winner moves toward or away from the sample depending on
 * label agreement, the winner's edge ages advance, stale edges disappear and
 * edge-less prototypes are pruned periodically.
 *
 * Invariants kept by every mutating call:
 *  - prototype ids are unique and ascending in storage order,
 *  - all edge endpoints are live prototype ids and all ages stay below
 *    IlvqParams::max_edge_age,
 *  - class_counts sums to the number of absorbed samples (the two seed
 *    samples plus one per train_one call).
 */
class PrototypeModel {
public:
    PrototypeModel() = default;

    /// Seeds the codebook with two samples of equal dimension. No edges yet.
    static PrototypeModel init(const Sample& a, const Sample& b, double now,
                               const IlvqParams& params = {});

    /// Rebuilds a model from explicit state. Prototypes must be sorted by id.
    static PrototypeModel from_state(std::vector<Prototype> prototypes,
                                     std::map<EdgeKey, int> edges,
                                     std::map<int, std::uint64_t> class_counts,
                                     std::size_t dimension, std::int64_t next_id,
                                     std::uint64_t absorbed, int since_denoise,
                                     const IlvqParams& params);

    bool initialized() const { return !prototypes_.empty(); }
    std::size_t size() const { return prototypes_.size(); }
    std::size_t dimension() const { return dimension_; }
    const std::vector<Prototype>& prototypes() const { return prototypes_; }
    const std::map<EdgeKey, int>& edges() const { return edges_; }
    const std::map<int, std::uint64_t>& class_counts() const { return class_counts_; }
    const IlvqParams& params() const { return params_; }
    std::int64_t next_id() const { return next_id_; }
    std::uint64_t absorbed_samples() const { return absorbed_; }
    int since_denoise() const { return since_denoise_; }

    const Prototype& prototype_by_id(std::int64_t id) const;

    /// Ids of prototypes sharing an edge with the given prototype, ascending.
    std::vector<std::int64_t> neighbors_of(std::int64_t id) const;

    /// Insertion threshold: maximum edge-neighbour distance, or the distance
    /// to the nearest other prototype when the entry has no edges.
    double insertion_threshold(std::int64_t id) const;

    /// Winner and runner-up by Euclidean distance, ties to the lower id.
    /// Requires at least two prototypes.
    WinnerPair find_winners(const std::vector<double>& x) const;

    /// True when x should join the codebook as a new prototype.
    bool should_insert(const std::vector<double>& x, int label) const;

    /// Absorbs one sample. Requires an initialized model of matching dimension.
    TrainOutcome train_one(const Sample& s, double now);

    /// Label of the nearest prototype. Requires a non-empty codebook.
    int predict(const std::vector<double>& x) const;

    /// Predicted label together with the nearest prototype's id.
    std::pair<int, std::int64_t> predict_nearest(const std::vector<double>& x) const;

    /// Rewards a prototype after an externally confirmed correct prediction.
    void reinforce(std::int64_t id);

private:
    std::size_t index_of(std::int64_t id) const;
    void remove_stale_edges();
    void denoise();

    std::vector<Prototype> prototypes_;  // sorted by id
    std::map<EdgeKey, int> edges_;       // edge -> age
    std::map<int, std::uint64_t> class_counts_;
    std::size_t dimension_ = 0;
    std::int64_t next_id_ = 0;
    std::uint64_t absorbed_ = 0;
    int since_denoise_ = 0;
    IlvqParams params_{};
};

}  // namespace protosim
