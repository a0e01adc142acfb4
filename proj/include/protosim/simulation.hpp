#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "protosim/dataset.hpp"
#include "protosim/metrics.hpp"
#include "protosim/node.hpp"

namespace protosim {

/// One fully resolved run: homogeneous nodes, private streams, seeded rngs.
struct SimulationConfig {
    int n = 5;
    double lambda_s = 10.0;       ///< sensor arrival rate per node
    double mu = 200.0;            ///< service rate; one exponential draw per training step
    double horizon = 60.0;        ///< simulated seconds
    double metrics_period = 1.0;  ///< spacing of periodic records
    std::uint64_t seed = 1;
    NodeConfig node{};
    std::vector<std::vector<Sample>> streams;  ///< one private stream per node
    std::string scenario_name = "base";
    std::ostream* trace = nullptr;  ///< optional event log, one line per event
};

/// End-of-run view of one node.
struct NodeSummary {
    int node = 0;
    double final_f1 = 0.0;
    std::uint64_t prototypes_trained = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_suppressed = 0;
    std::size_t model_size = 0;
    double mean_staleness = 0.0;  ///< time-averaged over the node's peers
};

struct RunResult {
    std::vector<MetricsRecord> records;  ///< periodic rows, grouped by time then node
    std::vector<NodeSummary> nodes;
    double mean_final_f1 = 0.0;
    double mean_pairwise_staleness = 0.0;  ///< time-averaged over all ordered pairs
    std::uint64_t total_bytes = 0;
    std::uint64_t total_messages = 0;
    std::uint64_t total_suppressed = 0;
    std::uint64_t total_trained = 0;
    double mean_batch_length = 0.0;  ///< prototypes per sent message
    double mean_message_bytes = 0.0;
    std::size_t max_message_prototypes = 0;
    std::size_t max_model_size = 0;          ///< largest codebook observed anywhere
    std::size_t max_occupancy_late = 0;      ///< peak queued work in the second half
    std::size_t final_occupancy = 0;         ///< queued work at the horizon
    std::uint64_t events_processed = 0;
};

/// All configuration violations, empty when the config is runnable.
std::vector<std::string> validate_config(const SimulationConfig& cfg);

/**
 * @brief Deterministic event-driven execution of one run.
 *
 * Sensor arrivals are Poisson per node and zipped with the node's private
 * stream; every training step holds the node's single server for an
 * exponential service time; sensor work preempts queued peer work at every
 * service boundary. Messages deliver instantly but strictly after the
 * emitting event, in per-pair FIFO order. Identical configs and seeds give
 * identical results, record for record.
 *
 * Throws std::invalid_argument listing every violation when the config is
 * not runnable.
 */
RunResult run_simulation(const SimulationConfig& cfg);

}  // namespace protosim
