#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "protosim/dataset.hpp"
#include "protosim/simulation.hpp"

namespace protosim {

/// Named protocol bundles, ordered by how much machinery they switch on.
enum class Scenario {
    base,         ///< every selected neighbour is sent to; queues unbounded; no compression
    jsd,          ///< base plus the divergence gate
    limit_queue,  ///< jsd plus the 10000-prototype queue cap
    clustering,   ///< limit_queue plus one-batch retention and size-cap compression
};

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

/// One experiment: a scenario swept over consecutive seeds.
struct ExperimentConfig {
    Scenario scenario = Scenario::base;
    int n = 5;
    int s = 4;               ///< gossip fanout
    double t_share = 1.0;    ///< share probability per sensor train
    double th_jsd = 0.05;    ///< divergence gate threshold
    std::size_t th_prot = 500;  ///< compression size cap
    std::optional<std::size_t> queue_max_protos;  ///< overrides the scenario bundle
    std::optional<std::size_t> queue_max_sets;    ///< overrides the scenario bundle
    double lambda_s = 10.0;
    double mu = 200.0;
    DatasetSpec dataset{};
    double horizon = 60.0;
    int seeds = 50;
    double metrics_period = 1.0;
    std::string out_dir = "out";
    std::string trace_path;  ///< empty = no event trace
};

/// Applies the scenario bundle and builds the per-node streams for one seed.
SimulationConfig resolve(const ExperimentConfig& cfg, std::uint64_t seed);

/// Per-seed reduction used for the aggregate and summary outputs.
struct SeedSummary {
    std::uint64_t seed = 0;
    double final_f1 = 0.0;            ///< mean over nodes
    double bytes_per_node = 0.0;
    double trained_per_node = 0.0;
    double mean_staleness = 0.0;
    double messages_sent = 0.0;       ///< total over nodes
    double messages_suppressed = 0.0;
    double mean_message_bytes = 0.0;
    double max_model_size = 0.0;
    double final_occupancy = 0.0;
};

struct ExperimentResult {
    std::vector<std::string> run_files;
    std::string aggregate_file;
    std::string summary_file;
    std::vector<SeedSummary> seeds;
    double efficiency = 0.0;  ///< mean final F1 (percent) per MB/s of node bandwidth
};

/**
 * @brief Runs every seed, writing one records CSV per run plus an aggregate
 * CSV (mean and sample standard deviation of each per-seed metric) and a
 * summary CSV carrying the F1-per-bandwidth efficiency ratio.
 *
 * Seeds are 1..seeds; rerunning the same config reproduces every file byte
 * for byte.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace protosim
