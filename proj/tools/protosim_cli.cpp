#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "protosim/experiment.hpp"

namespace {

// Exit codes: 0 success, 1 config rejected, 2 runtime failure (IO etc).
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gossip-trained prototype classifier simulator"};
    app.set_config("--config", "", "Key=value config file mirroring every flag");
    app.get_config_formatter_base()->comment('#');

    protosim::ExperimentConfig cfg;
    std::string scenario = "base";
    std::size_t queue_max_protos = 0;
    std::size_t queue_max_sets = 0;
    bool r_random = false;

    app.add_option("--scenario", scenario, "Protocol bundle: base, jsd, limit-queue, clustering")
        ->check(CLI::IsMember({"base", "jsd", "limit-queue", "clustering"}))
        ->capture_default_str();
    app.add_option("--n", cfg.n, "Number of nodes")->capture_default_str();
    app.add_option("--s", cfg.s, "Gossip fanout per share")->capture_default_str();
    app.add_option("--t-share", cfg.t_share, "Share probability after each sensor train")
        ->capture_default_str();
    app.add_option("--th-jsd", cfg.th_jsd, "Divergence gate threshold")->capture_default_str();
    app.add_option("--th-prot", cfg.th_prot, "Compression size cap (clustering scenario)")
        ->capture_default_str();
    app.add_option("--queue-max-protos", queue_max_protos,
                   "Per-peer queue prototype cap; overrides the scenario bundle");
    app.add_option("--queue-max-sets", queue_max_sets,
                   "Per-peer queue batch cap; overrides the scenario bundle");
    app.add_option("--lambda-s", cfg.lambda_s, "Sensor arrival rate per node (events/s)")
        ->capture_default_str();
    app.add_option("--mu", cfg.mu, "Service rate per training step (events/s)")
        ->capture_default_str();
    app.add_option("--dataset", cfg.dataset.source,
                   "CSV path, or 'synthetic' for the drift generator")
        ->capture_default_str();
    app.add_option("--d-size", cfg.dataset.d_size, "Total samples drawn across all nodes")
        ->capture_default_str();
    app.add_option("--r-start", cfg.dataset.r_start, "Fixed starting offset into the dataset")
        ->capture_default_str();
    app.add_flag("--r-random", r_random, "Draw the starting offset per run instead");
    app.add_option("--label-column", cfg.dataset.label_column,
                   "CSV column holding the label; -1 = last")
        ->capture_default_str();
    app.add_flag("--no-normalize", "Skip per-node min-max feature scaling");
    app.add_option("--drift-at", cfg.dataset.drift_at,
                   "Synthetic: sample index of the distribution swap; 0 = midpoint")
        ->capture_default_str();
    app.add_option("--horizon", cfg.horizon, "Simulated seconds per run")->capture_default_str();
    app.add_option("--seeds", cfg.seeds, "Number of independent runs (seeds 1..k)")
        ->capture_default_str();
    app.add_option("--metrics-period", cfg.metrics_period, "Seconds between metric rows")
        ->capture_default_str();
    app.add_option("--out-dir", cfg.out_dir, "Directory for CSV output")->capture_default_str();
    app.add_option("--trace", cfg.trace_path, "Event trace file for the first seed");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.scenario = protosim::parse_scenario(scenario);
        cfg.dataset.r_random = r_random;
        cfg.dataset.normalize = app.count("--no-normalize") == 0;
        if (app.count("--queue-max-protos") > 0) cfg.queue_max_protos = queue_max_protos;
        if (app.count("--queue-max-sets") > 0) cfg.queue_max_sets = queue_max_sets;

        const protosim::ExperimentResult result = protosim::run_experiment(cfg);

        std::cout << "scenario " << scenario << ": " << result.run_files.size()
                  << " runs -> " << cfg.out_dir << "\n";
        std::cout << "aggregate: " << result.aggregate_file << "\n";
        std::cout << "summary:   " << result.summary_file << "\n";
        std::cout << "f1 percent per MB/s: " << result.efficiency << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
