#include "protosim/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace protosim {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::base: return "base";
        case Scenario::jsd: return "jsd";
        case Scenario::limit_queue: return "limit-queue";
        case Scenario::clustering: return "clustering";
    }
    throw std::logic_error("to_string: unknown scenario");
}

Scenario parse_scenario(const std::string& name) {
    if (name == "base") return Scenario::base;
    if (name == "jsd") return Scenario::jsd;
    if (name == "limit-queue" || name == "limit_queue") return Scenario::limit_queue;
    if (name == "clustering") return Scenario::clustering;
    throw std::invalid_argument("unknown scenario: " + name);
}

SimulationConfig resolve(const ExperimentConfig& cfg, std::uint64_t seed) {
    SimulationConfig sim;
    sim.n = cfg.n;
    sim.lambda_s = cfg.lambda_s;
    sim.mu = cfg.mu;
    sim.horizon = cfg.horizon;
    sim.metrics_period = cfg.metrics_period;
    sim.seed = seed;
    sim.scenario_name = to_string(cfg.scenario);

    NodeConfig& node = sim.node;
    node.share.fanout = cfg.s;
    node.share.share_probability = cfg.t_share;
    node.share.jsd_threshold = cfg.th_jsd;
    node.compression.limit_size = cfg.th_prot;
    switch (cfg.scenario) {
        case Scenario::base:
            node.share.gate_enabled = false;
            break;
        case Scenario::jsd:
            node.share.gate_enabled = true;
            break;
        case Scenario::limit_queue:
            node.share.gate_enabled = true;
            node.queue.max_prototypes = 10000;
            break;
        case Scenario::clustering:
            node.share.gate_enabled = true;
            node.queue.max_prototypes = 10000;
            node.queue.max_sets = 1;
            node.compress_after_absorb = true;
            node.share.compress_before_share = true;
            break;
    }
    if (cfg.queue_max_protos) node.queue.max_prototypes = *cfg.queue_max_protos;
    if (cfg.queue_max_sets) node.queue.max_sets = *cfg.queue_max_sets;

    DatasetSpec data = cfg.dataset;
    data.synth_seed = seed;
    if (data.r_random && data.source != "synthetic") {
        const auto rows = load_csv_rows(data.source, data.label_column);
        if (rows.size() < data.d_size)
            throw std::invalid_argument("resolve: dataset smaller than d_size");
        Rng rng(derive_seed(seed, 0x0ff5e7, 0));
        data.r_start = rng.below(rows.size() - data.d_size + 1);
    }
    sim.streams = build_node_streams(data, cfg.n);
    return sim;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.seeds < 1) throw std::invalid_argument("run_experiment: need at least one seed");
    // Surface config errors before any file is touched.
    if (const auto bad = validate_config(resolve(cfg, 1)); !bad.empty()) {
        std::ostringstream msg;
        msg << "run_experiment: invalid config: ";
        for (std::size_t i = 0; i < bad.size(); ++i) {
            if (i) msg << "; ";
            msg << bad[i];
        }
        throw std::invalid_argument(msg.str());
    }
    std::filesystem::create_directories(cfg.out_dir);

    ExperimentResult result;
    const std::string scenario = to_string(cfg.scenario);
    std::ofstream trace_out;
    for (int k = 1; k <= cfg.seeds; ++k) {
        const auto seed = static_cast<std::uint64_t>(k);
        SimulationConfig sim = resolve(cfg, seed);
        if (!cfg.trace_path.empty() && k == 1) {
            trace_out.open(cfg.trace_path, std::ios::trunc);
            if (!trace_out) throw std::runtime_error("cannot write " + cfg.trace_path);
            sim.trace = &trace_out;
        }
        const RunResult run = run_simulation(sim);
        if (sim.trace) {
            trace_out.close();
            sim.trace = nullptr;
        }

        std::ostringstream name;
        name << cfg.out_dir << "/run_" << scenario << "_seed" << k << ".csv";
        std::ofstream out(name.str(), std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + name.str());
        out << metrics_csv_header() << '\n';
        for (const MetricsRecord& r : run.records)
            out << metrics_csv_row(r, seed, scenario) << '\n';
        result.run_files.push_back(name.str());

        SeedSummary s;
        s.seed = seed;
        s.final_f1 = run.mean_final_f1;
        s.bytes_per_node = static_cast<double>(run.total_bytes) / cfg.n;
        s.trained_per_node = static_cast<double>(run.total_trained) / cfg.n;
        s.mean_staleness = run.mean_pairwise_staleness;
        s.messages_sent = static_cast<double>(run.total_messages);
        s.messages_suppressed = static_cast<double>(run.total_suppressed);
        s.mean_message_bytes = run.mean_message_bytes;
        s.max_model_size = static_cast<double>(run.max_model_size);
        s.final_occupancy = static_cast<double>(run.final_occupancy);
        result.seeds.push_back(s);
    }

    const auto column = [&](auto pick) {
        std::vector<double> v;
        v.reserve(result.seeds.size());
        for (const SeedSummary& s : result.seeds) v.push_back(pick(s));
        return v;
    };
    const std::pair<const char*, std::vector<double>> metrics[] = {
        {"final_f1", column([](const SeedSummary& s) { return s.final_f1; })},
        {"bytes_per_node", column([](const SeedSummary& s) { return s.bytes_per_node; })},
        {"trained_per_node", column([](const SeedSummary& s) { return s.trained_per_node; })},
        {"mean_staleness", column([](const SeedSummary& s) { return s.mean_staleness; })},
        {"messages_sent", column([](const SeedSummary& s) { return s.messages_sent; })},
        {"messages_suppressed",
         column([](const SeedSummary& s) { return s.messages_suppressed; })},
        {"mean_message_bytes",
         column([](const SeedSummary& s) { return s.mean_message_bytes; })},
        {"max_model_size", column([](const SeedSummary& s) { return s.max_model_size; })},
        {"final_occupancy", column([](const SeedSummary& s) { return s.final_occupancy; })},
    };

    result.aggregate_file = cfg.out_dir + "/aggregate_" + scenario + ".csv";
    {
        std::ofstream out(result.aggregate_file, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + result.aggregate_file);
        out << "metric,mean,std\n";
        for (const auto& [name, values] : metrics) {
            const auto [mean, sd] = mean_std(values);
            out << name << ',' << format_double(mean) << ',' << format_double(sd) << '\n';
        }
    }

    const auto [f1_mean, f1_sd] = mean_std(metrics[0].second);
    const auto [bytes_mean, bytes_sd] = mean_std(metrics[1].second);
    const double mbps = bytes_mean / cfg.horizon / 1.0e6;
    result.efficiency = mbps > 0.0 ? (f1_mean * 100.0) / mbps : 0.0;

    result.summary_file = cfg.out_dir + "/summary_" + scenario + ".csv";
    {
        std::ofstream out(result.summary_file, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + result.summary_file);
        out << "key,value\n";
        out << "scenario," << scenario << '\n';
        out << "seeds," << cfg.seeds << '\n';
        out << "final_f1_mean," << format_double(f1_mean) << '\n';
        out << "final_f1_std," << format_double(f1_sd) << '\n';
        out << "bytes_per_node_mean," << format_double(bytes_mean) << '\n';
        out << "bandwidth_mbps," << format_double(mbps) << '\n';
        out << "f1_percent_per_mbps," << format_double(result.efficiency) << '\n';
    }
    return result;
}

}  // namespace protosim
