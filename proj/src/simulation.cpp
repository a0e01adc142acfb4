#include "protosim/simulation.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "protosim/events.hpp"
#include "protosim/staleness.hpp"

namespace protosim {

std::vector<std::string> validate_config(const SimulationConfig& cfg) {
    std::vector<std::string> bad;
    if (cfg.n < 2) bad.push_back("n must be at least 2");
    if (cfg.lambda_s <= 0.0) bad.push_back("lambda_s must be positive");
    if (cfg.mu <= 0.0) bad.push_back("mu must be positive");
    if (cfg.horizon <= 0.0) bad.push_back("horizon must be positive");
    if (cfg.metrics_period <= 0.0) bad.push_back("metrics_period must be positive");
    const ShareParams& sh = cfg.node.share;
    if (sh.fanout < 0 || sh.fanout > cfg.n - 1)
        bad.push_back("fanout must lie in [0, n - 1]");
    if (sh.share_probability < 0.0 || sh.share_probability > 1.0)
        bad.push_back("share probability must lie in [0, 1]");
    if (sh.jsd_threshold < 0.0 || sh.jsd_threshold > 1.0)
        bad.push_back("divergence threshold must lie in [0, 1]");
    const CompressionConfig& cc = cfg.node.compression;
    if (cc.limit_size == 0) bad.push_back("compression limit must be positive");
    if (cc.eps_initial <= 0.0) bad.push_back("clustering radius must start positive");
    if (cc.eps_up <= 1.0) bad.push_back("radius growth factor must exceed 1");
    if (cc.eps_down <= 0.0 || cc.eps_down >= 1.0)
        bad.push_back("radius shrink factor must lie in (0, 1)");
    if (cc.max_iterations < 1) bad.push_back("clustering needs at least one iteration");
    if (cc.min_pts < 1) bad.push_back("min_pts must be at least 1");
    if (!(cc.target_low > 0.0 && cc.target_low <= cc.target_high && cc.target_high <= 1.0))
        bad.push_back("target window must satisfy 0 < low <= high <= 1");
    if (cfg.node.kde.base_points < 1) bad.push_back("grid budget must be positive");
    if (cfg.node.kde.min_points < 1) bad.push_back("grid floor must be positive");
    if (static_cast<int>(cfg.streams.size()) != cfg.n)
        bad.push_back("exactly one stream per node required");
    std::size_t dim = 0;
    bool dim_ok = true;
    for (const auto& stream : cfg.streams)
        for (const Sample& s : stream) {
            if (dim == 0) dim = s.features.size();
            dim_ok = dim_ok && !s.features.empty() && s.features.size() == dim;
        }
    if (!dim_ok) bad.push_back("all samples must share one positive dimension");
    return bad;
}

namespace {

struct NodeRuntime {
    Node node;
    Rng op_rng;
    Rng time_rng;
    bool busy = false;
    double busy_until = 0.0;
    std::optional<Node::Work> in_flight;

    NodeRuntime(int id, int n, const NodeConfig& cfg, std::uint64_t seed)
        : node(id, n, cfg),
          op_rng(derive_seed(seed, static_cast<std::uint64_t>(id), 0)),
          time_rng(derive_seed(seed, static_cast<std::uint64_t>(id), 1)) {}
};

const char* work_name(const std::optional<Node::Work>& w) {
    if (!w) return "none";
    return std::holds_alternative<Node::SensorWork>(*w) ? "sensor" : "peer";
}

}  // namespace

RunResult run_simulation(const SimulationConfig& cfg) {
    if (const auto bad = validate_config(cfg); !bad.empty()) {
        std::ostringstream msg;
        msg << "run_simulation: invalid config: ";
        for (std::size_t i = 0; i < bad.size(); ++i) {
            if (i) msg << "; ";
            msg << bad[i];
        }
        throw std::invalid_argument(msg.str());
    }

    std::vector<NodeRuntime> nodes;
    nodes.reserve(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) nodes.emplace_back(i, cfg.n, cfg.node, cfg.seed);

    EventCalendar calendar;
    for (int i = 0; i < cfg.n; ++i) {
        const auto arrivals =
            schedule_poisson_arrivals(cfg.lambda_s, cfg.horizon, nodes[i].time_rng);
        const std::size_t usable = std::min(arrivals.size(), cfg.streams[i].size());
        for (std::size_t k = 0; k < usable; ++k) {
            Event e;
            e.time = arrivals[k];
            e.type = EventType::sensor_arrival;
            e.node = i;
            e.sample_index = k;
            calendar.schedule(std::move(e));
        }
    }

    StalenessTracker tracker(cfg.n);
    RunResult result;
    std::size_t occupancy = 0;
    std::uint64_t batch_length_sum = 0;
    std::uint64_t message_bytes_sum = 0;

    const auto note_model_size = [&](const Node& node) {
        if (node.initialized())
            result.max_model_size = std::max(result.max_model_size, node.model().size());
    };

    const auto try_start = [&](int i, double now) {
        NodeRuntime& nr = nodes[i];
        if (nr.busy) return;
        auto work = nr.node.pick_work(nr.op_rng);
        if (!work) return;
        --occupancy;
        nr.in_flight = std::move(work);
        nr.busy = true;
        nr.busy_until = now + nr.time_rng.exponential(cfg.mu);
        Event e;
        e.time = nr.busy_until;
        e.type = EventType::idle_tick;
        e.node = i;
        calendar.schedule(std::move(e));
    };

    const auto complete = [&](int i, double now) {
        NodeRuntime& nr = nodes[i];
        Node::Work work = std::move(*nr.in_flight);
        nr.in_flight.reset();
        nr.busy = false;
        auto outs = nr.node.complete_work(std::move(work), now, nr.op_rng);
        tracker.on_local_update(i, nr.node.logical_clock(), now);
        note_model_size(nr.node);
        for (Outgoing& o : outs) {
            const std::size_t protos = o.message.prototypes.size();
            batch_length_sum += protos;
            message_bytes_sum += encoded_size(o.message);
            result.max_message_prototypes = std::max(result.max_message_prototypes, protos);
            Event e;
            e.time = now;  // zero transport latency; sequence keeps FIFO per pair
            e.type = EventType::message_delivery;
            e.node = o.to;
            e.message = std::move(o.message);
            calendar.schedule(std::move(e));
        }
        try_start(i, now);
    };

    // Periodic observation rows. Boundaries strictly before the next event are
    // emitted first, so a boundary shared with an event covers that event too.
    std::uint64_t metric_step = 1;
    double emitted_up_to = -1.0;
    const auto emit_records = [&](double at) {
        tracker.advance_to(at);
        for (int i = 0; i < cfg.n; ++i) {
            const Node& node = nodes[i].node;
            MetricsRecord r;
            r.time = at;
            r.node = i;
            r.counts = node.prequential();
            r.f1 = f1_from_counts(r.counts);
            r.prototypes_trained = node.counters().prototypes_trained;
            r.bytes_sent = node.counters().bytes_sent;
            r.model_size = node.initialized() ? node.model().size() : 0;
            r.mean_staleness = tracker.node_mean_staleness(i);
            result.records.push_back(std::move(r));
        }
        emitted_up_to = at;
    };
    const auto emit_before = [&](double event_time) {
        while (true) {
            const double boundary = cfg.metrics_period * static_cast<double>(metric_step);
            if (boundary >= event_time || boundary > cfg.horizon) break;
            emit_records(boundary);
            ++metric_step;
        }
    };

    while (!calendar.empty()) {
        if (calendar.peek().time > cfg.horizon) break;
        emit_before(calendar.peek().time);
        Event e = calendar.pop();
        const double now = e.time;
        tracker.advance_to(now);
        ++result.events_processed;

        switch (e.type) {
            case EventType::sensor_arrival: {
                NodeRuntime& nr = nodes[e.node];
                if (cfg.trace)
                    *cfg.trace << format_double(now) << " sensor_arrival node=" << e.node
                               << " sample=" << e.sample_index << '\n';
                nr.node.push_sensor(cfg.streams[e.node][e.sample_index]);
                ++occupancy;
                try_start(e.node, now);
                break;
            }
            case EventType::message_delivery: {
                NodeRuntime& nr = nodes[e.node];
                if (cfg.trace)
                    *cfg.trace << format_double(now) << " message_delivery node=" << e.node
                               << " from=" << e.message.sender
                               << " protos=" << e.message.prototypes.size()
                               << " version=" << e.message.version << '\n';
                const std::size_t before = nr.node.queued_total();
                const std::uint64_t version = e.message.version;
                const int from = static_cast<int>(e.message.sender);
                nr.node.enqueue_peer_model(e.message);
                // Eviction can shrink the total; keep the sum unsigned-safe.
                occupancy = occupancy + nr.node.queued_total() - before;
                tracker.on_delivery(e.node, from, version, now);
                try_start(e.node, now);
                break;
            }
            case EventType::idle_tick: {
                NodeRuntime& nr = nodes[e.node];
                if (cfg.trace)
                    *cfg.trace << format_double(now) << " idle_tick node=" << e.node
                               << " completed=" << (nr.busy && now >= nr.busy_until
                                                        ? work_name(nr.in_flight)
                                                        : "none")
                               << '\n';
                if (nr.busy && now >= nr.busy_until) complete(e.node, now);
                else if (!nr.busy) try_start(e.node, now);
                break;
            }
        }
        if (now >= cfg.horizon / 2.0)
            result.max_occupancy_late = std::max(result.max_occupancy_late, occupancy);
    }

    emit_before(cfg.horizon);
    if (emitted_up_to != cfg.horizon) emit_records(cfg.horizon);
    tracker.advance_to(cfg.horizon);
    result.max_occupancy_late = std::max(result.max_occupancy_late, occupancy);
    result.final_occupancy = occupancy;

    for (int i = 0; i < cfg.n; ++i) {
        const Node& node = nodes[i].node;
        NodeSummary s;
        s.node = i;
        s.final_f1 = f1_from_counts(node.prequential());
        s.prototypes_trained = node.counters().prototypes_trained;
        s.bytes_sent = node.counters().bytes_sent;
        s.messages_sent = node.counters().messages_sent;
        s.messages_suppressed = node.counters().messages_suppressed;
        s.model_size = node.initialized() ? node.model().size() : 0;
        s.mean_staleness = tracker.node_mean_staleness(i);
        result.mean_final_f1 += s.final_f1;
        result.total_bytes += s.bytes_sent;
        result.total_messages += s.messages_sent;
        result.total_suppressed += s.messages_suppressed;
        result.total_trained += s.prototypes_trained;
        result.nodes.push_back(std::move(s));
    }
    result.mean_final_f1 /= static_cast<double>(cfg.n);
    result.mean_pairwise_staleness = tracker.mean_pairwise_staleness();
    if (result.total_messages > 0) {
        result.mean_batch_length = static_cast<double>(batch_length_sum) /
                                   static_cast<double>(result.total_messages);
        result.mean_message_bytes = static_cast<double>(message_bytes_sum) /
                                    static_cast<double>(result.total_messages);
    }
    return result;
}

}  // namespace protosim
