#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "protosim/events.hpp"
#include "protosim/experiment.hpp"
#include "protosim/metrics.hpp"
#include "protosim/simulation.hpp"
#include "protosim/staleness.hpp"

using namespace protosim;

namespace {

SimulationConfig small_config(std::uint64_t seed) {
    SimulationConfig cfg;
    cfg.n = 3;
    cfg.lambda_s = 10.0;
    cfg.mu = 400.0;
    cfg.horizon = 4.0;
    cfg.metrics_period = 1.0;
    cfg.seed = seed;
    cfg.node.share.fanout = 2;
    cfg.node.share.share_probability = 0.5;
    cfg.node.share.gate_enabled = false;
    DatasetSpec data;
    data.d_size = 300;
    data.synth_seed = seed;
    cfg.streams = build_node_streams(data, cfg.n);
    return cfg;
}

std::vector<std::string> record_lines(const RunResult& run) {
    std::vector<std::string> lines;
    for (const auto& r : run.records) lines.push_back(metrics_csv_row(r, 0, "x"));
    return lines;
}

}  // namespace

TEST_CASE("event calendar orders by time then admission") {
    EventCalendar cal;
    Event a;
    a.time = 2.0;
    a.node = 1;
    Event b;
    b.time = 1.0;
    b.node = 2;
    Event c;
    c.time = 2.0;
    c.node = 3;  // same time as a, admitted later
    cal.schedule(a);
    cal.schedule(b);
    cal.schedule(c);
    CHECK(cal.size() == 3);
    CHECK(cal.pop().node == 2);
    CHECK(cal.pop().node == 1);  // admission order breaks the tie
    CHECK(cal.pop().node == 3);
    CHECK(cal.empty());
    CHECK_THROWS_AS(cal.pop(), std::logic_error);
    CHECK_THROWS_AS(cal.peek(), std::logic_error);
}

TEST_CASE("poisson arrivals stay within count statistics") {
    // Expected 1000 arrivals; each seed must land within 3 standard
    // deviations (~95) and the times must be sorted inside the horizon.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        const auto times = schedule_poisson_arrivals(10.0, 100.0, rng);
        CHECK(std::abs(static_cast<double>(times.size()) - 1000.0) < 95.0);
        CHECK(std::is_sorted(times.begin(), times.end()));
        CHECK(times.front() > 0.0);
        CHECK(times.back() <= 100.0);
    }
    Rng rng(1);
    CHECK_THROWS_AS(schedule_poisson_arrivals(0.0, 10.0, rng), std::invalid_argument);
}

TEST_CASE("effective update rate and the stability predicate") {
    // Oracle: lambda (s T mean_batch + 1) = 1 * (2 * 0.5 * 3 + 1) = 4.
    CHECK(effective_update_rate(1.0, 2, 0.5, 3.0, 100.0) == doctest::Approx(4.0));
    // Saturated: 50 * 4 = 200 caps at mu = 100.
    CHECK(effective_update_rate(50.0, 2, 0.5, 3.0, 100.0) == doctest::Approx(100.0));
    CHECK(lemma1_stable(1.0, 2, 0.5, 3.0, 100.0));
    CHECK_FALSE(lemma1_stable(50.0, 2, 0.5, 3.0, 100.0));
    CHECK_FALSE(lemma1_stable(25.0, 2, 0.5, 3.0, 100.0));  // boundary 25 * 4 = 100 is unstable
}

TEST_CASE("staleness ceiling hand value") {
    // Oracle: (mu / (lambda s T)) * (1 + 1/2 + 1/3 + 1/4)
    //       = (100 / 1) * 2.083333... = 208.3333...
    CHECK(lemma2_staleness_bound(100.0, 1.0, 2, 0.5, 5) ==
          doctest::Approx(208.3333333333).epsilon(1e-9));
    CHECK(lemma2_staleness_bound(100.0, 1.0, 2, 0.5, 2) == doctest::Approx(100.0));
    CHECK_THROWS_AS(lemma2_staleness_bound(100.0, 0.0, 2, 0.5, 5), std::invalid_argument);
    CHECK_THROWS_AS(lemma2_staleness_bound(100.0, 1.0, 2, 0.5, 1), std::invalid_argument);
}

TEST_CASE("staleness tracker integrates a scripted history exactly") {
    StalenessTracker t(3);
    t.on_local_update(0, 1, 1.0);  // [0,1]: all zero
    CHECK(t.staleness(1, 0) == 1);
    CHECK(t.staleness(2, 0) == 1);
    t.on_delivery(1, 0, 1, 2.0);  // [1,2]: S(1,0) = 1 and S(2,0) = 1 accrue
    CHECK(t.staleness(1, 0) == 0);
    t.on_local_update(0, 2, 3.0);  // [2,3]: only S(2,0) = 1 accrues
    t.advance_to(4.0);             // [3,4]: S(1,0) = 1, S(2,0) = 2
    CHECK(t.version(0) == 2);
    CHECK(t.known(1, 0) == 1);
    // Oracle integrals: node 1 holds 1 * 1 + 1 * 1 = 2 over 4 s and 2 peers;
    // node 2 holds 1 + 1 + 2 = 4.
    CHECK(t.node_mean_staleness(1) == doctest::Approx(2.0 / 8.0));
    CHECK(t.node_mean_staleness(2) == doctest::Approx(4.0 / 8.0));
    CHECK(t.node_mean_staleness(0) == doctest::Approx(0.0));
    // All ordered pairs: total integral 6 over 4 s and 6 pairs.
    CHECK(t.mean_pairwise_staleness() == doctest::Approx(6.0 / 24.0));
}

TEST_CASE("staleness tracker caps deliveries at the sender's own version") {
    StalenessTracker t(2);
    t.on_local_update(0, 3, 1.0);
    // A version from the future cannot be known anywhere: capped at 3.
    t.on_delivery(1, 0, 99, 2.0);
    CHECK(t.known(1, 0) == 3);
    CHECK(t.staleness(1, 0) == 0);
    // Stale re-deliveries never move knowledge backwards.
    t.on_delivery(1, 0, 1, 3.0);
    CHECK(t.known(1, 0) == 3);
}

TEST_CASE("validate_config collects every violation") {
    SimulationConfig cfg;  // no streams, defaults otherwise fine
    cfg.n = 1;
    cfg.lambda_s = -1.0;
    cfg.node.share.fanout = 9;
    const auto errors = validate_config(cfg);
    CHECK(errors.size() >= 3);
    CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
}

TEST_CASE("records form a complete grid of periods and nodes") {
    const auto run = run_simulation(small_config(5));
    REQUIRE(!run.records.empty());
    // Boundaries 1, 2, 3 plus the horizon row at 4, for each of 3 nodes.
    CHECK(run.records.size() == 4 * 3);
    std::size_t i = 0;
    for (int period = 1; period <= 4; ++period)
        for (int node = 0; node < 3; ++node, ++i) {
            CHECK(run.records[i].time == doctest::Approx(period * 1.0));
            CHECK(run.records[i].node == node);
        }
}

TEST_CASE("per-node counters never decrease over time") {
    const auto run = run_simulation(small_config(6));
    for (int node = 0; node < 3; ++node) {
        const MetricsRecord* prev = nullptr;
        for (const auto& r : run.records) {
            if (r.node != node) continue;
            if (prev) {
                CHECK(r.prototypes_trained >= prev->prototypes_trained);
                CHECK(r.bytes_sent >= prev->bytes_sent);
                CHECK(r.f1 >= 0.0);
                CHECK(r.f1 <= 1.0);
                CHECK(r.mean_staleness >= 0.0);
            }
            prev = &r;
        }
    }
    // Summaries agree with the final records.
    for (const auto& s : run.nodes) {
        const auto& last = run.records[9 + static_cast<std::size_t>(s.node)];
        CHECK(s.prototypes_trained == last.prototypes_trained);
        CHECK(s.bytes_sent == last.bytes_sent);
        CHECK(s.final_f1 == doctest::Approx(last.f1));
    }
}

TEST_CASE("identical configs replay identical runs") {
    const auto a = run_simulation(small_config(7));
    const auto b = run_simulation(small_config(7));
    CHECK(record_lines(a) == record_lines(b));
    CHECK(a.total_bytes == b.total_bytes);
    CHECK(a.events_processed == b.events_processed);
    CHECK(a.mean_pairwise_staleness == b.mean_pairwise_staleness);
    // A different seed must not replay the same run.
    const auto c = run_simulation(small_config(8));
    CHECK(record_lines(a) != record_lines(c));
}

TEST_CASE("nodes stop training sensors when the stream runs dry") {
    SimulationConfig cfg = small_config(9);
    cfg.node.share.share_probability = 0.0;  // isolate sensor-driven work
    DatasetSpec data;
    data.d_size = 30;  // 10 samples per node, exhausted within the horizon
    data.synth_seed = 9;
    cfg.streams = build_node_streams(data, cfg.n);
    const auto run = run_simulation(cfg);
    for (const auto& s : run.nodes) {
        // Two samples seed the codebook; the other eight train.
        CHECK(s.prototypes_trained == 8);
        CHECK(s.bytes_sent == 0);
    }
    CHECK(run.final_occupancy == 0);
}

TEST_CASE("trace lines describe every event") {
    SimulationConfig cfg = small_config(10);
    std::ostringstream trace;
    cfg.trace = &trace;
    const auto run = run_simulation(cfg);
    std::istringstream in(trace.str());
    std::string line;
    std::uint64_t lines = 0;
    double last_time = 0.0;
    while (std::getline(in, line)) {
        ++lines;
        std::istringstream fields(line);
        double t = -1.0;
        std::string kind;
        const bool parsed = static_cast<bool>(fields >> t >> kind);
        REQUIRE(parsed);
        CHECK(t >= last_time);
        last_time = t;
        CHECK((kind == "sensor_arrival" || kind == "message_delivery" || kind == "idle_tick"));
        CHECK(line.find("node=") != std::string::npos);
    }
    CHECK(lines == run.events_processed);
}

TEST_CASE("stable configurations keep late occupancy flat as the horizon grows") {
    // Trend test: kept work in the second half should not scale with the
    // horizon when the stability condition holds, and final occupancy should
    // keep climbing when it is violated.
    const auto occupancy = [](double horizon, double mu, int fanout, double T,
                              std::uint64_t seed) {
        SimulationConfig cfg;
        cfg.n = 4;
        cfg.lambda_s = 8.0;
        cfg.mu = mu;
        cfg.horizon = horizon;
        cfg.metrics_period = horizon;  // one record per node is enough
        cfg.seed = seed;
        cfg.node.share.fanout = fanout;
        cfg.node.share.share_probability = T;
        cfg.node.share.gate_enabled = false;
        cfg.node.share.compress_before_share = true;
        cfg.node.compression.limit_size = 25;
        DatasetSpec data;
        data.d_size = static_cast<std::size_t>(4 * 8 * horizon * 1.6) + 64;
        data.synth_seed = seed;
        cfg.streams = build_node_streams(data, cfg.n);
        return run_simulation(cfg);
    };

    int unstable_votes = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        // Stable: lambda (s T L + 1) with L <= 25 gives at most
        // 8 * (1 * 0.2 * 25 + 1) = 48 << mu = 400. The late-window maximum
        // must stay under a constant that does not scale with the horizon
        // (empirically ~60; the bound leaves headroom for seed noise).
        const auto s2 = occupancy(8.0, 400.0, 1, 0.2, seed);
        const auto s4 = occupancy(16.0, 400.0, 1, 0.2, seed);
        CHECK(s2.max_occupancy_late <= 150);
        CHECK(s4.max_occupancy_late <= 150);
        CHECK(s2.final_occupancy <= 150);
        CHECK(s4.final_occupancy <= 150);
        // Unstable: mu = 30 cannot keep up with 8 * (3 * 1.0 * 25 + 1) = 608,
        // so the backlog at the horizon keeps growing with the horizon.
        const auto u2 = occupancy(8.0, 30.0, 3, 1.0, seed);
        const auto u4 = occupancy(16.0, 30.0, 3, 1.0, seed);
        CHECK(u4.final_occupancy > 1000);
        const double grow_unstable = static_cast<double>(u4.final_occupancy) /
                                     std::max<double>(1.0, u2.final_occupancy);
        if (grow_unstable > 1.5) ++unstable_votes;
    }
    CHECK(unstable_votes >= 4);
}

TEST_CASE("staleness scaling probe stays flat when fan-out tracks the group size") {
    // Group sweep N in {4, 8, 16, 32} with arrivals scaled with log N and
    // every node gossiping to all peers. Service saturation pins the version
    // advance rate at mu and every share resynchronizes the whole group, so
    // the time-averaged staleness settles near 1/T regardless of N. The
    // measured means must stay within a factor 2 of one another.
    const auto probe = [](int n) {
        SimulationConfig cfg;
        cfg.n = n;
        cfg.lambda_s = 30.0 * std::log2(static_cast<double>(n));
        cfg.mu = 40.0;  // below lambda_s for every n: sensor-saturated
        cfg.horizon = 6.0;
        cfg.metrics_period = 6.0;
        cfg.seed = 3;
        cfg.node.share.fanout = n - 1;
        cfg.node.share.share_probability = 0.5;
        cfg.node.share.gate_enabled = false;
        cfg.node.share.compress_before_share = true;
        cfg.node.compression.limit_size = 30;
        cfg.node.queue.max_sets = 1;
        DatasetSpec data;
        data.d_size = static_cast<std::size_t>(static_cast<double>(n) * cfg.lambda_s * 7.8);
        data.synth_seed = 3;
        cfg.streams = build_node_streams(data, n);
        return run_simulation(cfg).mean_pairwise_staleness;
    };
    std::vector<double> means;
    for (const int n : {4, 8, 16, 32}) means.push_back(probe(n));
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    CHECK(*lo > 0.0);
    CHECK(*hi / *lo <= 2.0);
}
