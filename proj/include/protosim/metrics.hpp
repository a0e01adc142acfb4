#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace protosim {

/// Cumulative confusion counts for one class.
struct Counts3 {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
};

/// Per-class prequential confusion counts.
struct ClassCounts {
    std::map<int, Counts3> per_class;
};

/// F1 = 2PR / (P + R); defined as 0 whenever tp is 0.
double f1_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn);

/// Test-then-train bookkeeping: a hit counts toward the true class, a miss
/// counts as a false negative for the true class and a false positive for
/// the predicted one.
void prequential_update(ClassCounts& counts, int true_label, int predicted_label);

/// Overall F1 of a counts table. Two-class tables over labels {0, 1} score
/// the positive class 1; anything else scores the macro average over the
/// classes seen so far.
double f1_from_counts(const ClassCounts& counts);

/// Compact single-field form "label:tp/fp/fn;..." used in CSV output.
std::string format_counts(const ClassCounts& counts);

/// One periodic observation of one node.
struct MetricsRecord {
    double time = 0.0;
    int node = 0;
    ClassCounts counts;
    double f1 = 0.0;
    std::uint64_t prototypes_trained = 0;
    std::uint64_t bytes_sent = 0;
    std::size_t model_size = 0;
    double mean_staleness = 0.0;  ///< time-averaged over this node's peers
};

/// Shortest round-trip decimal form of a double, locale-independent.
std::string format_double(double v);

/// Header line for record CSVs; run metadata columns come last.
std::string metrics_csv_header();

/// One CSV line. Field order matches metrics_csv_header().
std::string metrics_csv_row(const MetricsRecord& r, std::uint64_t seed,
                            const std::string& scenario);

/// Mean and sample standard deviation (n - 1 denominator; 0 for n < 2).
std::pair<double, double> mean_std(const std::vector<double>& values);

}  // namespace protosim
