#include "protosim/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace protosim {

double f1_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

void prequential_update(ClassCounts& counts, int true_label, int predicted_label) {
    if (true_label == predicted_label) {
        counts.per_class[true_label].tp += 1;
    } else {
        counts.per_class[true_label].fn += 1;
        counts.per_class[predicted_label].fp += 1;
    }
}

double f1_from_counts(const ClassCounts& counts) {
    if (counts.per_class.empty()) return 0.0;
    const bool binary =
        counts.per_class.size() <= 2 &&
        counts.per_class.begin()->first >= 0 && counts.per_class.rbegin()->first <= 1;
    if (binary) {
        const auto it = counts.per_class.find(1);
        if (it == counts.per_class.end()) return 0.0;
        return f1_score(it->second.tp, it->second.fp, it->second.fn);
    }
    double acc = 0.0;
    for (const auto& [label, c] : counts.per_class) acc += f1_score(c.tp, c.fp, c.fn);
    return acc / static_cast<double>(counts.per_class.size());
}

std::string format_counts(const ClassCounts& counts) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [label, c] : counts.per_class) {
        if (!first) out << ';';
        first = false;
        out << label << ':' << c.tp << '/' << c.fp << '/' << c.fn;
    }
    return out.str();
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

std::string metrics_csv_header() {
    return "time,node,counts,f1,prototypes_trained,bytes_sent,model_size,mean_staleness,"
           "seed,scenario";
}

std::string metrics_csv_row(const MetricsRecord& r, std::uint64_t seed,
                            const std::string& scenario) {
    std::ostringstream out;
    out << format_double(r.time) << ',' << r.node << ',' << format_counts(r.counts) << ','
        << format_double(r.f1) << ',' << r.prototypes_trained << ',' << r.bytes_sent << ','
        << r.model_size << ',' << format_double(r.mean_staleness) << ',' << seed << ','
        << scenario;
    return out.str();
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double acc = 0.0;
    for (const double v : values) acc += (v - mean) * (v - mean);
    return {mean, std::sqrt(acc / static_cast<double>(values.size() - 1))};
}

}  // namespace protosim
