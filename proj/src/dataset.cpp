#include "protosim/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace protosim {

std::vector<std::size_t> partition_indices(int m, int n, std::size_t S, std::size_t R) {
    if (n < 1) throw std::invalid_argument("partition_indices: n must be positive");
    if (m < 0 || m >= n) throw std::invalid_argument("partition_indices: node index out of range");
    if (S < 1) throw std::invalid_argument("partition_indices: need at least one sample per node");
    std::vector<std::size_t> out;
    out.reserve(S);
    for (std::size_t i = 0; i < S; ++i)
        out.push_back(R + i * static_cast<std::size_t>(n) + static_cast<std::size_t>(m));
    return out;
}

std::vector<Sample> synth_drift_stream(std::size_t count, std::size_t drift_at, Rng& rng) {
    if (drift_at > count)
        throw std::invalid_argument("synth_drift_stream: drift_at exceeds stream length");
    constexpr double kSigma = 0.08;
    const double mean_a[2] = {0.3, 0.3};
    const double mean_b[2] = {0.7, 0.7};
    std::vector<Sample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>(rng.below(2));
        const bool drifted = i >= drift_at;
        const double* mean = (label == 0) == !drifted ? mean_a : mean_b;
        Sample s;
        s.label = label;
        s.features = {rng.gaussian(mean[0], kSigma), rng.gaussian(mean[1], kSigma)};
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, std::size_t row, std::size_t col) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    double value = 0.0;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        std::ostringstream msg;
        msg << "csv: row " << row << ", column " << col << ": not a number: '" << text << "'";
        throw std::invalid_argument(msg.str());
    }
    return value;
}

int parse_label(const std::string& text, std::size_t row, std::size_t col) {
    const double v = parse_double(text, row, col);
    const int label = static_cast<int>(v);
    if (static_cast<double>(label) != v) {
        std::ostringstream msg;
        msg << "csv: row " << row << ": label is not an integer: '" << text << "'";
        throw std::invalid_argument(msg.str());
    }
    return label;
}

}  // namespace

std::vector<Sample> load_csv_rows(const std::string& path, int label_column) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header in " + path);
    const std::size_t columns = split_csv_line(line).size();
    if (columns < 2) throw std::invalid_argument("csv: need at least one feature and a label");
    const std::size_t label_at =
        label_column < 0 ? columns - 1 : static_cast<std::size_t>(label_column);
    if (label_at >= columns) throw std::invalid_argument("csv: label column out of range");

    std::vector<Sample> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != columns) {
            std::ostringstream msg;
            msg << "csv: row " << row_no << ": expected " << columns << " fields, got "
                << fields.size();
            throw std::invalid_argument(msg.str());
        }
        Sample s;
        s.features.reserve(columns - 1);
        for (std::size_t c = 0; c < columns; ++c) {
            if (c == label_at) s.label = parse_label(fields[c], row_no, c);
            else s.features.push_back(parse_double(fields[c], row_no, c));
        }
        rows.push_back(std::move(s));
    }
    return rows;
}

void min_max_normalize(std::vector<Sample>& samples) {
    if (samples.empty()) return;
    const std::size_t d = samples.front().features.size();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (const Sample& s : samples) {
        if (s.features.size() != d)
            throw std::invalid_argument("min_max_normalize: dimension mismatch");
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], s.features[k]);
            hi[k] = std::max(hi[k], s.features[k]);
        }
    }
    for (Sample& s : samples)
        for (std::size_t k = 0; k < d; ++k) {
            const double range = hi[k] - lo[k];
            s.features[k] = range > 0.0 ? (s.features[k] - lo[k]) / range : 0.0;
        }
}

std::vector<Sample> load_stream(const DatasetSpec& spec, int m, int n) {
    std::vector<Sample> rows;
    if (spec.source == "synthetic") {
        Rng rng(derive_seed(spec.synth_seed, 0x5d, 0));
        const std::size_t drift = spec.drift_at == 0 ? spec.d_size / 2 : spec.drift_at;
        rows = synth_drift_stream(spec.d_size, drift, rng);
    } else {
        rows = load_csv_rows(spec.source, spec.label_column);
    }
    const std::size_t S = spec.d_size / static_cast<std::size_t>(n);
    std::vector<Sample> stream;
    stream.reserve(S);
    for (const std::size_t idx : partition_indices(m, n, S, spec.r_start)) {
        if (idx >= rows.size()) {
            std::ostringstream msg;
            msg << "load_stream: index " << idx << " for node " << m << " exceeds source size "
                << rows.size();
            throw std::out_of_range(msg.str());
        }
        stream.push_back(rows[idx]);
    }
    if (spec.normalize) min_max_normalize(stream);
    return stream;
}

std::vector<std::vector<Sample>> build_node_streams(const DatasetSpec& spec, int n) {
    std::vector<std::vector<Sample>> streams;
    streams.reserve(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) streams.push_back(load_stream(spec, m, n));
    return streams;
}

}  // namespace protosim
