#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "protosim/model.hpp"
#include "protosim/rng.hpp"

namespace protosim {

/// Where a run's samples come from and how they are sliced.
struct DatasetSpec {
    std::string source = "synthetic";  ///< CSV path, or "synthetic" for the generator
    std::size_t d_size = 5000;         ///< D, total samples drawn across all nodes
    std::size_t r_start = 0;           ///< R, offset of the first sample
    bool r_random = false;             ///< draw R per run instead of using r_start
    bool normalize = true;             ///< per-node min-max feature scaling
    int label_column = -1;             ///< CSV column holding the label; -1 = last
    std::size_t drift_at = 0;          ///< synthetic: sample index of the swap; 0 = d_size / 2
    std::uint64_t synth_seed = 0;      ///< synthetic: generator seed for this run
};

/// Indices {R + i * n + m : 0 <= i < S} of node m's interleaved slice.
std::vector<std::size_t> partition_indices(int m, int n, std::size_t S, std::size_t R);

/**
 * @brief Two-class planar stream with a single abrupt distribution swap.
 *
 * Labels are drawn evenly; class means start at (0.3, 0.3) and (0.7, 0.7)
 * with spherical noise and swap places from sample index drift_at onward.
 * drift_at must not exceed count.
 */
std::vector<Sample> synth_drift_stream(std::size_t count, std::size_t drift_at, Rng& rng);

/// Parses a whole CSV file: one header row, comma-separated numeric columns,
/// the label in label_column (-1 = last), everything else a feature.
/// Malformed rows raise std::invalid_argument naming the row.
std::vector<Sample> load_csv_rows(const std::string& path, int label_column);

/// Min-max scaling to [0, 1] per feature over the given set; a constant
/// feature maps to 0.
void min_max_normalize(std::vector<Sample>& samples);

/// Node m's private stream: source rows at the interleaved indices with
/// S = d_size / n, in index order, normalized per node when enabled. Indices
/// beyond the source raise std::out_of_range.
std::vector<Sample> load_stream(const DatasetSpec& spec, int m, int n);

/// All node streams of one run; load_stream applied per node.
std::vector<std::vector<Sample>> build_node_streams(const DatasetSpec& spec, int n);

}  // namespace protosim
